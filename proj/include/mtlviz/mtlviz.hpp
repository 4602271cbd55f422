#pragma once

// Umbrella header for the interpreter core. The HTTP service lives in
// mtlviz/service.hpp and is included separately.

#include "mtlviz/source.hpp"
#include "mtlviz/lexer.hpp"
#include "mtlviz/ast.hpp"
#include "mtlviz/parser.hpp"
#include "mtlviz/checker.hpp"
#include "mtlviz/trace.hpp"
#include "mtlviz/annotate.hpp"
#include "mtlviz/machine.hpp"
#include "mtlviz/render.hpp"
#include "mtlviz/snippets.hpp"
