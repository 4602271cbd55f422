#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mtlviz/cli.hpp"
#include "mtlviz/service.hpp"

namespace {

bool resolve_color(const std::string& mode) {
    if (mode == "always") return true;
    if (mode == "never") return false;
    const char* term = std::getenv("TERM");
    return ::isatty(STDOUT_FILENO) != 0 && term != nullptr && std::string(term) != "dumb";
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mtlviz;

    CLI::App app{"mtlviz: run small BASIC-style programs one line at a time and show their RAM"};
    app.require_subcommand(1);

    std::size_t default_cap = cli::step_cap_from_env(std::getenv("MTLVIZ_STEP_CAP")).value_or(kDefaultStepCap);

    std::string file;
    std::vector<std::string> inputs;
    std::string format = "text";
    std::string color = "auto";
    std::size_t step_cap = default_cap;
    int delay_ms = 0;

    auto* check = app.add_subcommand("check", "Check a program and report problems");
    check->add_option("file", file, "Program file (.mtl)")->required();

    auto* run = app.add_subcommand("run", "Run a program from start to end");
    run->add_option("file", file, "Program file (.mtl)")->required();
    run->add_option("--input", inputs, "Value for the next InputBox (repeatable)")->allow_extra_args(false);
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    run->add_option("--color", color, "Highlight the executed line")->check(CLI::IsMember({"auto", "always", "never"}));
    run->add_option("--step-cap", step_cap, "Stop after this many steps")->check(CLI::PositiveNumber);
    run->add_option("--delay-ms", delay_ms, "Pause between printed steps (text format)")->check(CLI::NonNegativeNumber);

    auto* stepper = app.add_subcommand("step", "Step through a program interactively");
    stepper->add_option("file", file, "Program file (.mtl)")->required();
    stepper->add_option("--input", inputs, "Queue a value for an InputBox (repeatable)")->allow_extra_args(false);
    stepper->add_option("--color", color, "Highlight the executed line")->check(CLI::IsMember({"auto", "always", "never"}));
    stepper->add_option("--step-cap", step_cap, "Stop after this many steps")->check(CLI::PositiveNumber);

    std::string kind;
    std::vector<std::string> params;
    auto* snippet = app.add_subcommand("snippet", "Generate a statement for one of the controls");
    snippet->add_option("kind", kind, "declaration|assignment|data_input|data_output|condition|looping|insert_text")
        ->required();
    snippet->add_option("--param", params, "key=value (repeatable)")->allow_extra_args(false);

    int port = 8080;
    std::string host = "127.0.0.1";
    std::string allow_origin;
    std::string persist_dir;
    int ttl_minutes = 30;
    auto* serve = app.add_subcommand("serve", "Start the HTTP session service");
    serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--allow-origin", allow_origin, "Origin allowed by CORS");
    serve->add_option("--persist-dir", persist_dir, "Directory for finished traces (<id>.json)");
    serve->add_option("--ttl-minutes", ttl_minutes, "Idle session lifetime")->check(CLI::PositiveNumber);
    serve->add_option("--step-cap", step_cap, "Default step cap for new sessions")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kEnvironment;
    }

    cli::CliConfig cfg;
    cfg.format = format == "json" ? cli::OutputFormat::Json : cli::OutputFormat::Text;
    cfg.color = resolve_color(color);
    cfg.inputs = inputs;
    cfg.step_cap = step_cap;
    cfg.delay_ms = delay_ms;

    if (*check) return cli::cmd_check(file, std::cout, std::cerr);
    if (*run) return cli::cmd_run(file, cfg, std::cout, std::cerr);
    if (*stepper) return cli::cmd_step(file, cfg, std::cin, std::cout, std::cerr);
    if (*snippet) return cli::cmd_snippet(kind, params, std::cout, std::cerr);

    service::Config config;
    config.idle_ttl = std::chrono::minutes(ttl_minutes);
    config.allow_origin = allow_origin;
    config.default_step_cap = step_cap;
    if (!persist_dir.empty()) config.persist_dir = persist_dir;
    service::Server server(std::move(config), &std::cerr);
    if (!server.bind(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port
                  << " (hint: the port may be in use; pick another with --port)\n";
        return cli::kEnvironment;
    }
    std::cout << "mtlviz service listening on http://" << host << ":" << port << std::endl;
    if (!server.listen_after_bind()) {
        std::cerr << "error: the service stopped unexpectedly (hint: check the log above)\n";
        return cli::kEnvironment;
    }
    return cli::kOk;
}
