#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "ionquench/cli/commands.hpp"

namespace {

enum ExitCode { ok = 0, failure = 1, config_error = 2, numeric_error = 3 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ramsey visibility of an ion crystal after a spin-dependent quench"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string format = "csv";

    for (const std::string& name : ionquench::cli::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides [output] path)");
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        ionquench::cli::ScenarioConfig config = ionquench::cli::load_config(config_path);
        if (!out_dir.empty())
            config.out_dir = out_dir;
        config.format = format;
        const ionquench::cli::RunSummary summary =
            ionquench::cli::run(*ionquench::cli::parse_command(name), config, {config.out_dir, threads});
        for (const auto& file : summary.files)
            std::cout << file.string() << '\n';
        if (summary.point_errors)
            std::cerr << summary.point_errors << " sweep point(s) failed; see manifest.txt\n";
        return ok;
    } catch (const ionquench::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const ionquench::Error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return numeric_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
