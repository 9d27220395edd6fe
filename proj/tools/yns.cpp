// Command-line entry point: yns <subcommand> --config <path> [--out <dir>]
// [--threads <n>] [--verbose].

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "yns/app.hpp"
#include "yns/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral lab for compressible Navier-Stokes with a Yukawa potential"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    int threads = 0;
    bool verbose = false;

    for (const auto& name : yns::kExperimentNames) {
        CLI::App* sub = app.add_subcommand(name, "run the '" + name + "' experiment block");
        sub->add_option("--config", config_path, "run-config JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--threads", threads, "worker threads (fallback: YNS_THREADS)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--verbose", verbose, "progress on stderr");
    }
    CLI11_PARSE(app, argc, argv);

    if (threads == 0) {
        const char* env = std::getenv("YNS_THREADS");
        threads = env ? std::max(1, std::atoi(env)) : 1;
    }
    yns::DispatchOptions opts;
    opts.threads = threads;
    opts.verbose = verbose;
    opts.out = out_dir;
    opts.base_dir = std::filesystem::absolute(config_path).parent_path();

    std::string text;
    try {
        text = yns::read_text(config_path);
    } catch (const yns::Error& e) {
        std::cerr << e.what() << "\n";
        return yns::kExitConfig;
    }
    return yns::run_document(text, app.get_subcommands().front()->get_name(), opts);
}
