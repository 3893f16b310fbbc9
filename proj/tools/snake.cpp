// Command-line driver: snake <config> [--out DIR] [--render] [--strict]

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "snake/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dynamic snake experiments"};
    std::string config_path;
    std::string out_dir;
    bool render = false;
    bool strict = false;
    app.add_option("config", config_path, "experiment config file")->required();
    app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
    app.add_flag("--render", render, "write overlay.svg and field.pgm");
    app.add_flag("--strict", strict, "treat unknown config keys as errors");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : snake::kExitError;
    }

    try {
        const snake::ExperimentConfig cfg = snake::load_config(config_path, strict);
        for (const std::string& w : cfg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        snake::RunOptions opts;
        if (!out_dir.empty()) opts.out_dir = std::filesystem::path(out_dir);
        opts.render = render;
        const int status = snake::run(cfg, opts);
        const std::filesystem::path dir = opts.out_dir.value_or(cfg.output_dir);
        std::printf("%s: %s (output in %s)\n", snake::to_string(cfg.kind),
                    status == snake::kExitOk ? "ok" : "failed", dir.string().c_str());
        return status;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "snake: error: %s\n", e.what());
        return snake::kExitError;
    }
}
