#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "thzqi/scenario.hpp"

namespace {

std::string default_out_root()
{
    if (const char* env = std::getenv("THZQI_OUT_ROOT"))
        return env;
    return "out";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"thzqi - nonlinear-interferometer terahertz imaging "
                 "simulator and distillation pipeline"};
    app.require_subcommand(1);

    std::string scenario_name;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> qmc_samples;
    std::optional<std::string> noise_mode;
    int threads = 0;

    auto* run = app.add_subcommand("run", "execute a scenario");
    run->add_option("--scenario", scenario_name,
                    "bundled scenario name or path to a scenario file")
        ->required();
    run->add_option("--out", out_dir,
                    "output directory (default: $THZQI_OUT_ROOT/<name>)");
    run->add_option("--seed", seed, "override the scenario rng seed");
    run->add_option("--qmc-samples", qmc_samples,
                    "override the pair-sample count");
    run->add_option("--threads", threads, "cap the worker thread count");
    run->add_option("--noise", noise_mode,
                    "noise mode: off | experimental")
        ->check(CLI::IsMember({"off", "experimental"}));

    auto* list = app.add_subcommand("list", "list bundled scenarios");

    std::string dump_name, dump_path;
    auto* dump = app.add_subcommand(
        "dump-scenario", "write a bundled scenario file (with comments)");
    dump->add_option("name", dump_name, "bundled scenario name")->required();
    dump->add_option("--out", dump_path, "target file (default: <name>.json)");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& entry : thzqi::scenario::catalog())
            std::cout << entry.name << "  -  " << entry.summary << "\n";
        return 0;
    }

    if (dump->parsed()) {
        try {
            const std::string text =
                thzqi::scenario::bundled_scenario_text(dump_name);
            const std::string path =
                dump_path.empty() ? dump_name + ".json" : dump_path;
            std::ofstream out(path);
            out << text;
            std::cout << "wrote " << path << "\n";
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

#ifdef _OPENMP
    if (threads > 0)
        omp_set_num_threads(threads);
#endif

    try {
        const auto scenario = thzqi::scenario::load_scenario(scenario_name);
        if (out_dir.empty())
            out_dir = (std::filesystem::path(default_out_root()) /
                       scenario.name)
                          .string();
        thzqi::scenario::RunOptions opts;
        opts.seed = seed;
        opts.qmc_samples = qmc_samples;
        opts.noise_mode = noise_mode;
        const auto result =
            thzqi::scenario::run_scenario(scenario, out_dir, opts);
        std::cout << "wrote " << out_dir << "/manifest.json\n";
        if (result.fov)
            std::cout << "fov: " << *result.fov * 1e3 << " mm (+- "
                      << result.report.fov_uncertainty * 1e3 << ")\n";
        if (result.knife)
            std::cout << "resolution: " << result.knife->resolution * 1e6
                      << " um (+- "
                      << result.knife->resolution_uncertainty * 1e6 << ")\n";
        if (result.measured_extinction)
            std::cout << "extinction (right vs left): "
                      << *result.measured_extinction << "\n";
        return 0;
    } catch (const thzqi::scenario::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const thzqi::scenario::StageError& e) {
        std::cerr << "runtime error in " << e.stage << ": " << e.what()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
