// Command-line front end: run sweeps, reproduce figures, build ground truth, self-test.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hjbmarch/hjbmarch.hpp"

namespace {

hjb::SweepOptions sweep_options(std::size_t jobs) {
    hjb::SweepOptions opt;
    opt.jobs = jobs;
    opt.cache_dir = hjb::default_cache_dir();
    opt.log = &std::cerr;
    return opt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit, implicit and hybrid time marching for time-dependent Eikonal / HJB equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::size_t jobs = 1;
    std::string out_dir;
    std::uint64_t seed = 1;
    std::string figure;

    auto* run = app.add_subcommand("run", "run the (scheme x resolution x r) sweep described by a config file");
    run->add_option("--config", config_path, "INI run description")->required()->check(CLI::ExistingFile);
    run->add_option("--jobs", jobs, "sweep cells to run concurrently")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    run->add_option("--seed", seed, "seed recorded with the run");

    auto* repro = app.add_subcommand("reproduce", "regenerate a figure's sweep tables and plot script");
    repro->add_option("figure", figure, "fig2, fig3, fig5, fig7, fig8 or fig9")
        ->required()
        ->check(CLI::IsMember(hjb::figure_ids()));
    repro->add_option("--jobs", jobs, "sweep cells to run concurrently")->check(CLI::PositiveNumber);
    repro->add_option("--out", out_dir, "output directory (default: reproduce-<figure>)");

    auto* truth = app.add_subcommand("truth", "compute or load the cached fine-grid ground truth");
    truth->add_option("--config", config_path, "INI run description (problem and fine_resolution)")
        ->required()
        ->check(CLI::ExistingFile);

    auto* self = app.add_subcommand("selftest", "run the randomized invariant suites");
    self->add_option("--seed", seed, "seed for the random instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            hjb::RunSpec spec = hjb::parse_config(config_path);
            if (!out_dir.empty()) spec.out_dir = out_dir;
            if (run->count("--seed")) spec.seed = seed;
            hjb::cmd_run(spec, sweep_options(jobs), std::cout);
            std::cout << "wrote " << (spec.out_dir / "sweep.csv").string() << "\n";
            return 0;
        }
        if (*repro) {
            const std::filesystem::path dir = out_dir.empty() ? "reproduce-" + figure : out_dir;
            for (const auto& f : hjb::cmd_reproduce(figure, dir, sweep_options(jobs), std::cout)) {
                std::cout << "wrote " << f.string() << "\n";
            }
            return 0;
        }
        if (*truth) {
            const hjb::RunSpec spec = hjb::parse_config(config_path);
            if (spec.is_1d()) throw std::invalid_argument("ground truth applies to 2D problems only");
            const auto p = hjb::make_problem(spec.problem, spec.parameters);
            const auto gt = hjb::ground_truth(p, spec.fine_resolution);
            std::cout << (gt.from_cache ? "loaded " : "computed ") << gt.file.string() << "\n";
            return 0;
        }
        if (*self) {
            int failures = 0;
            for (const auto& r : hjb::selftest::run_all(seed)) {
                if (!r.pass) ++failures;
                std::printf("%s  %-52s %8.1f ms  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.wall_ms,
                            r.detail.c_str());
            }
            return failures == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "hjbmarch: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
