#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hjbmarch/advect1d.hpp"
#include "hjbmarch/config.hpp"
#include "hjbmarch/marchers.hpp"
#include "hjbmarch/metrics.hpp"

namespace hjb {

/// One cell of a sweep: its record plus the fields to write, keyed by report time.
struct SweepCell {
    SweepRecord record;
    std::vector<std::pair<double, Field>> fields;
};

struct SweepOptions {
    std::size_t jobs = 1;
    std::filesystem::path cache_dir = default_cache_dir();
    std::ostream* log = nullptr;
};

namespace detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::string number_tag(double v) {
    std::string s;
    append_double(s, v);
    return s;
}

struct CellPlan {
    std::string scheme;
    std::size_t resolution;
    double r;
};

inline std::vector<CellPlan> plan_cells(const RunSpec& spec) {
    std::vector<CellPlan> plan;
    for (const auto& s : spec.schemes) {
        for (auto n : spec.resolutions) {
            for (double r : spec.r) plan.push_back({s, n, r});
        }
    }
    return plan;
}

inline SweepCell run_cell_1d(const RunSpec& spec, const CellPlan& c) {
    const double alpha = spec.parameters.count("alpha") ? spec.parameters.at("alpha") : 0.0;
    const auto p = advection_catalog(spec.case_id, alpha);
    const double t_end =
        spec.report_given ? *std::max_element(spec.report.begin(), spec.report.end()) : p.report_time;
    if (!(t_end > 0.0)) throw std::invalid_argument("1D runs need a positive report time");
    const GridSpec g = unit_grid(1, c.resolution);
    const double k = c.r * advect::cfl_step_1d(p, g.spacing());
    const auto scheme = advect::parse_scheme(c.scheme);
    SweepCell cell;
    std::vector<double> times;
    for (std::size_t run = 0; run < spec.timing_runs; ++run) {
        auto res = advect::march_1d(p, g, scheme, k, t_end);
        times.push_back(res.wall_ms);
        if (run == 0) {
            cell.record.k = res.step;
            cell.record.updates = res.updates;
            cell.record.error = error_vs_analytic_1d(res.final_field, p, t_end);
            cell.fields.emplace_back(t_end, std::move(res.final_field));
        }
    }
    cell.record.scheme = c.scheme;
    cell.record.resolution = c.resolution;
    cell.record.r = c.r;
    cell.record.wall_ms = median(times);
    return cell;
}

inline SweepCell run_cell_2d(const RunSpec& spec, const CellPlan& c, const IsotropicProblem& p,
                             const Field* truth) {
    MarchConfig cfg = make_config(p, parse_scheme(c.scheme), c.resolution, c.r);
    cfg.record_slices = {0};
    std::vector<std::pair<double, std::size_t>> wanted;
    for (double t : spec.report) {
        const std::size_t n = slice_index(cfg.time, t);
        cfg.record_slices.insert(n);
        wanted.emplace_back(t, n);
    }
    SweepCell cell;
    std::vector<double> times;
    for (std::size_t run = 0; run < spec.timing_runs; ++run) {
        auto res = march(p, cfg);
        times.push_back(res.report.wall_ms);
        if (run != 0) continue;
        cell.record.k = res.step;
        cell.record.updates = res.report.updates;
        const Field& v0 = res.slice(0);
        if (truth) {
            cell.record.error = error_vs_reference(v0, *truth, nesting_stride(v0.grid(), truth->grid()), 0.0);
        } else {
            cell.record.error = error_vs_analytic(v0, p, 0.0);
        }
        if (spec.write_fields) {
            for (const auto& [t, n] : wanted) cell.fields.emplace_back(t, res.slice(n));
        }
    }
    cell.record.scheme = c.scheme;
    cell.record.resolution = c.resolution;
    cell.record.r = c.r;
    cell.record.wall_ms = median(times);
    return cell;
}

}  // namespace detail

/**
 * Runs the (scheme x resolution x r) cross-product, up to `jobs` cells at a
 * time. Results come back in plan order regardless of completion order.
 * Problems without an analytic solution are compared against the cached
 * fine-grid ground truth, which is computed first if missing.
 */
inline std::vector<SweepCell> run_sweep(const RunSpec& spec, const SweepOptions& opt = {}) {
    validate(spec);
    const auto plan = detail::plan_cells(spec);
    std::optional<IsotropicProblem> problem;
    std::optional<Field> truth;
    if (!spec.is_1d()) {
        problem = make_problem(spec.problem, spec.parameters);
        if (!problem->has_analytic()) {
            for (auto n : spec.resolutions) {
                if (spec.fine_resolution % n != 0) {
                    throw ConfigError("resolution " + std::to_string(n) + " does not divide fine_resolution " +
                                      std::to_string(spec.fine_resolution));
                }
            }
            if (opt.log) *opt.log << "ground truth for " << problem_key(*problem) << " at " << spec.fine_resolution << "\n";
            auto gt = ground_truth(*problem, spec.fine_resolution, opt.cache_dir);
            if (opt.log) *opt.log << (gt.from_cache ? "  loaded " : "  computed ") << gt.file.string() << "\n";
            truth = std::move(gt.field);
        }
    }

    std::vector<std::optional<SweepCell>> cells(plan.size());
    std::vector<std::exception_ptr> errors(plan.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < plan.size(); i = next++) {
            try {
                cells[i] = spec.is_1d() ? detail::run_cell_1d(spec, plan[i])
                                        : detail::run_cell_2d(spec, plan[i], *problem, truth ? &*truth : nullptr);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(opt.jobs, 1, std::max<std::size_t>(plan.size(), 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<SweepCell> out;
    out.reserve(plan.size());
    for (auto& c : cells) out.push_back(std::move(*c));
    return out;
}

inline std::string field_file_name(const SweepRecord& rec, double t) {
    return rec.scheme + "_n" + std::to_string(rec.resolution) + "_r" + detail::number_tag(rec.r) + "_t" +
           detail::number_tag(t) + ".csv";
}

inline void print_summary(std::ostream& os, std::span<const SweepRecord> records) {
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %6s %8s %12s %12s %12s %12s %10s\n", "scheme", "n", "r", "k", "L1",
                  "Linf", "updates", "ms");
    os << line;
    for (const auto& r : records) {
        std::snprintf(line, sizeof line, "%-16s %6zu %8g %12.4e %12.4e %12.4e %12zu %10.1f\n", r.scheme.c_str(),
                      r.resolution, r.r, r.k, r.error.l1, r.error.linf, r.updates, r.wall_ms);
        os << line;
    }
}

/// Tracks files written by a command so a failure can remove them again.
class OutputTransaction {
public:
    explicit OutputTransaction(std::filesystem::path dir) : dir_(std::move(dir)) {}
    OutputTransaction(const OutputTransaction&) = delete;
    OutputTransaction& operator=(const OutputTransaction&) = delete;

    ~OutputTransaction() {
        if (committed_) return;
        std::error_code ec;
        for (auto it = files_.rbegin(); it != files_.rend(); ++it) std::filesystem::remove(*it, ec);
        for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it) std::filesystem::remove(*it, ec);  // only if empty
    }

    std::ofstream open(const std::filesystem::path& relative) {
        const auto path = dir_ / relative;
        make_dirs(path.parent_path());
        files_.push_back(path);
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        return out;
    }

    void commit() { committed_ = true; }

private:
    void make_dirs(const std::filesystem::path& d) {
        std::vector<std::filesystem::path> missing;
        for (auto p = d; !p.empty() && !std::filesystem::exists(p); p = p.parent_path()) missing.push_back(p);
        std::filesystem::create_directories(d);
        dirs_.insert(dirs_.end(), missing.rbegin(), missing.rend());
    }

    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
    std::vector<std::filesystem::path> dirs_;
    bool committed_ = false;
};

/// `run` subcommand: sweep.csv, per-slice field CSVs, and a summary table on `out`.
inline std::vector<SweepRecord> cmd_run(const RunSpec& spec, const SweepOptions& opt, std::ostream& out) {
    OutputTransaction tx(spec.out_dir);
    const auto cells = run_sweep(spec, opt);
    std::vector<SweepRecord> records;
    for (const auto& c : cells) {
        if (!std::isfinite(c.record.error.l1) || !std::isfinite(c.record.error.linf)) {
            throw std::runtime_error("non-finite error for " + c.record.scheme + " n=" +
                                     std::to_string(c.record.resolution));
        }
        records.push_back(c.record);
    }
    {
        auto os = tx.open("sweep.csv");
        write_sweep_csv(os, records);
    }
    if (spec.write_fields) {
        for (const auto& c : cells) {
            for (const auto& [t, field] : c.fields) {
                auto os = tx.open(std::filesystem::path("fields") / field_file_name(c.record, t));
                write_csv(os, field);
            }
        }
    }
    tx.commit();
    print_summary(out, records);
    return records;
}

}  // namespace hjb
