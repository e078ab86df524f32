#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjbmarch/sweep.hpp"

namespace hjb {

/// One CSV of a figure: the explicit sweep at k = k_hat plus sweeps over doubling r.
struct FigurePanel {
    std::string name;  // CSV stem
    RunSpec explicit_sweep;
    RunSpec stepped_sweep;
};

struct FigurePlan {
    std::string id;
    std::string title;
    std::vector<FigurePanel> panels;
};

inline const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig2", "fig3", "fig5", "fig7", "fig8", "fig9"};
    return ids;
}

namespace detail {

inline FigurePanel make_panel(std::string name, RunSpec base, std::vector<std::string> stepped_schemes,
                              std::vector<double> r) {
    base.write_fields = false;
    FigurePanel panel;
    panel.name = std::move(name);
    panel.explicit_sweep = base;
    panel.explicit_sweep.schemes = {"explicit"};
    panel.explicit_sweep.r = {1.0};
    panel.stepped_sweep = std::move(base);
    panel.stepped_sweep.schemes = std::move(stepped_schemes);
    panel.stepped_sweep.r = std::move(r);
    return panel;
}

inline RunSpec advection_spec(const std::string& case_id) {
    RunSpec s;
    s.problem = "advection1d";
    s.case_id = case_id;
    s.resolutions = {64, 128, 256, 512, 1024};
    return s;
}

inline RunSpec planar_spec(const std::string& name, std::map<std::string, double> params,
                           std::vector<std::size_t> resolutions) {
    RunSpec s;
    s.problem = name;
    s.parameters = std::move(params);
    s.resolutions = std::move(resolutions);
    return s;
}

}  // namespace detail

/// Desk-scale versions of the paper's figures (2D grids up to 256, 1D up to 1024 cells).
inline FigurePlan figure_plan(const std::string& id) {
    FigurePlan f;
    f.id = id;
    const std::vector<double> doubling{1, 2, 4, 8, 16, 32, 64};
    if (id == "fig2") {
        f.title = "1D advection: speed-function suite";
        for (const char* c : {"fig2a", "fig2b", "fig2c", "fig2d"}) {
            f.panels.push_back(
                detail::make_panel(c, detail::advection_spec(c), {"implicit", "semi-lagrangian"}, doubling));
        }
    } else if (id == "fig3") {
        f.title = "1D advection: hybrid scheme";
        for (const char* c : {"fig3a", "fig3b"}) {
            f.panels.push_back(detail::make_panel(c, detail::advection_spec(c), {"implicit", "hybrid"}, doubling));
        }
    } else if (id == "fig5") {
        f.title = "Experiment 1";
        f.panels.push_back(detail::make_panel("experiment1", detail::planar_spec("experiment1", {}, {32, 64, 128, 256}),
                                              {"implicit"}, {1, 2, 4, 8, 16, 32}));
    } else if (id == "fig7") {
        f.title = "Experiment 2";
        for (double lambda : {0.1, 0.25, 0.8}) {
            f.panels.push_back(detail::make_panel("experiment2_lambda" + detail::number_tag(lambda),
                                                  detail::planar_spec("experiment2", {{"lambda", lambda}}, {32, 64, 128}),
                                                  {"implicit"}, {1, 2, 4, 8, 16}));
        }
    } else if (id == "fig8") {
        f.title = "Experiment 3";
        for (double gamma : {11.0, 5.0}) {
            f.panels.push_back(detail::make_panel("experiment3_gamma" + detail::number_tag(gamma),
                                                  detail::planar_spec("experiment3", {{"gamma", gamma}}, {32, 64, 128, 256}),
                                                  {"implicit", "hybrid"}, {1, 2, 4, 8, 16, 32}));
        }
    } else if (id == "fig9") {
        f.title = "Experiment 4 (512x512 ground truth)";
        f.panels.push_back(detail::make_panel("experiment4", detail::planar_spec("experiment4", {}, {32, 64, 128}),
                                              {"implicit", "hybrid"}, {1, 2, 4, 8, 16, 32}));
    } else {
        throw std::invalid_argument("unknown figure id '" + id + "' (expected fig2, fig3, fig5, fig7, fig8 or fig9)");
    }
    return f;
}

/// Standalone matplotlib script: accuracy vs k and accuracy vs wall time, in L1 and L-infinity.
inline std::string plot_script(const FigurePlan& f) {
    std::string names;
    for (const auto& p : f.panels) names += "    \"" + p.name + "\",\n";
    return R"PY(#!/usr/bin/env python3
"""Plots )PY" + f.id + " (" + f.title + R"PY().

Blue: explicit scheme over resolutions at the CFL step. One green-family
curve per resolution for every other scheme, over doubling time steps.
Usage: python3 )PY" + f.id + R"PY(.py  (reads the CSVs next to this script, writes PNGs there)
"""
import csv
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

PANELS = [
)PY" + names + R"PY(]
STYLES = {"implicit": "tab:green", "hybrid": "tab:red", "semi-lagrangian": "tab:purple"}
MARKERS = "osD^v<>ph*"


def load(name):
    with open(os.path.join(os.path.dirname(os.path.abspath(__file__)), name + ".csv")) as fh:
        return list(csv.DictReader(fh))


def value(row, key):
    # Sub-millisecond timings are clamped so the log axis stays defined.
    return max(float(row[key]), 1e-3) if key == "wall_ms" else float(row[key])


def draw(ax, rows, xkey, ykey):
    explicit = sorted((r for r in rows if r["scheme"] == "explicit"), key=lambda r: int(r["resolution"]))
    resolutions = sorted({int(r["resolution"]) for r in rows})
    marker = {n: MARKERS[i % len(MARKERS)] for i, n in enumerate(resolutions)}
    ax.plot([value(r, xkey) for r in explicit], [float(r[ykey]) for r in explicit], "-", color="tab:blue",
            label="explicit")
    for r in explicit:
        ax.plot(value(r, xkey), float(r[ykey]), marker[int(r["resolution"])], color="tab:blue")
    curves = defaultdict(list)
    for r in rows:
        if r["scheme"] != "explicit":
            curves[(r["scheme"], int(r["resolution"]))].append(r)
    for (scheme, n), pts in sorted(curves.items()):
        pts.sort(key=lambda r: float(r["r"]))
        ax.plot([value(r, xkey) for r in pts], [float(r[ykey]) for r in pts], "-" + marker[n],
                color=STYLES.get(scheme, "black"), label="%s n=%d" % (scheme, n), markersize=4)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)


for panel in PANELS:
    rows = load(panel)
    fig, axes = plt.subplots(2, 2, figsize=(11, 8))
    for row, (norm, label) in enumerate((("l1", "$L_1$"), ("linf", r"$L_\infty$"))):
        draw(axes[row][0], rows, "k", norm)
        axes[row][0].set_xlabel("time step k")
        axes[row][0].set_ylabel(label + " error")
        draw(axes[row][1], rows, "wall_ms", norm)
        axes[row][1].set_xlabel("wall time [ms]")
    axes[0][0].legend(fontsize=6, ncol=2)
    fig.suptitle(panel)
    fig.tight_layout()
    fig.savefig(os.path.join(os.path.dirname(os.path.abspath(__file__)), panel + ".png"), dpi=120)
    plt.close(fig)
)PY";
}

/// `reproduce` subcommand: one CSV per panel plus <figure>.py in `out_dir`.
inline std::vector<std::filesystem::path> cmd_reproduce(const std::string& id, const std::filesystem::path& out_dir,
                                                        const SweepOptions& opt, std::ostream& out) {
    const FigurePlan f = figure_plan(id);
    OutputTransaction tx(out_dir);
    std::vector<std::filesystem::path> written;
    for (const auto& panel : f.panels) {
        out << "== " << panel.name << "\n";
        std::vector<SweepRecord> records;
        for (const RunSpec* spec : {&panel.explicit_sweep, &panel.stepped_sweep}) {
            RunSpec s = *spec;
            s.out_dir = out_dir;
            for (const auto& c : run_sweep(s, opt)) records.push_back(c.record);
        }
        print_summary(out, records);
        auto os = tx.open(panel.name + ".csv");
        write_sweep_csv(os, records);
        written.push_back(out_dir / (panel.name + ".csv"));
    }
    {
        auto os = tx.open(f.id + ".py");
        os << plot_script(f);
        written.push_back(out_dir / (f.id + ".py"));
    }
    tx.commit();
    return written;
}

}  // namespace hjb
