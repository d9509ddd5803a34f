// Command-line front end: run, mms, sweep, dependence, report.
//
// Every command writes a machine-readable summary.json into its output
// directory and exits 0 exactly when all requested checks passed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "mhdbfed/config.hpp"
#include "mhdbfed/errors.hpp"
#include "mhdbfed/diagnostics.hpp"
#include "mhdbfed/io_store.hpp"
#include "mhdbfed/spectral_ops.hpp"
#include "mhdbfed/transforms.hpp"
#include "mhdbfed/verification.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mhdbfed;

namespace {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Summary {
    std::string command;
    std::string out_dir;
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    json data = json::object();

    bool all_pass() const {
        for (const Check& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void add(const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({name, pass, detail});
        std::cout << (pass ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : "  (") << detail
                  << (detail.empty() ? "" : ")") << "\n";
    }

    int write_and_exit_code() const {
        json j;
        j["command"] = command;
        j["out_dir"] = out_dir;
        j["warnings"] = warnings;
        j["data"] = data;
        j["all_pass"] = all_pass();
        j["checks"] = json::array();
        for (const Check& c : checks)
            j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        fs::create_directories(out_dir);
        std::ofstream out(fs::path(out_dir) / "summary.json");
        out << j.dump(2) << "\n";
        return all_pass() ? 0 : 1;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct CommonOpts {
    std::string config_path;
    std::string out_override;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config) {
    auto* cfg = cmd->add_option("--config", o.config_path, "INI config file");
    if (need_config) cfg->required();
    cmd->add_option("--out", o.out_override, "output directory (overrides [output] dir)");
    cmd->add_option("--seed", o.seed, "seed override for the initial condition")
        ->each([&o](const std::string&) { o.seed_given = true; });
    cmd->add_option("--threads", o.threads, "FFT threads")->envname("MHDBFED_THREADS");
    cmd->add_flag("--strict", o.strict, "escalate lint warnings to errors");
}

RunConfig load_config(const CommonOpts& o, const std::string& command, Summary& summary) {
    RunConfig cfg = parse_config(o.config_path);
    if (!o.out_override.empty()) cfg.out_dir = o.out_override;
    if (o.seed_given) cfg.ic.seed = o.seed;
    summary.out_dir = cfg.out_dir;
    summary.warnings = lint_config(cfg, command);
    for (const std::string& w : summary.warnings) std::cerr << "warning: " << w << "\n";
    if (o.strict && !summary.warnings.empty())
        throw mhdbfed::ConfigError("lint warnings present and --strict was given");
    return cfg;
}

RunManifest make_manifest(const RunConfig& cfg, const std::string& command, const CommonOpts& o) {
    RunManifest m;
    m.cfg = cfg;
    m.command = command;
    m.seed = cfg.ic.seed;
    m.threads = o.threads;
    return m;
}

// Integrates one configured problem, streaming monitor rows to a CSV and
// keeping them in memory for the post-run checks.
std::vector<MonitorRecord> integrate_with_outputs(const RunConfig& cfg, const fs::path& dir) {
    const Grid g = make_grid(cfg.N, cfg.L);
    const State ic = make_ic(cfg.ic, g);

    TimeseriesWriter ts((dir / "timeseries.csv").string());
    std::vector<MonitorRecord> records;
    RunSinks sinks;
    sinks.monitor_every = cfg.monitor_every;
    sinks.on_monitor = [&](const State& s, long) {
        records.push_back(monitor(s, cfg.physics));
        ts.append(records.back());
    };
    sinks.checkpoint_every = cfg.checkpoint_every;
    sinks.on_checkpoint = [&](const State& s, long) {
        write_snapshot((dir / "checkpoint.snap").string(), s, cfg.physics);
    };

    const State final_state = run(ic, cfg.physics, cfg.time, {}, sinks);
    ts.flush();
    write_snapshot((dir / "final.snap").string(), final_state, cfg.physics);
    return records;
}

double max_mean_drift(const std::vector<MonitorRecord>& recs) {
    double drift = 0.0;
    for (const MonitorRecord& r : recs)
        drift = std::max(drift, (r.mean_b - recs.front().mean_b).cwiseAbs().maxCoeff());
    return drift;
}

int cmd_run(const CommonOpts& o) {
    Summary summary;
    summary.command = "run";
    const RunConfig cfg = load_config(o, "run", summary);
    set_fft_threads(o.threads);

    fs::create_directories(cfg.out_dir);
    write_manifest(make_manifest(cfg, "run", o), (fs::path(cfg.out_dir) / "manifest.ini").string());

    const auto records = integrate_with_outputs(cfg, cfg.out_dir);
    const MonitorRecord& last = records.back();

    double max_div = 0.0, e_jump = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        max_div = std::max({max_div, records[i].div_u_res, records[i].div_b_res});
        if (i > 0)
            e_jump = std::max(e_jump, records[i].E - records[i - 1].E * (1.0 + 1e-12) - 1e-14);
    }
    const double drift = max_mean_drift(records);

    summary.add("completed", true, "t = " + fmt(last.t) + " reached");
    summary.add("solenoidal", max_div < 1e-10, "max div residual " + fmt(max_div));
    summary.add("mean_b_conserved", drift < 1e-13, "max drift " + fmt(drift));
    summary.add("energy_nonincreasing", e_jump <= 0.0,
                e_jump <= 0.0 ? "" : "worst increase " + fmt(e_jump));

    summary.data["E0"] = records.front().E;
    summary.data["E_final"] = last.E;
    summary.data["records"] = records.size();
    if (cfg.physics.alpha > 0.5 && cfg.physics.a > 0.0) {
        const double r2 = absorbing_ball_radius(cfg.physics, cfg.L);
        double entry = std::numeric_limits<double>::quiet_NaN();
        for (const MonitorRecord& r : records)
            if (r.E <= r2) {
                entry = r.t;
                break;
            }
        summary.data["r_sq"] = r2;
        summary.data["ball_entry_t"] = entry;
    }
    return summary.write_and_exit_code();
}

int cmd_mms(const CommonOpts& o) {
    Summary summary;
    summary.command = "mms";
    const RunConfig cfg = load_config(o, "mms", summary);
    set_fft_threads(o.threads);
    fs::create_directories(cfg.out_dir);
    write_manifest(make_manifest(cfg, "mms", o), (fs::path(cfg.out_dir) / "manifest.ini").string());

    const TrigExpPair pair(cfg.L);
    std::ofstream report(fs::path(cfg.out_dir) / "mms_report.txt");

    // Temporal study at the configured resolution and RK order; step sizes
    // divide the horizon exactly so every run lands on t_end directly.
    const double t_end = cfg.time.t_end;
    const std::vector<double> dts = {t_end / 125, t_end / 250, t_end / 500};
    const Grid g = make_grid(cfg.N, cfg.L);
    const ConvergenceReport temporal =
        temporal_convergence(pair, cfg.physics, g, cfg.time.rk_order, t_end, dts);

    report << "temporal study  N = " << cfg.N << "  rk_order = " << cfg.time.rk_order << "\n";
    double order_sum = 0.0;
    for (std::size_t i = 0; i < temporal.levels.size(); ++i) {
        report << "  dt = " << fmt(temporal.levels[i]) << "  error = " << fmt(temporal.errors[i]);
        if (i > 0) {
            report << "  order = " << fmt(temporal.orders[i - 1]);
            order_sum += temporal.orders[i - 1];
        }
        report << "\n";
    }
    const double order = order_sum / static_cast<double>(temporal.orders.size());
    summary.add("temporal_order",
                std::abs(order - cfg.time.rk_order) <= 0.2,
                "observed " + fmt(order) + " vs nominal " + std::to_string(cfg.time.rk_order));
    summary.data["temporal_orders"] = temporal.orders;
    summary.data["temporal_errors"] = temporal.errors;

    // Spatial study: error against the pair at 8, 16, 32.  The damping power
    // |u|^{2 alpha} u is only smooth for integer alpha, which is what the
    // spectral collapse argument needs.
    if (cfg.physics.alpha == std::floor(cfg.physics.alpha)) {
        const ConvergenceReport spatial = spatial_convergence(
            pair, cfg.physics, cfg.L, {8, 16, 32}, 4, t_end / 2.0, t_end / 500.0);
        report << "spatial study  rk4  dt = " << fmt(t_end / 500.0) << "\n";
        for (std::size_t i = 0; i < spatial.levels.size(); ++i) {
            report << "  N = " << spatial.levels[i] << "  error = " << fmt(spatial.errors[i]);
            if (i > 0) report << "  collapse = " << fmt(spatial.orders[i - 1]) << "x";
            report << "\n";
        }
        bool collapse_ok = true;
        for (double r : spatial.orders) collapse_ok = collapse_ok && r >= 10.0;
        std::string detail;
        for (double r : spatial.orders) detail += (detail.empty() ? "" : ", ") + fmt(r) + "x";
        summary.add("spatial_collapse", collapse_ok, detail + " per doubling");
        summary.data["spatial_errors"] = spatial.errors;
        summary.data["spatial_ratios"] = spatial.orders;
    } else {
        summary.warnings.push_back("spatial study skipped: needs integer alpha, got " +
                                   fmt(cfg.physics.alpha));
        report << "spatial study skipped (alpha not an integer)\n";
    }
    return summary.write_and_exit_code();
}

int cmd_sweep(const CommonOpts& o, std::vector<double> alphas, std::vector<double> as,
              std::vector<double> nus, std::vector<double> kappas) {
    Summary summary;
    summary.command = "sweep";
    const RunConfig base = load_config(o, "sweep", summary);

    if (alphas.empty()) alphas = {base.physics.alpha};
    if (as.empty()) as = {base.physics.a};
    if (nus.empty()) nus = {base.physics.nu};
    if (kappas.empty()) kappas = {base.physics.kappa};

    struct Cell {
        RunConfig cfg;
        fs::path dir;
        int idx = 0;
    };
    std::vector<Cell> cells;
    for (double al : alphas)
        for (double av : as)
            for (double nv : nus)
                for (double kv : kappas) {
                    Cell c;
                    c.cfg = base;
                    c.cfg.physics.alpha = al;
                    c.cfg.physics.a = av;
                    c.cfg.physics.nu = nv;
                    c.cfg.physics.kappa = kv;
                    c.idx = static_cast<int>(cells.size());
                    c.dir = fs::path(base.out_dir) / ("cell_" + std::to_string(c.idx));
                    c.cfg.out_dir = c.dir.string();
                    cells.push_back(std::move(c));
                }

    // Cells run concurrently on their own single FFT thread each; the plan
    // cache and transform execution are thread safe.
    set_fft_threads(1);

    struct CellResult {
        double e_final = 0.0, limsup = 0.0, r_sq = 0.0;
        bool evaluated = false, inside = false;
        std::string error;
    };
    const auto run_cell = [&o](const Cell& c) {
        CellResult res;
        try {
            fs::create_directories(c.dir);
            write_manifest(make_manifest(c.cfg, "sweep", o), (c.dir / "manifest.ini").string());
            const auto records = integrate_with_outputs(c.cfg, c.dir);
            res.e_final = records.back().E;
            const double t0 = records.front().t, t1 = records.back().t;
            for (const MonitorRecord& r : records)
                if (r.t >= t0 + 0.75 * (t1 - t0)) res.limsup = std::max(res.limsup, r.E);
            if (c.cfg.physics.alpha > 0.5 && c.cfg.physics.a > 0.0) {
                res.r_sq = absorbing_ball_radius(c.cfg.physics, c.cfg.L);
                res.evaluated = true;
                res.inside = res.limsup <= res.r_sq;
            } else {
                res.r_sq = std::numeric_limits<double>::quiet_NaN();
            }
        } catch (const std::exception& e) {
            res.error = e.what();
        }
        return res;
    };

    std::vector<CellResult> results(cells.size());
    const std::size_t batch = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < cells.size(); start += batch) {
        std::vector<std::future<CellResult>> fut;
        const std::size_t stop = std::min(cells.size(), start + batch);
        for (std::size_t i = start; i < stop; ++i)
            fut.push_back(std::async(std::launch::async, run_cell, cells[i]));
        for (std::size_t i = start; i < stop; ++i) results[i] = fut[i - start].get();
    }

    fs::create_directories(base.out_dir);
    std::ofstream table(fs::path(base.out_dir) / "summary.csv");
    table << "alpha,a,nu,kappa,E_final,limsup_E,r_sq,inside\n";
    summary.data["cells"] = json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const PhysParams& p = cells[i].cfg.physics;
        const CellResult& r = results[i];
        if (!r.error.empty()) {
            summary.add("cell_" + std::to_string(i), false, r.error);
            continue;
        }
        char row[256];
        std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", p.alpha,
                      p.a, p.nu, p.kappa, r.e_final, r.limsup, r.r_sq, r.inside ? 1 : 0);
        table << row;
        summary.data["cells"].push_back({{"alpha", p.alpha},
                                         {"a", p.a},
                                         {"nu", p.nu},
                                         {"kappa", p.kappa},
                                         {"E_final", r.e_final},
                                         {"limsup_E", r.limsup},
                                         {"r_sq", r.r_sq},
                                         {"inside", r.inside}});
        if (r.evaluated)
            summary.add("cell_" + std::to_string(i) + "_inside_ball", r.inside,
                        "limsup " + fmt(r.limsup) + " vs R^2 " + fmt(r.r_sq));
        else
            summary.add("cell_" + std::to_string(i) + "_completed", true,
                        "no ball radius for alpha <= 1/2 or a = 0");
    }
    return summary.write_and_exit_code();
}

int cmd_dependence(const CommonOpts& o, std::vector<double> deltas) {
    Summary summary;
    summary.command = "dependence";
    RunConfig cfg = load_config(o, "dependence", summary);
    set_fft_threads(o.threads);
    fs::create_directories(cfg.out_dir);

    if (deltas.empty()) deltas = {1e-3, 1e-4, 1e-5};
    if (cfg.time.adaptive) {
        std::cerr << "note: dependence runs use fixed stepping; forcing adaptive = false with dt "
                  << cfg.time.dt_init << "\n";
        cfg.time.adaptive = false;
    }
    write_manifest(make_manifest(cfg, "dependence", o),
                   (fs::path(cfg.out_dir) / "manifest.ini").string());

    const Grid g = make_grid(cfg.N, cfg.L);
    const State ic = make_ic(cfg.ic, g);
    // Fixed derived seed so the perturbation direction never collides with
    // the initial-condition stream.
    const std::uint64_t dir_seed = cfg.ic.seed ^ 0x9E3779B97F4A7C15ull;
    const DependenceReport rep = dependence_experiment(ic, cfg.physics, cfg.time, deltas, dir_seed);

    std::ofstream table(fs::path(cfg.out_dir) / "dependence.csv");
    table << "delta,separation,separation_over_delta_sq\n";
    for (std::size_t i = 0; i < rep.deltas.size(); ++i) {
        char row[128];
        std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g\n", rep.deltas[i], rep.separation[i],
                      rep.s_over_delta_sq[i]);
        table << row;
    }

    bool ratios_ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rep.s_over_delta_sq.size(); ++i) {
        if (i > 0) ratios_ok = ratios_ok && std::abs(rep.s_over_delta_sq[i] /
                                                     rep.s_over_delta_sq[i - 1] - 1.0) <= 0.1;
        detail += (detail.empty() ? "" : ", ") + fmt(rep.s_over_delta_sq[i]);
    }
    summary.add("separation_scales_as_delta_sq", ratios_ok, "S/delta^2 = " + detail);
    summary.add("zero_perturbation_identical", rep.s_at_zero == 0.0,
                "separation " + fmt(rep.s_at_zero));
    summary.data["deltas"] = rep.deltas;
    summary.data["separation"] = rep.separation;
    summary.data["s_over_delta_sq"] = rep.s_over_delta_sq;
    summary.data["hypothesis_met"] = rep.hypothesis_met;
    return summary.write_and_exit_code();
}

int cmd_report(const std::string& dir) {
    Summary summary;
    summary.command = "report";
    summary.out_dir = dir;

    const auto records = read_timeseries((fs::path(dir) / "timeseries.csv").string());
    if (records.empty()) throw mhdbfed::FileFormatError(dir + "/timeseries.csv: no data rows");

    std::ofstream dat(fs::path(dir) / "report.dat");
    dat << "# t E grad_u_sq grad_b_sq u_damp_norm b_crit_norm div_u_res div_b_res mean_u mean_b\n";
    for (const MonitorRecord& r : records) {
        char row[512];
        std::snprintf(row, sizeof row, "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                      r.t, r.E, r.grad_u_sq, r.grad_b_sq, r.u_damp_norm,
                      r.b_crit_norm.value_or(0.0), r.div_u_res, r.div_b_res, r.mean_u.norm(),
                      r.mean_b.norm());
        dat << row;
    }

    double max_div = 0.0, limsup = 0.0;
    const double t0 = records.front().t, t1 = records.back().t;
    for (const MonitorRecord& r : records) {
        max_div = std::max({max_div, r.div_u_res, r.div_b_res});
        if (r.t >= t0 + 0.75 * (t1 - t0)) limsup = std::max(limsup, r.E);
    }
    const double drift = max_mean_drift(records);

    std::ostringstream text;
    text << "records          " << records.size() << "\n"
         << "time range       [" << fmt(t0) << ", " << fmt(t1) << "]\n"
         << "energy           " << fmt(records.front().E) << " -> " << fmt(records.back().E)
         << "\n"
         << "final-quartile max E  " << fmt(limsup) << "\n"
         << "max div residual " << fmt(max_div) << "\n"
         << "mean-b drift     " << fmt(drift) << "\n";
    std::cout << text.str();
    std::ofstream(fs::path(dir) / "report.txt") << text.str();

    summary.add("report_written", true, std::to_string(records.size()) + " records");
    summary.data["E0"] = records.front().E;
    summary.data["E_final"] = records.back().E;
    summary.data["limsup_E"] = limsup;
    summary.data["max_div_residual"] = max_div;
    summary.data["mean_b_drift"] = drift;
    return summary.write_and_exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral solver for incompressible MHD with nonlinear velocity damping"};
    app.require_subcommand(1);

    CommonOpts run_o, mms_o, sweep_o, dep_o;
    std::vector<double> sweep_alphas, sweep_as, sweep_nus, sweep_kappas, dep_deltas;
    std::string report_dir;

    auto* run_cmd = app.add_subcommand("run", "integrate a configured initial-value problem");
    add_common(run_cmd, run_o, true);

    auto* mms_cmd =
        app.add_subcommand("mms", "temporal and spatial convergence against a manufactured pair");
    add_common(mms_cmd, mms_o, true);

    auto* sweep_cmd =
        app.add_subcommand("sweep", "parameter sweep checking the long-time energy ball");
    add_common(sweep_cmd, sweep_o, true);
    sweep_cmd->add_option("--alpha", sweep_alphas, "damping exponents to sweep");
    sweep_cmd->add_option("--a", sweep_as, "damping coefficients to sweep");
    sweep_cmd->add_option("--nu", sweep_nus, "viscosities to sweep");
    sweep_cmd->add_option("--kappa", sweep_kappas, "resistivities to sweep");

    auto* dep_cmd =
        app.add_subcommand("dependence", "continuous dependence of the flow on the initial data");
    add_common(dep_cmd, dep_o, true);
    dep_cmd->add_option("--delta", dep_deltas, "perturbation sizes");

    auto* report_cmd = app.add_subcommand("report", "summarize a finished run's time series");
    report_cmd->add_option("--out", report_dir, "directory holding timeseries.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_o);
        if (mms_cmd->parsed()) return cmd_mms(mms_o);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_o, sweep_alphas, sweep_as, sweep_nus, sweep_kappas);
        if (dep_cmd->parsed()) return cmd_dependence(dep_o, dep_deltas);
        if (report_cmd->parsed()) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
