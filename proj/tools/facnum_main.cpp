// facnum — command-line front end over the facnum shared library.
//
// Subcommands: estimate, calibrate, transition, region, limits, simulate.
// All randomness flows from --seed; --threads (or FACNUM_THREADS) bounds
// worker threads for Monte-Carlo loops. Reports embed the resolved run
// configuration under "config".

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "facnum/facnum.h"

using nlohmann::json;

namespace {

int fail_with(facnum_status status) {
    std::cerr << "error (" << facnum_status_name(status) << "): " << facnum_last_error()
              << "\n";
    return status == FACNUM_ERR_CONFIG ? 2 : 1;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct StringGuard {
    char* s = nullptr;
    ~StringGuard() { facnum_string_free(s); }
};

struct PanelGuard {
    facnum_panel* p = nullptr;
    ~PanelGuard() { facnum_panel_free(p); }
};

struct CommonOpts {
    std::uint64_t seed = 0;
    int threads = 0;
    std::string output;
    std::string log_level = "info";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "master RNG seed (default 0)");
    cmd->add_option("--threads", opts.threads,
                    "worker threads (default: FACNUM_THREADS or hardware)");
    cmd->add_option("-o,--output", opts.output, "output path ('-' for stdout)");
    cmd->add_option("--log-level", opts.log_level, "quiet|info")
        ->check(CLI::IsMember({"quiet", "info"}));
}

void note(const CommonOpts& opts, const std::string& message) {
    if (opts.log_level != "quiet") std::cerr << message << "\n";
}

json config_json(const std::string& subcommand, const CommonOpts& opts, json extra) {
    extra["subcommand"] = subcommand;
    extra["seed"] = opts.seed;
    extra["threads"] = opts.threads;
    extra["output"] = opts.output.empty() ? "-" : opts.output;
    extra["log_level"] = opts.log_level;
    return extra;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"factor-count estimation from lag-1 autocovariance singular values"};
    app.require_subcommand(1);

    // --- estimate ---
    auto* estimate = app.add_subcommand("estimate", "estimate the number of factors in a panel");
    CommonOpts est_opts;
    std::string est_input, est_method = "kstar";
    double est_dt = -1.0, est_level = 0.005;
    bool est_calibrate = false, est_transpose = false;
    bool est_demean = true;
    std::int64_t est_cap = 0, est_creps = 2000;
    int est_steps = 3;
    estimate->add_option("-i,--input", est_input, "panel CSV (rows = time points)")
        ->required();
    estimate->add_option("--method", est_method, "khat|kstar|ktilde|multistep")
        ->check(CLI::IsMember({"khat", "kstar", "ktilde", "multistep"}));
    estimate->add_option("--d-t", est_dt, "ratio threshold d_T in (0,1)");
    estimate->add_flag("--calibrate", est_calibrate, "calibrate d_T at the panel's (p,T)");
    estimate->add_flag("--demean,!--no-demean", est_demean,
                       "subtract per-series means (default on)");
    estimate->add_flag("--transpose", est_transpose, "input stores one series per row");
    estimate->add_option("--cap", est_cap, "largest ratio index scanned");
    estimate->add_option("--calibrate-reps", est_creps, "calibration replications");
    estimate->add_option("--level", est_level, "calibration quantile level");
    estimate->add_option("--max-steps", est_steps, "multistep iteration count");
    add_common(estimate, est_opts);

    // --- calibrate ---
    auto* calibrate = app.add_subcommand("calibrate", "simulate the d_T threshold for (p,T)");
    CommonOpts cal_opts;
    std::int64_t cal_p = 0, cal_t = 0, cal_reps = 2000;
    double cal_level = 0.005;
    calibrate->add_option("--p", cal_p, "cross-section dimension")->required();
    calibrate->add_option("--t", cal_t, "sample size T")->required();
    calibrate->add_option("--reps", cal_reps, "replications (default 2000)");
    calibrate->add_option("--level", cal_level, "lower quantile level (default 0.005)");
    add_common(calibrate, cal_opts);

    // --- transition ---
    auto* transition =
        app.add_subcommand("transition", "phase-transition diagnostic for one factor");
    CommonOpts tr_opts;
    double tr_g0 = 0, tr_g1 = 0, tr_s2 = 1.0, tr_y = 0;
    transition->add_option("--gamma0", tr_g0, "factor variance")->required();
    transition->add_option("--gamma1", tr_g1, "factor lag-1 autocovariance")->required();
    transition->add_option("--sigma2", tr_s2, "noise variance (default 1)");
    transition->add_option("--y", tr_y, "aspect ratio p/T")->required();
    add_common(transition, tr_opts);

    // --- region ---
    auto* region = app.add_subcommand("region", "detectability boundary curves as CSV");
    CommonOpts rg_opts;
    double rg_y = 0;
    int rg_n = 200;
    region->add_option("--y", rg_y, "aspect ratio p/T")->required();
    region->add_option("--n-points", rg_n, "points per curve (default 200)");
    add_common(region, rg_opts);

    // --- limits ---
    auto* limits = app.add_subcommand(
        "limits", "spectral law constants; with --scenario, the theoretical limit table");
    CommonOpts lm_opts;
    double lm_y = 0;
    std::string lm_scenario;
    std::int64_t lm_p = 0;
    double lm_tmult = 2.0;
    limits->add_option("--y", lm_y, "aspect ratio p/T");
    limits->add_option("--scenario", lm_scenario, "preset I|II|III|IV")
        ->check(CLI::IsMember({"I", "II", "III", "IV"}));
    limits->add_option("--p", lm_p, "dimension for the scenario table");
    limits->add_option("--t-mult", lm_tmult, "T = t-mult * p (default 2)");
    add_common(limits, lm_opts);

    // --- simulate ---
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo frequency study");
    CommonOpts sm_opts;
    std::string sm_scenario, sm_method = "kstar";
    std::int64_t sm_p = 0, sm_reps = 1000;
    double sm_tmult = 2.0;
    simulate->add_option("--scenario", sm_scenario, "preset I|II|III|IV")
        ->required()
        ->check(CLI::IsMember({"I", "II", "III", "IV"}));
    simulate->add_option("--p", sm_p, "cross-section dimension")->required();
    simulate->add_option("--t-mult", sm_tmult, "T = t-mult * p (paper uses 0.5 and 2)");
    simulate->add_option("--reps", sm_reps, "replications (default 1000)");
    simulate->add_option("--method", sm_method, "kstar|khat|ktilde|ktilde3")
        ->check(CLI::IsMember({"kstar", "khat", "ktilde", "ktilde3"}));
    add_common(simulate, sm_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (estimate->parsed()) {
            if (est_dt > 0 && est_calibrate) {
                std::cerr << "error: pass either --d-t or --calibrate, not both\n";
                return 2;
            }
            PanelGuard panel;
            if (auto s = facnum_panel_read_csv(est_input.c_str(), est_transpose, est_demean,
                                               &panel.p))
                return fail_with(s);
            json options{{"method", est_method},
                         {"seed", est_opts.seed},
                         {"threads", est_opts.threads},
                         {"max_steps", est_steps},
                         {"calibrate_reps", est_creps},
                         {"quantile_level", est_level}};
            if (est_dt > 0) options["d_t"] = est_dt;
            if (est_calibrate) {
                options["calibrate"] = true;
                note(est_opts, "calibrating d_T (" + std::to_string(est_creps) + " reps)...");
            }
            if (est_cap > 0) options["search_cap"] = est_cap;
            StringGuard out;
            if (auto s = facnum_estimate_json(panel.p, options.dump().c_str(), &out.s))
                return fail_with(s);
            json report = json::parse(out.s);
            report["config"] = config_json("estimate", est_opts,
                                           {{"input", est_input},
                                            {"method", est_method},
                                            {"demean", est_demean},
                                            {"transpose", est_transpose},
                                            {"options", options}});
            write_text(est_opts.output, report.dump(2));
        } else if (calibrate->parsed()) {
            facnum_calibration_report r{};
            note(cal_opts, "calibrating d_T (" + std::to_string(cal_reps) + " reps)...");
            if (auto s = facnum_calibrate(cal_p, cal_t, cal_reps, cal_level, cal_opts.seed,
                                          cal_opts.threads, &r))
                return fail_with(s);
            json report{{"p", r.p},
                        {"T", r.t_len},
                        {"reps", r.reps},
                        {"quantile_level", r.quantile_level},
                        {"q", r.q},
                        {"d_T", r.d_t},
                        {"seed", r.seed}};
            report["config"] = config_json("calibrate", cal_opts,
                                           {{"p", cal_p}, {"t", cal_t}, {"reps", cal_reps},
                                            {"level", cal_level}});
            write_text(cal_opts.output, report.dump(2));
        } else if (transition->parsed()) {
            double t1 = 0, lambda = 0, tau0 = 0, tau1 = 0;
            int significant = 0;
            if (auto s = facnum_spike_limit(tr_g0, tr_g1, tr_s2, tr_y, &t1, &significant,
                                            &lambda))
                return fail_with(s);
            if (auto s = facnum_region_bounds(tr_y, &tau0, &tau1)) return fail_with(s);
            double a = 0, b = 0, tb = 0;
            facnum_lsd_edges(tr_y, &a, &b);
            facnum_t_at_b_plus(tr_y, &tb);
            json report{{"transition",
                         {{"t1", t1},
                          {"significant", significant != 0},
                          {"lambda", lambda},
                          {"lambda_raw", lambda * tr_s2 * tr_s2},
                          {"b", b},
                          {"t_b_plus", tb}}},
                        {"region_bounds", {{"tau0", tau0}, {"tau1", tau1}}}};
            report["config"] = config_json("transition", tr_opts,
                                           {{"gamma0", tr_g0},
                                            {"gamma1", tr_g1},
                                            {"sigma2", tr_s2},
                                            {"y", tr_y}});
            write_text(tr_opts.output, report.dump(2));
        } else if (region->parsed()) {
            facnum_boundary_point* pts = nullptr;
            size_t n = 0;
            if (auto s = facnum_detectability_boundary(rg_y, rg_n, &pts, &n))
                return fail_with(s);
            std::string csv = "curve_id,gamma0_snr,gamma1_snr\n";
            char line[96];
            for (size_t i = 0; i < n; ++i) {
                std::snprintf(line, sizeof line, "%d,%.12g,%.12g\n", pts[i].curve_id,
                              pts[i].gamma0_snr, pts[i].gamma1_snr);
                csv += line;
            }
            facnum_boundary_free(pts);
            csv.pop_back();
            write_text(rg_opts.output, csv);
        } else if (limits->parsed()) {
            if (!lm_scenario.empty()) {
                if (lm_p <= 0) {
                    std::cerr << "error: --scenario needs --p\n";
                    return 2;
                }
                json options{{"scenario", lm_scenario},
                             {"p", lm_p},
                             {"t_len", static_cast<std::int64_t>(lm_tmult * lm_p)}};
                StringGuard out;
                if (auto s = facnum_limits_json(options.dump().c_str(), &out.s))
                    return fail_with(s);
                json report = json::parse(out.s);
                report["config"] = config_json("limits", lm_opts,
                                               {{"scenario", lm_scenario},
                                                {"p", lm_p},
                                                {"t_mult", lm_tmult}});
                write_text(lm_opts.output, report.dump(2));
            } else {
                if (limits->count("--y") == 0) {
                    std::cerr << "error: pass --y or --scenario\n";
                    return 2;
                }
                double a = 0, b = 0, tb = 0;
                if (auto s = facnum_lsd_edges(lm_y, &a, &b)) return fail_with(s);
                if (auto s = facnum_t_at_b_plus(lm_y, &tb)) return fail_with(s);
                json report{{"a", a}, {"b", b}, {"t_b_plus", tb}};
                report["config"] = config_json("limits", lm_opts, {{"y", lm_y}});
                write_text(lm_opts.output, report.dump(2));
            }
        } else if (simulate->parsed()) {
            json options{{"scenario", sm_scenario},
                         {"p", sm_p},
                         {"t_len", static_cast<std::int64_t>(sm_tmult * sm_p)},
                         {"reps", sm_reps},
                         {"method", sm_method},
                         {"seed", sm_opts.seed},
                         {"threads", sm_opts.threads}};
            note(sm_opts, "running " + std::to_string(sm_reps) + " replications of scenario " +
                              sm_scenario + "...");
            StringGuard out;
            if (auto s = facnum_simulate_json(options.dump().c_str(), &out.s))
                return fail_with(s);
            json report = json::parse(out.s);
            report["config"] = config_json("simulate", sm_opts, {{"options", options}});
            const bool csv = sm_opts.output.size() > 4 &&
                             sm_opts.output.substr(sm_opts.output.size() - 4) == ".csv";
            if (csv) {
                std::string text = "section,key,value\n";
                for (auto& [label, freq] : report["decision_frequency"].items())
                    text += "decision," + label + "," + json(freq).dump() + "\n";
                for (auto& [est, count] : report["histogram"].items())
                    text += "histogram," + est + "," + json(count).dump() + "\n";
                text.pop_back();
                write_text(sm_opts.output, text);
            } else {
                write_text(sm_opts.output, report.dump(2));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
