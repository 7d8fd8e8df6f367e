#include "facnum/facnum.h"

#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "facnum/calibration.hpp"
#include "facnum/panel.hpp"
#include "facnum/phase_transition.hpp"
#include "facnum/simulation.hpp"
#include "facnum/spectral_law.hpp"
#include "facnum/spectrum.hpp"

using nlohmann::json;

struct facnum_panel {
    facnum::Panel panel;
};

struct facnum_spectrum {
    facnum::Spectrum spectrum;
};

namespace {

thread_local std::string last_error;

facnum_status fail(facnum_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
facnum_status guarded(Fn&& fn) {
    try {
        fn();
        last_error.clear();
        return FACNUM_OK;
    } catch (const std::domain_error& e) {
        return fail(FACNUM_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(FACNUM_ERR_CONFIG, e.what());
    } catch (const json::exception& e) {
        return fail(FACNUM_ERR_CONFIG, e.what());
    } catch (const std::runtime_error& e) {
        return fail(FACNUM_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(FACNUM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(FACNUM_ERR_INTERNAL, e.what());
    }
}

facnum_status require(bool ok, const char* what) {
    return ok ? FACNUM_OK : fail(FACNUM_ERR_CONFIG, std::string("null argument: ") + what);
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

json calibration_json(const facnum::CalibrationReport& r) {
    return json{{"p", r.p},
                {"T", r.t_len},
                {"reps", r.reps},
                {"quantile_level", r.quantile_level},
                {"q", r.q},
                {"d_T", r.d_t},
                {"seed", r.seed}};
}

json limit_table_json(const facnum::LimitTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back(json{{"factor", r.index},
                            {"gamma0", r.gamma0},
                            {"gamma1", r.gamma1},
                            {"diverging", r.diverging},
                            {"t1", r.t1},
                            {"lambda", r.lambda},
                            {"significant", r.significant}});
    }
    return json{{"y", table.y},
                {"t_b_plus", table.t_b_plus},
                {"b", table.b},
                {"k0", table.k0},
                {"factors", rows}};
}

json scenario_spec_json(const facnum::ScenarioSpec& spec) {
    return json{{"k", spec.k()},          {"theta", spec.theta}, {"gamma_diag", spec.gamma_diag},
                {"delta", spec.delta},    {"sigma2", spec.sigma2}, {"p", spec.p},
                {"T", spec.t_len}};
}

facnum::ScenarioSpec scenario_from_options(const json& options) {
    const auto p = options.at("p").get<std::int64_t>();
    const auto t_len = options.at("t_len").get<std::int64_t>();
    const std::string name = options.value("scenario", "custom");
    if (name != "custom")
        return facnum::scenario_preset(facnum::scenario_from_name(name), p, t_len);
    const json& c = options.at("custom");
    facnum::ScenarioSpec spec;
    spec.theta = c.at("theta").get<std::vector<double>>();
    spec.gamma_diag = c.at("gamma_diag").get<std::vector<double>>();
    spec.delta = c.at("delta").get<std::vector<double>>();
    spec.sigma2 = c.value("sigma2", 1.0);
    spec.p = p;
    spec.t_len = t_len;
    facnum::validate_scenario(spec);
    return spec;
}

json truncated(const std::vector<double>& v, std::size_t n) {
    json arr = json::array();
    for (std::size_t i = 0; i < v.size() && i < n; ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

extern "C" {

const char* facnum_status_name(facnum_status status) {
    switch (status) {
        case FACNUM_OK: return "ok";
        case FACNUM_ERR_DOMAIN: return "domain_error";
        case FACNUM_ERR_CONFIG: return "config_error";
        case FACNUM_ERR_IO: return "io_error";
        case FACNUM_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* facnum_last_error(void) { return last_error.c_str(); }

void facnum_string_free(char* s) { delete[] s; }

facnum_status facnum_lsd_edges(double y, double* a, double* b) {
    return guarded([&] {
        const auto [ea, eb] = facnum::lsd_edges(facnum::AspectRatio(y));
        if (a) *a = ea;
        if (b) *b = eb;
    });
}

facnum_status facnum_t_at_b_plus(double y, double* t) {
    if (auto s = require(t, "t")) return s;
    return guarded([&] { *t = facnum::t_at_b_plus(facnum::AspectRatio(y)); });
}

facnum_status facnum_z_of_t(double t, double y, double* z) {
    if (auto s = require(z, "z")) return s;
    return guarded([&] { *z = facnum::z_of_t(t, facnum::AspectRatio(y)); });
}

facnum_status facnum_t_transform(double z, double y, double* t) {
    if (auto s = require(t, "t")) return s;
    return guarded([&] { *t = facnum::t_transform(z, facnum::AspectRatio(y)); });
}

facnum_status facnum_stieltjes_m(double z_re, double z_im, double y, double* m_re,
                                 double* m_im) {
    return guarded([&] {
        const auto m = facnum::stieltjes_m(std::complex<double>(z_re, z_im),
                                           facnum::AspectRatio(y));
        if (m_re) *m_re = m.real();
        if (m_im) *m_im = m.imag();
    });
}

facnum_status facnum_lsd_density(double x, double y, double* density) {
    if (auto s = require(density, "density")) return s;
    return guarded([&] { *density = facnum::lsd_density(x, facnum::AspectRatio(y)); });
}

facnum_status facnum_lsd_atom_mass(double y, double* mass) {
    if (auto s = require(mass, "mass")) return s;
    return guarded([&] { *mass = facnum::lsd_atom_mass(facnum::AspectRatio(y)); });
}

facnum_status facnum_spike_limit(double gamma0, double gamma1, double sigma2, double y,
                                 double* t1, int* significant, double* lambda) {
    return guarded([&] {
        const auto r = facnum::spike_limit(facnum::FactorParams(gamma0, gamma1, sigma2),
                                           facnum::AspectRatio(y));
        if (t1) *t1 = r.t1;
        if (significant) *significant = r.significant ? 1 : 0;
        if (lambda) *lambda = r.lambda;
    });
}

facnum_status facnum_is_significant(double gamma0, double gamma1, double sigma2, double y,
                                    int* significant) {
    if (auto s = require(significant, "significant")) return s;
    return guarded([&] {
        *significant = facnum::is_significant_region(facnum::FactorParams(gamma0, gamma1, sigma2),
                                                     facnum::AspectRatio(y))
                           ? 1
                           : 0;
    });
}

facnum_status facnum_region_bounds(double y, double* tau0, double* tau1) {
    return guarded([&] {
        const auto r = facnum::region_bounds(facnum::AspectRatio(y));
        if (tau0) *tau0 = r.tau0;
        if (tau1) *tau1 = r.tau1;
    });
}

facnum_status facnum_detectability_boundary(double y, int n_points,
                                            facnum_boundary_point** points, size_t* n_out) {
    if (auto s = require(points && n_out, "points/n_out")) return s;
    return guarded([&] {
        const auto pts = facnum::detectability_boundary(facnum::AspectRatio(y), n_points);
        auto* out = new facnum_boundary_point[pts.size()];
        for (std::size_t i = 0; i < pts.size(); ++i)
            out[i] = {pts[i].curve_id, pts[i].gamma0_snr, pts[i].gamma1_snr};
        *points = out;
        *n_out = pts.size();
    });
}

void facnum_boundary_free(facnum_boundary_point* points) { delete[] points; }

facnum_status facnum_panel_create(const double* data, int64_t p, int64_t n_obs,
                                  facnum_panel** out) {
    if (auto s = require(data && out, "data/out")) return s;
    return guarded([&] {
        if (p < 1 || n_obs < 1) throw std::domain_error("panel dimensions must be positive");
        Eigen::MatrixXd m(p, n_obs);
        for (int64_t i = 0; i < p; ++i)
            for (int64_t t = 0; t < n_obs; ++t) m(i, t) = data[i * n_obs + t];
        *out = new facnum_panel{facnum::make_panel(std::move(m))};
    });
}

facnum_status facnum_panel_read_csv(const char* path, int transpose, int demean,
                                    facnum_panel** out) {
    if (auto s = require(path && out, "path/out")) return s;
    return guarded([&] {
        *out = new facnum_panel{
            facnum::read_panel_csv(path, transpose != 0, demean != 0)};
    });
}

facnum_status facnum_panel_write_csv(const facnum_panel* panel, const char* path) {
    if (auto s = require(panel && path, "panel/path")) return s;
    return guarded([&] { facnum::write_panel_csv(panel->panel, path); });
}

facnum_status facnum_panel_dims(const facnum_panel* panel, int64_t* p, int64_t* n_obs) {
    if (auto s = require(panel, "panel")) return s;
    if (p) *p = panel->panel.p();
    if (n_obs) *n_obs = panel->panel.n_obs();
    return FACNUM_OK;
}

facnum_status facnum_generate_scenario_panel(const char* scenario, int64_t p, int64_t t_len,
                                             uint64_t seed, facnum_panel** out) {
    if (auto s = require(scenario && out, "scenario/out")) return s;
    return guarded([&] {
        const auto spec =
            facnum::scenario_preset(facnum::scenario_from_name(scenario), p, t_len);
        *out = new facnum_panel{facnum::generate_panel(spec, seed)};
    });
}

void facnum_panel_free(facnum_panel* panel) { delete panel; }

facnum_status facnum_panel_spectrum(const facnum_panel* panel, facnum_spectrum** out) {
    if (auto s = require(panel && out, "panel/out")) return s;
    return guarded([&] { *out = new facnum_spectrum{facnum::mhat_spectrum(panel->panel)}; });
}

facnum_status facnum_spectrum_size(const facnum_spectrum* s, int64_t* n) {
    if (auto st = require(s && n, "spectrum/n")) return st;
    *n = static_cast<int64_t>(s->spectrum.eigenvalues.size());
    return FACNUM_OK;
}

static facnum_status copy_values(const std::vector<double>& v, double* buf, int64_t buf_len,
                                 int64_t* n_written) {
    if (auto s = require(buf, "buf")) return s;
    const auto n = std::min<int64_t>(buf_len, static_cast<int64_t>(v.size()));
    for (int64_t i = 0; i < n; ++i) buf[i] = v[static_cast<std::size_t>(i)];
    if (n_written) *n_written = n;
    return FACNUM_OK;
}

facnum_status facnum_spectrum_eigenvalues(const facnum_spectrum* s, double* buf,
                                          int64_t buf_len, int64_t* n_written) {
    if (auto st = require(s, "spectrum")) return st;
    return copy_values(s->spectrum.eigenvalues, buf, buf_len, n_written);
}

facnum_status facnum_spectrum_ratios(const facnum_spectrum* s, double* buf, int64_t buf_len,
                                     int64_t* n_written) {
    if (auto st = require(s, "spectrum")) return st;
    return copy_values(s->spectrum.ratios, buf, buf_len, n_written);
}

void facnum_spectrum_free(facnum_spectrum* s) { delete s; }

facnum_status facnum_k_hat(const facnum_spectrum* s, double d_t, int64_t search_cap,
                           int require_two, int64_t* k, int* saturated) {
    if (auto st = require(s && k, "spectrum/k")) return st;
    return guarded([&] {
        facnum::EstimatorConfig config{
            d_t, search_cap > 0 ? search_cap : facnum::default_threshold_cap(s->spectrum),
            require_two != 0};
        const auto r = facnum::k_hat(s->spectrum, config);
        *k = r.k;
        if (saturated) *saturated = r.saturated ? 1 : 0;
    });
}

facnum_status facnum_k_tilde(const facnum_spectrum* s, int64_t search_cap, int64_t* k) {
    if (auto st = require(s && k, "spectrum/k")) return st;
    return guarded([&] {
        *k = facnum::k_tilde(s->spectrum, search_cap > 0
                                              ? search_cap
                                              : facnum::default_argmin_cap(s->spectrum));
    });
}

facnum_status facnum_calibrate(int64_t p, int64_t t_len, int64_t reps, double quantile_level,
                               uint64_t seed, int threads, facnum_calibration_report* out) {
    if (auto s = require(out, "out")) return s;
    return guarded([&] {
        const auto r = facnum::calibrate_dT(
            p, t_len, reps > 0 ? reps : facnum::kDefaultCalibrationReps,
            quantile_level > 0 ? quantile_level : facnum::kDefaultQuantileLevel, seed, threads);
        *out = {r.p, r.t_len, r.reps, r.quantile_level, r.q, r.d_t, r.seed};
    });
}

facnum_status facnum_estimate_json(const facnum_panel* panel, const char* options_json,
                                   char** report_json) {
    if (auto s = require(panel && report_json, "panel/report_json")) return s;
    return guarded([&] {
        const json options =
            options_json && *options_json ? json::parse(options_json) : json::object();
        const std::string method = options.value("method", "kstar");
        const auto seed = options.value("seed", std::uint64_t{0});
        const int threads = options.value("threads", 0);
        const auto& pan = panel->panel;

        json report;
        report["p"] = pan.p();
        report["T"] = pan.t_len();
        report["method"] = method;

        const facnum::Spectrum spectrum = facnum::mhat_spectrum(pan);
        report["eigenvalues"] = truncated(spectrum.eigenvalues, 30);
        report["ratios"] = truncated(spectrum.ratios, 30);
        report["saturated"] = false;

        if (method == "kstar" || method == "khat") {
            double d_t = 0.0;
            if (options.value("calibrate", false)) {
                if (options.contains("d_t"))
                    throw std::invalid_argument("estimate: pass either d_t or calibrate, not both");
                const auto r = facnum::calibrate_dT(
                    pan.p(), pan.t_len(),
                    options.value("calibrate_reps", facnum::kDefaultCalibrationReps),
                    options.value("quantile_level", facnum::kDefaultQuantileLevel), seed, threads);
                d_t = r.d_t;
                report["calibration"] = calibration_json(r);
            } else if (options.contains("d_t")) {
                d_t = options.at("d_t").get<double>();
            } else {
                throw std::invalid_argument(
                    "estimate: threshold methods need d_t or calibrate=true");
            }
            facnum::EstimatorConfig config{
                d_t,
                options.value("search_cap", facnum::default_threshold_cap(spectrum)),
                method == "kstar"};
            const auto r = facnum::k_hat(spectrum, config);
            report["d_T"] = d_t;
            report["k"] = r.k;
            report["saturated"] = r.saturated;
        } else if (method == "ktilde") {
            const auto cap = options.value("search_cap", facnum::default_argmin_cap(spectrum));
            report["k"] = facnum::k_tilde(spectrum, cap);
        } else if (method == "multistep") {
            const auto cap = options.value("search_cap", facnum::default_argmin_cap(spectrum));
            const int max_steps = options.value("max_steps", 3);
            const auto trace = facnum::k_tilde_multistep(pan, max_steps, cap);
            json steps = json::array();
            for (const auto& s : trace)
                steps.push_back(
                    json{{"step", s.step}, {"r", s.r}, {"cumulative", s.cumulative}});
            report["multistep_trace"] = steps;
            report["k"] = trace.back().cumulative;
        } else {
            throw std::invalid_argument("estimate: unknown method " + method);
        }
        *report_json = dup_string(report.dump(2));
    });
}

facnum_status facnum_simulate_json(const char* options_json, char** report_json) {
    if (auto s = require(options_json && report_json, "options/report_json")) return s;
    return guarded([&] {
        const json options = json::parse(options_json);
        const auto spec = scenario_from_options(options);
        const std::string label = options.value("scenario", "custom");
        const auto method = facnum::mc_method_from_name(options.value("method", "kstar"));
        const auto reps = options.value("reps", std::int64_t{1000});
        const auto seed = options.value("seed", std::uint64_t{0});
        const int threads = options.value("threads", 0);

        const auto result = facnum::run_mc(spec, reps, method, seed, threads, label);

        json hist = json::object();
        for (const auto& [est, count] : result.histogram)
            hist[std::to_string(est)] = count;
        json report{{"scenario", result.scenario_label},
                    {"spec", scenario_spec_json(result.spec)},
                    {"method", facnum::mc_method_name(result.method)},
                    {"reps", result.reps},
                    {"k0", result.k0},
                    {"seed", result.seed},
                    {"histogram", hist},
                    {"decision_frequency", result.decision_frequency}};
        if (result.calibration.reps > 0) {
            report["d_T"] = result.d_t;
            report["calibration"] = calibration_json(result.calibration);
        }
        *report_json = dup_string(report.dump(2));
    });
}

facnum_status facnum_limits_json(const char* options_json, char** report_json) {
    if (auto s = require(options_json && report_json, "options/report_json")) return s;
    return guarded([&] {
        const json options = json::parse(options_json);
        const auto spec = scenario_from_options(options);
        json report = limit_table_json(facnum::theoretical_limits(spec));
        report["scenario"] = options.value("scenario", "custom");
        report["spec"] = scenario_spec_json(spec);
        *report_json = dup_string(report.dump(2));
    });
}

}  // extern "C"
