#include "facnum/simulation.hpp"

#include <Eigen/QR>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <tuple>

#include "facnum/parallel.hpp"
#include "facnum/rng.hpp"
#include "facnum/spectrum.hpp"

namespace facnum {

namespace {

constexpr std::uint64_t kCalibrationStream = 0x4000000000000000ULL;

ScenarioSpec base_spec(std::vector<double> theta, std::vector<double> gamma,
                       std::vector<double> delta, std::int64_t p, std::int64_t t_len) {
    ScenarioSpec spec;
    spec.theta = std::move(theta);
    spec.gamma_diag = std::move(gamma);
    spec.delta = std::move(delta);
    spec.p = p;
    spec.t_len = t_len;
    return spec;
}

double effective_innovation_var(const ScenarioSpec& spec, std::size_t i) {
    return spec.gamma_diag[i] *
           std::pow(static_cast<double>(spec.p), (1.0 - spec.delta[i]) / 2.0);
}

}  // namespace

Scenario scenario_from_name(const std::string& name) {
    if (name == "I") return Scenario::I;
    if (name == "II") return Scenario::II;
    if (name == "III") return Scenario::III;
    if (name == "IV") return Scenario::IV;
    throw std::invalid_argument("unknown scenario: " + name + " (expected I, II, III or IV)");
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::I: return "I";
        case Scenario::II: return "II";
        case Scenario::III: return "III";
        case Scenario::IV: return "IV";
    }
    return "?";
}

McMethod mc_method_from_name(const std::string& name) {
    if (name == "kstar") return McMethod::KStar;
    if (name == "khat") return McMethod::KHat;
    if (name == "ktilde") return McMethod::KTilde;
    if (name == "ktilde3") return McMethod::KTilde3;
    throw std::invalid_argument("unknown method: " + name +
                                " (expected kstar, khat, ktilde or ktilde3)");
}

std::string mc_method_name(McMethod m) {
    switch (m) {
        case McMethod::KStar: return "kstar";
        case McMethod::KHat: return "khat";
        case McMethod::KTilde: return "ktilde";
        case McMethod::KTilde3: return "ktilde3";
    }
    return "?";
}

std::pair<double, double> stationary_factor_moments(double theta, double innovation_var) {
    if (!(std::abs(theta) < 1.0))
        throw std::domain_error("stationary_factor_moments: |theta| < 1 required");
    if (!(innovation_var > 0.0))
        throw std::domain_error("stationary_factor_moments: innovation variance must be positive");
    const double gamma0 = innovation_var / (1.0 - theta * theta);
    return {gamma0, theta * gamma0};
}

ScenarioSpec scenario_preset(Scenario s, std::int64_t p, std::int64_t t_len) {
    switch (s) {
        case Scenario::I:
            return base_spec({0.6, 0.5}, {4, 4}, {0.5, 0.8}, p, t_len);
        case Scenario::II:
            return base_spec({0.6, -0.5, 0.3, 0.2}, {4, 4, 4, 1}, {1, 1, 1, 1}, p, t_len);
        case Scenario::III:
            return base_spec({0.6, -0.5, 0.3}, {2, 2, 2}, {1, 1, 1}, p, t_len);
        case Scenario::IV:
            return base_spec({0.6, 0.5, 0.6, -0.5, 0.3, 0.6, -0.5}, {4, 4, 4, 4, 4, 2, 2},
                             {0.5, 0.8, 1, 1, 1, 1, 1}, p, t_len);
    }
    throw std::invalid_argument("scenario_preset: bad scenario");
}

void validate_scenario(const ScenarioSpec& spec) {
    const std::size_t k = spec.theta.size();
    if (spec.gamma_diag.size() != k || spec.delta.size() != k)
        throw std::invalid_argument("ScenarioSpec: theta/gamma_diag/delta lengths differ");
    for (double th : spec.theta)
        if (!(std::abs(th) < 1.0))
            throw std::domain_error("ScenarioSpec: AR coefficients must lie in (-1,1)");
    for (double g : spec.gamma_diag)
        if (!(g > 0.0)) throw std::domain_error("ScenarioSpec: innovation variances must be positive");
    for (double d : spec.delta)
        if (!(d >= 0.0 && d <= 1.0))
            throw std::domain_error("ScenarioSpec: strength exponents must lie in [0,1]");
    if (!(spec.sigma2 > 0.0)) throw std::domain_error("ScenarioSpec: sigma2 must be positive");
    if (spec.p < 1 || spec.t_len < 2)
        throw std::domain_error("ScenarioSpec: need p >= 1 and T >= 2");
    if (spec.k() > spec.p)
        throw std::domain_error("ScenarioSpec: more factors than cross-section units");
}

Panel generate_panel(const ScenarioSpec& spec, std::uint64_t seed, bool haar_loading) {
    validate_scenario(spec);
    const auto k = static_cast<std::size_t>(spec.k());
    const Eigen::Index p = spec.p;
    const Eigen::Index n_obs = spec.t_len + 1;

    auto rng = std::mt19937_64(seed);
    std::normal_distribution<double> gauss;

    // Factor paths: exact stationary start, then the AR(1) recursion.
    std::vector<double> innovation_sd(k), state(k);
    Eigen::MatrixXd factors(static_cast<Eigen::Index>(k), n_obs);
    for (std::size_t i = 0; i < k; ++i) {
        const double var = effective_innovation_var(spec, i);
        innovation_sd[i] = std::sqrt(var);
        const double gamma0 = stationary_factor_moments(spec.theta[i], var).first;
        state[i] = gauss(rng) * std::sqrt(gamma0);
    }
    for (Eigen::Index t = 0; t < n_obs; ++t)
        for (std::size_t i = 0; i < k; ++i) {
            state[i] = spec.theta[i] * state[i] + gauss(rng) * innovation_sd[i];
            factors(static_cast<Eigen::Index>(i), t) = state[i];
        }

    // Idiosyncratic noise, column by column.
    Eigen::MatrixXd data(p, n_obs);
    const double noise_sd = std::sqrt(spec.sigma2);
    for (Eigen::Index t = 0; t < n_obs; ++t)
        for (Eigen::Index i = 0; i < p; ++i) data(i, t) = gauss(rng) * noise_sd;

    if (k == 0) return make_panel(std::move(data));
    if (!haar_loading) {
        // Canonical loading [I_k; 0].
        data.topRows(static_cast<Eigen::Index>(k)) += factors;
    } else {
        Eigen::MatrixXd g(p, static_cast<Eigen::Index>(k));
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            for (Eigen::Index i = 0; i < p; ++i) g(i, j) = gauss(rng);
        const Eigen::MatrixXd q =
            Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
            Eigen::MatrixXd::Identity(p, static_cast<Eigen::Index>(k));
        data += q * factors;
    }
    return make_panel(std::move(data));
}

LimitTable theoretical_limits(const ScenarioSpec& spec) {
    validate_scenario(spec);
    const AspectRatio y(static_cast<double>(spec.p) / static_cast<double>(spec.t_len));
    LimitTable table;
    table.y = y.y;
    table.t_b_plus = t_at_b_plus(y);
    table.b = lsd_edges(y).second;
    for (std::size_t i = 0; i < spec.theta.size(); ++i) {
        FactorLimit row;
        row.index = static_cast<int>(i) + 1;
        row.diverging = spec.delta[i] < 1.0;
        const double var = effective_innovation_var(spec, i);
        std::tie(row.gamma0, row.gamma1) = stationary_factor_moments(spec.theta[i], var);
        const TransitionResult res =
            spike_limit(FactorParams(row.gamma0, row.gamma1, spec.sigma2), y);
        row.t1 = res.t1;
        row.lambda = res.lambda;
        // Growing strength always ends up significant in the limit.
        row.significant = row.diverging || res.significant;
        if (row.significant) ++table.k0;
        table.rows.push_back(row);
    }
    return table;
}

namespace {

struct CalibrationKey {
    std::int64_t p, t_len, reps;
    double level;
    std::uint64_t seed;
    bool operator<(const CalibrationKey& o) const {
        return std::tie(p, t_len, reps, level, seed) <
               std::tie(o.p, o.t_len, o.reps, o.level, o.seed);
    }
};

CalibrationReport cached_calibration(std::int64_t p, std::int64_t t_len, std::uint64_t seed,
                                     int threads) {
    static std::map<CalibrationKey, CalibrationReport> cache;
    static std::mutex mutex;
    const CalibrationKey key{p, t_len, kDefaultCalibrationReps, kDefaultQuantileLevel, seed};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    CalibrationReport report = calibrate_dT(p, t_len, kDefaultCalibrationReps,
                                            kDefaultQuantileLevel, seed, threads);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, report);
    return report;
}

std::map<std::string, double> group_decisions(const std::string& label, std::int64_t k0,
                                              const std::map<std::int64_t, std::int64_t>& hist,
                                              std::int64_t reps) {
    std::map<std::string, double> out;
    auto tally = [&](const std::string& name, auto pred) {
        std::int64_t c = 0;
        for (const auto& [est, n] : hist)
            if (pred(est)) c += n;
        out[name] = static_cast<double>(c) / static_cast<double>(reps);
    };
    if (label == "I") {
        tally("=1", [](std::int64_t e) { return e == 1; });
        tally("=k0", [&](std::int64_t e) { return e == k0; });
        tally(">=3", [](std::int64_t e) { return e >= 3; });
        tally("other", [&](std::int64_t e) { return e != 1 && e != k0 && e < 3; });
    } else if (label == "II") {
        tally("=1", [](std::int64_t e) { return e == 1; });
        tally("=2", [](std::int64_t e) { return e == 2; });
        tally("=k0", [&](std::int64_t e) { return e == k0; });
        tally("=4", [](std::int64_t e) { return e == 4; });
        tally(">=5", [](std::int64_t e) { return e >= 5; });
        tally("other", [](std::int64_t e) { return e <= 0; });
    } else if (label == "III") {
        tally("<2", [](std::int64_t e) { return e < 2; });
        tally("=2", [](std::int64_t e) { return e == 2; });
        tally("=k0", [&](std::int64_t e) { return e == k0; });
        tally(">=4", [](std::int64_t e) { return e >= 4; });
    } else if (label == "IV") {
        for (std::int64_t v = 1; v <= 6; ++v)
            tally("=" + std::to_string(v), [v](std::int64_t e) { return e == v; });
        tally("=k0", [&](std::int64_t e) { return e == k0; });
        tally(">=8", [](std::int64_t e) { return e >= 8; });
        tally("other", [](std::int64_t e) { return e <= 0; });
    } else {
        tally("<k0-1", [&](std::int64_t e) { return e < k0 - 1; });
        tally("=k0-1", [&](std::int64_t e) { return e == k0 - 1; });
        tally("=k0", [&](std::int64_t e) { return e == k0; });
        tally("=k0+1", [&](std::int64_t e) { return e == k0 + 1; });
        tally(">k0+1", [&](std::int64_t e) { return e > k0 + 1; });
    }
    return out;
}

}  // namespace

MCResult run_mc(const ScenarioSpec& spec, std::int64_t reps, McMethod method,
                std::uint64_t seed, int threads, const std::string& label) {
    validate_scenario(spec);
    if (reps < 1) throw std::invalid_argument("run_mc: reps >= 1 required");

    MCResult result;
    result.spec = spec;
    result.scenario_label = label;
    result.method = method;
    result.reps = reps;
    result.seed = seed;
    result.k0 = theoretical_limits(spec).k0;

    const bool needs_threshold = method == McMethod::KStar || method == McMethod::KHat;
    if (needs_threshold) {
        result.calibration =
            cached_calibration(spec.p, spec.t_len, stream_seed(seed, kCalibrationStream), threads);
        result.d_t = result.calibration.d_t;
    }

    std::vector<std::int64_t> estimates(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        const Panel panel = generate_panel(spec, stream_seed(seed, rep));
        switch (method) {
            case McMethod::KStar:
            case McMethod::KHat: {
                const Spectrum spectrum = mhat_spectrum(panel);
                EstimatorConfig config{result.d_t, default_threshold_cap(spectrum),
                                       method == McMethod::KStar};
                estimates[rep] = k_hat(spectrum, config).k;
                break;
            }
            case McMethod::KTilde: {
                const Spectrum spectrum = mhat_spectrum(panel);
                estimates[rep] = k_tilde(spectrum, default_argmin_cap(spectrum));
                break;
            }
            case McMethod::KTilde3: {
                const Spectrum spectrum = mhat_spectrum(panel);
                const auto trace =
                    k_tilde_multistep(panel, 3, default_argmin_cap(spectrum));
                estimates[rep] = trace.back().cumulative;
                break;
            }
        }
    });

    for (std::int64_t est : estimates) ++result.histogram[est];
    result.decision_frequency = group_decisions(label, result.k0, result.histogram, reps);
    return result;
}

}  // namespace facnum
