#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "facnum/calibration.hpp"
#include "facnum/panel.hpp"
#include "facnum/phase_transition.hpp"

namespace facnum {

// Synthetic design: y_t = A x_t + eps_t with A = [I_k; 0], eps_t white
// Gaussian of variance sigma2, and independent AR(1) factor components
// x_{i,t} = theta_i x_{i,t-1} + e_{i,t}. The innovation variance of factor i
// is gamma_diag_i * p^{(1-delta_i)/2}: delta = 1 keeps a constant strength,
// delta < 1 makes it grow with the dimension.
struct ScenarioSpec {
    std::vector<double> theta;       // AR(1) coefficients, each in (-1, 1)
    std::vector<double> gamma_diag;  // innovation variances before scaling
    std::vector<double> delta;       // strength exponents in [0, 1]
    double sigma2 = 1.0;
    std::int64_t p = 0;
    std::int64_t t_len = 0;

    std::int64_t k() const { return static_cast<std::int64_t>(theta.size()); }
};

enum class Scenario { I, II, III, IV };
Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

enum class McMethod { KStar, KHat, KTilde, KTilde3 };
McMethod mc_method_from_name(const std::string& name);
std::string mc_method_name(McMethod m);

// One row of the theoretical-limit table.
struct FactorLimit {
    int index = 0;        // 1-based factor index in the scenario
    double gamma0 = 0.0;  // stationary moments at the scenario's dimension p
    double gamma1 = 0.0;
    bool diverging = false;  // delta < 1: strength grows with p
    double t1 = 0.0;         // transition root (constant-strength factors)
    double lambda = 0.0;     // limit of l/sigma^4, b when insignificant
    bool significant = false;
};

struct LimitTable {
    double y = 0.0;
    double t_b_plus = 0.0;
    double b = 0.0;
    std::int64_t k0 = 0;  // number of significant factors
    std::vector<FactorLimit> rows;
};

struct MCResult {
    ScenarioSpec spec;
    std::string scenario_label;  // preset name or "custom"
    McMethod method = McMethod::KStar;
    std::int64_t reps = 0;
    std::int64_t k0 = 0;
    std::uint64_t seed = 0;
    double d_t = 0.0;  // 0 when the method needs no threshold
    CalibrationReport calibration;  // reps == 0 when unused
    std::map<std::int64_t, std::int64_t> histogram;   // estimate -> count
    std::map<std::string, double> decision_frequency; // table-layout grouping
};

// Stationary AR(1) moments: gamma0 = var/(1 - theta^2), gamma1 = theta*gamma0.
std::pair<double, double> stationary_factor_moments(double theta, double innovation_var);

// The four preset designs.
ScenarioSpec scenario_preset(Scenario s, std::int64_t p, std::int64_t t_len);

// Validates a spec (stationarity, positivity, dimensions).
void validate_scenario(const ScenarioSpec& spec);

// Draws a panel: factor paths start from their exact stationary law, then
// the recursion runs T+1 steps; one RNG stream per (seed, panel). An
// optional Haar-random orthonormal loading replaces [I_k; 0] spectrum-
// equivalently (used by invariance tests).
Panel generate_panel(const ScenarioSpec& spec, std::uint64_t seed, bool haar_loading = false);

// Per-factor transition quantities at y = p/T. Growing factors (delta < 1)
// are flagged diverging and counted significant.
LimitTable theoretical_limits(const ScenarioSpec& spec);

// Monte-Carlo frequency study. Threshold methods calibrate d_T once per
// (p, T, seed) via an internal cache; every replication derives its own RNG
// stream, so results are reproducible for a fixed seed regardless of the
// thread count.
MCResult run_mc(const ScenarioSpec& spec, std::int64_t reps, McMethod method,
                std::uint64_t seed, int threads = 0, const std::string& label = "custom");

}  // namespace facnum
