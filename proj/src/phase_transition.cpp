#include "facnum/phase_transition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace facnum {

FactorParams::FactorParams(double g0, double g1, double s2)
    : gamma0(g0), gamma1(g1), sigma2(s2) {
    if (!(g0 > 0.0)) throw std::domain_error("FactorParams: gamma0 must be positive");
    if (!(s2 > 0.0)) throw std::domain_error("FactorParams: sigma2 must be positive");
    if (std::abs(g1) > g0 * (1.0 + 1e-12))
        throw std::domain_error("FactorParams: |gamma1| <= gamma0 required (Cauchy-Schwarz)");
}

double t1_of(const FactorParams& params, AspectRatio y) {
    // Scale-invariant in (gamma0, gamma1, sigma2); work in SNR units.
    const double g0 = params.gamma0 / params.sigma2;
    const double g1 = params.gamma1 / params.sigma2;
    const double quad = g0 * g0 - g1 * g1;
    const double lin = g1 * g1 + 2.0 * y.y * g0;
    const double cst = y.y * y.y;
    if (quad == 0.0) return cst / lin;  // |gamma1| = gamma0: linear limit
    const double disc = lin * lin - 4.0 * quad * cst;
    // disc = (g1^2 + 2y g0)^2 - 4 y^2 (g0^2 - g1^2) >= g1^2 (g1 + ...) > 0
    // for admissible parameters; clamp tiny negatives from rounding.
    const double root = std::sqrt(std::max(disc, 0.0));
    // Smaller root, in the numerically stable form 2c / (b + sqrt(disc)).
    return 2.0 * cst / (lin + root);
}

TransitionResult spike_limit(const FactorParams& params, AspectRatio y) {
    const double t1 = t1_of(params, y);
    const double edge_t = t_at_b_plus(y);
    const auto [a, b] = lsd_edges(y);
    if (t1 < edge_t) return TransitionResult{t1, true, z_of_t(t1, y)};
    return TransitionResult{t1, false, b};
}

double lambda_raw(const TransitionResult& r, double sigma2) {
    return r.lambda * sigma2 * sigma2;
}

bool is_significant_region(const FactorParams& params, AspectRatio y) {
    const double g0 = params.gamma0 / params.sigma2;
    const double g1 = std::abs(params.gamma1) / params.sigma2;
    const double t = t_at_b_plus(y);
    const double s = std::sqrt(t * t + t);
    const double tau0 = y.y / (t + s);
    if (g1 > tau0) return true;
    return g0 > (y.y - s * g1) / t;
}

RegionBounds region_bounds(AspectRatio y) {
    const double t = t_at_b_plus(y);
    const double s = std::sqrt(t * t + t);
    return RegionBounds{y.y / (t + s), y.y / t};
}

std::vector<BoundaryPoint> detectability_boundary(AspectRatio y, int n_points) {
    if (n_points < 2) throw std::invalid_argument("detectability_boundary: n_points >= 2");
    const double t = t_at_b_plus(y);
    const double s = std::sqrt(t * t + t);
    const auto [tau0, tau1] = region_bounds(y);

    std::vector<BoundaryPoint> pts;
    pts.reserve(static_cast<std::size_t>(n_points) * 6);
    const int n = n_points;

    // Diagonals |g1| = g0 from the origin to the corners (tau0, +-tau0).
    for (int i = 0; i < n; ++i) {
        const double g = tau0 * (i + 1) / n;
        pts.push_back({kDiagonalUpper, g, g});
        pts.push_back({kDiagonalLower, g, -g});
    }
    // Detection frontier g0 = (y - s g1)/t for g1 in [0, tau0]: the straight
    // edges of the undetectable quadrilateral between (tau1, 0) and the
    // corners.
    for (int i = 0; i < n; ++i) {
        const double g1 = tau0 * i / (n - 1);
        const double g0 = (y.y - s * g1) / t;
        pts.push_back({kFrontierUpper, g0, g1});
        pts.push_back({kFrontierLower, g0, -g1});
    }
    // Interior separatrix 2y g0 + g1^2 - 2(g0^2 - g1^2) t = 0, drawn from its
    // vertex (tau1, 0) out to 3*tau1.
    for (int i = 0; i < n; ++i) {
        const double g0 = tau1 * (1.0 + 2.0 * i / (n - 1));
        const double g1sq = 2.0 * t * g0 * (g0 - tau1) / (1.0 + 2.0 * t);
        const double g1 = std::sqrt(std::max(0.0, g1sq));
        pts.push_back({kInteriorUpper, g0, g1});
        pts.push_back({kInteriorLower, g0, -g1});
    }
    return pts;
}

}  // namespace facnum
