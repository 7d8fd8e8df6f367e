#pragma once

#include <vector>

#include "facnum/spectral_law.hpp"

namespace facnum {

// Phase transition for factor detectability. A stationary factor series with
// variance gamma0, lag-1 autocovariance gamma1, observed through white noise
// of variance sigma2 at aspect ratio y, produces an eigenvalue outlier above
// the noise edge b iff the smaller root T1 of
//
//   [g0^2 - g1^2] T^2 - [g1^2 + 2 y g0] T + y^2 = 0     (g = gamma/sigma2)
//
// falls below T(b+). When it does, the outlier location (in units of sigma^4)
// is z_of_t(T1); otherwise the sample eigenvalue merges with the edge b.

// Population parameters of one factor series.
struct FactorParams {
    double gamma0;  // variance (factor strength), > 0
    double gamma1;  // lag-1 autocovariance, |gamma1| <= gamma0
    double sigma2;  // noise variance, > 0
    FactorParams(double g0, double g1, double s2);
};

struct TransitionResult {
    double t1;         // smaller positive root T1
    bool significant;  // t1 < T(b+)
    double lambda;     // limit of l/sigma^4: z_of_t(t1) when significant, b otherwise
};

// Corner and sufficient level of the undetectable region in SNR coordinates.
struct RegionBounds {
    double tau0;  // y / (T(b+) + sqrt(T(b+)^2 + T(b+)))
    double tau1;  // y / T(b+)
};

// One emitted point of the detectability diagram, in SNR units
// (gamma0/sigma^2, gamma1/sigma^2).
struct BoundaryPoint {
    int curve_id;
    double gamma0_snr;
    double gamma1_snr;
};

// Curve ids emitted by detectability_boundary.
enum BoundaryCurve : int {
    kDiagonalUpper = 0,   // gamma1 =  gamma0, from the origin to (tau0, tau0)
    kDiagonalLower = 1,   // gamma1 = -gamma0, mirror
    kFrontierUpper = 2,   // g0 = (y - sqrt(T^2+T) g1)/T, g1 in (0, tau0]
    kFrontierLower = 3,   // mirror
    kInteriorUpper = 4,   // 2y g0 + g1^2 = 2 (g0^2 - g1^2) T, upper half
    kInteriorLower = 5,   // mirror
};

// Smaller positive root T1. |gamma1| = gamma0 degenerates the quadratic to a
// linear equation whose root y^2/(g1^2 + 2 y g0) is the continuous limit.
double t1_of(const FactorParams& params, AspectRatio y);

// Transition decision and outlier limit. The boundary case t1 == T(b+) is
// classified not significant and lambda = b.
TransitionResult spike_limit(const FactorParams& params, AspectRatio y);

// Rescales TransitionResult::lambda to raw eigenvalue units.
double lambda_raw(const TransitionResult& r, double sigma2);

// Direct region characterization: significant iff |g1| > tau0, or |g1| <= tau0
// and g0 > (y - sqrt(T(b+)^2 + T(b+)) |g1|) / T(b+). Equivalent to
// t1 < T(b+); the equivalence is exercised by tests on random grids.
bool is_significant_region(const FactorParams& params, AspectRatio y);

RegionBounds region_bounds(AspectRatio y);

// Points tracing the detection frontier and companion curves of the
// diagram, n_points per curve. Frontier and diagonal points satisfy their
// defining equations to 1e-8; the interior curve (ids 4-5) separates the two
// algebraic sub-cases of the significant region and does not itself border
// the undetectable set.
std::vector<BoundaryPoint> detectability_boundary(AspectRatio y, int n_points);

}  // namespace facnum
