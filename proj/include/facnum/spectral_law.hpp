#pragma once

#include <complex>
#include <utility>

namespace facnum {

// Limiting spectral law of the product M = S S' where S is the lag-1 sample
// autocovariance matrix of a p x T panel of unit-variance white noise and
// p/T -> y > 0.
//
// The Stieltjes transform m(z) of the companion law F (the T x T companion
// matrix shares the nonzero eigenvalues of M and carries an extra atom of
// mass max(0, 1-y) at the origin) solves the cubic
//
//     z^2 m^3 - 2 z (y-1) m^2 + ((y-1)^2 - z) m - 1 = 0,
//
// and the T-transform T(z) = -1 - z m(z) inverts, on its decreasing branch,
// the rational map
//
//     z(t) = (t+1) (t+y)^2 / t,   t in (0, T(b+)).
//
// The continuous part of F is supported on [a*1{y>=1}, b]; the right edge b
// is the minimum of z(t) over t > 0, attained at t = T(b+), and both edges
// have the closed forms returned by lsd_edges.

// Limit of the dimension-to-sample-size ratio p/T. Must be positive.
struct AspectRatio {
    double y;
    explicit AspectRatio(double ratio);
};

// Support edges plus the edge value of the T-transform.
struct SpectralLaw {
    AspectRatio y;
    double a;         // left edge of the continuous support (0 when y < 1)
    double b;         // right edge
    double t_b_plus;  // T(b+), the edge value of the T-transform
};

// A point (z, m(z), T(z)) on the spectrum/transform graph for real z > b.
struct TransformPoint {
    double z;
    double m;
    double t;
};

// Closed-form support edges. The raw left-edge expression is negative for
// y < 1, where the support actually starts at 0; it is clamped accordingly.
std::pair<double, double> lsd_edges(AspectRatio y);

// z(t) = (t+1)(t+y)^2/t, the functional inverse of the T-transform.
// Strictly decreasing on (0, T(b+)), strictly increasing beyond.
double z_of_t(double t, AspectRatio y);

// T(b+) as the minimizer of z_of_t: the positive root of 2t^2 + t - y = 0,
// refined by Newton on z'(t) so z_of_t(t_at_b_plus(y)) = b to machine
// precision.
double t_at_b_plus(AspectRatio y);

// The law bundle {a, b, T(b+)} with its internal consistency guaranteed.
SpectralLaw make_law(AspectRatio y);

// Stieltjes transform of the companion law F.
//   - Im z > 0: the unique cubic root with positive imaginary part.
//   - real z > b: the unique real root in (-1/(z-b), 0), selected as the
//     branch continuous with m ~ -1/z at infinity.
// Real z inside the support (or <= 0 for y < 1, where the atom sits) is a
// domain error; use a complex argument there.
std::complex<double> stieltjes_m(std::complex<double> z, AspectRatio y);
double stieltjes_m(double z, AspectRatio y);

// T(z) for real z > b: bisection of z_of_t on the decreasing branch plus a
// Newton polish. Consistent with -1 - z*stieltjes_m(z) to 1e-8 or better.
double t_transform(double z, AspectRatio y);

// Full (z, m, T) evaluation for real z > b.
TransformPoint transform_point(double z, AspectRatio y);

// Density of the continuous part of F at x > 0: (1/pi) Im m(x + i*eps)
// extrapolated to eps -> 0. Zero outside the open support interval.
// The atom of F at the origin is not part of the density; its mass is
// lsd_atom_mass.
double lsd_density(double x, AspectRatio y);

// Mass of the atom of F at 0: max(0, 1 - y).
double lsd_atom_mass(AspectRatio y);

}  // namespace facnum
