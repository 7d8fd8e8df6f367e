#include "facnum/spectral_law.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace facnum {
namespace {

using cplx = std::complex<double>;

// All three roots of c3 x^3 + c2 x^2 + c1 x + c0 = 0 (c3 != 0) by Cardano.
std::array<cplx, 3> solve_cubic(cplx c3, cplx c2, cplx c1, cplx c0) {
    const cplx a = c2 / c3, b = c1 / c3, c = c0 / c3;
    // depressed form t^3 + p t + q, x = t - a/3
    const cplx p = b - a * a / 3.0;
    const cplx q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const cplx shift = -a / 3.0;
    const cplx disc = q * q / 4.0 + p * p * p / 27.0;
    cplx u = std::sqrt(disc) - q / 2.0;
    if (std::abs(u) < 1e-300) u = -std::sqrt(disc) - q / 2.0;
    if (std::abs(u) < 1e-300) return {shift, shift, shift};  // triple root
    const cplx w = std::pow(u, 1.0 / 3.0);
    const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
    std::array<cplx, 3> roots;
    cplx wk = w;
    for (int k = 0; k < 3; ++k) {
        roots[static_cast<std::size_t>(k)] = wk - p / (3.0 * wk) + shift;
        wk *= omega;
    }
    return roots;
}

// Residual and Newton polish for z^2 m^3 - 2z(y-1) m^2 + ((y-1)^2 - z) m - 1.
cplx cubic_value(cplx m, cplx z, double y) {
    const cplx c3 = z * z;
    const cplx c2 = -2.0 * z * (y - 1.0);
    const cplx c1 = (y - 1.0) * (y - 1.0) - z;
    return ((c3 * m + c2) * m + c1) * m - 1.0;
}

cplx cubic_derivative(cplx m, cplx z, double y) {
    const cplx c3 = z * z;
    const cplx c2 = -2.0 * z * (y - 1.0);
    const cplx c1 = (y - 1.0) * (y - 1.0) - z;
    return (3.0 * c3 * m + 2.0 * c2) * m + c1;
}

cplx polish(cplx m, cplx z, double y) {
    for (int it = 0; it < 4; ++it) {
        const cplx f = cubic_value(m, z, y);
        const cplx df = cubic_derivative(m, z, y);
        if (std::abs(df) == 0.0) break;
        const cplx step = f / df;
        m -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(m))) break;
    }
    return m;
}

std::array<cplx, 3> stieltjes_roots(cplx z, double y) {
    auto roots = solve_cubic(z * z, -2.0 * z * (y - 1.0), (y - 1.0) * (y - 1.0) - z, cplx(-1.0));
    for (auto& r : roots) r = polish(r, z, y);
    return roots;
}

}  // namespace

AspectRatio::AspectRatio(double ratio) : y(ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio))
        throw std::domain_error("AspectRatio: y must be a positive finite real, got " +
                                std::to_string(ratio));
}

std::pair<double, double> lsd_edges(AspectRatio y) {
    const double s = std::pow(1.0 + 8.0 * y.y, 1.5);
    const double base = -1.0 + 20.0 * y.y + 8.0 * y.y * y.y;
    const double a = (base - s) / 8.0;
    const double b = (base + s) / 8.0;
    return {y.y >= 1.0 ? a : 0.0, b};
}

double z_of_t(double t, AspectRatio y) {
    if (!(t > 0.0)) throw std::domain_error("z_of_t: t must be positive");
    const double u = t + y.y;
    return (t + 1.0) * u * u / t;
}

double t_at_b_plus(AspectRatio y) {
    // z'(t) has numerator (t+y)(2t^2 + t - y); the positive quadratic root is
    // the critical point. Newton on g(t) = 2t^2 + t - y tightens the last ulp.
    double t = (std::sqrt(1.0 + 8.0 * y.y) - 1.0) / 4.0;
    for (int it = 0; it < 3; ++it) {
        const double g = 2.0 * t * t + t - y.y;
        const double dg = 4.0 * t + 1.0;
        t -= g / dg;
    }
    return t;
}

SpectralLaw make_law(AspectRatio y) {
    const auto [a, b] = lsd_edges(y);
    return SpectralLaw{y, a, b, t_at_b_plus(y)};
}

std::complex<double> stieltjes_m(std::complex<double> z, AspectRatio y) {
    if (z.imag() < 0.0) return std::conj(stieltjes_m(std::conj(z), y));
    if (z.imag() == 0.0) return cplx(stieltjes_m(z.real(), y), 0.0);

    const auto roots = stieltjes_roots(z, y.y);
    const cplx* best = nullptr;
    for (const auto& r : roots)
        if (!best || r.imag() > best->imag()) best = &r;
    if (best->imag() <= 0.0)
        throw std::runtime_error("stieltjes_m: no Herglotz root found (unexpected)");
    return *best;
}

double stieltjes_m(double z, AspectRatio y) {
    const auto [a, b] = lsd_edges(y);
    // The measure occupies [support_lo, b]: the continuous part plus, for
    // y < 1, the atom at the origin.
    const double support_lo = y.y >= 1.0 ? a : 0.0;

    if (z > b) {
        const auto roots = stieltjes_roots(cplx(z, 0.0), y.y);
        // The genuine branch is real, negative, and the largest such root:
        // with m = -(1+t)/z the spurious branch carries the bigger t, hence
        // the more negative m. Near the edge the two approach each other, so
        // the interval (-1/(z-b), 0) alone cannot separate them.
        const double lo = -1.0 / (z - b);
        double best = std::numeric_limits<double>::quiet_NaN();
        for (const auto& r : roots) {
            if (std::abs(r.imag()) > 1e-8 * (1.0 + std::abs(r.real()))) continue;
            const double m = r.real();
            if (m >= 0.0 || m <= lo) continue;
            if (std::isnan(best) || m > best) best = m;
        }
        if (std::isnan(best)) throw std::runtime_error("stieltjes_m: root selection failed");
        return best;
    }
    if (z < support_lo) {
        if (z == 0.0) return 1.0 / ((y.y - 1.0) * (y.y - 1.0));  // cubic degenerates
        // Below the support m is positive, squeezed between the extremes of
        // 1/(t - z) over the support.
        const double lo = 1.0 / (b - z);
        const double hi = 1.0 / (support_lo - z);
        const auto roots = stieltjes_roots(cplx(z, 0.0), y.y);
        double best = std::numeric_limits<double>::quiet_NaN();
        for (const auto& r : roots) {
            if (std::abs(r.imag()) > 1e-8 * (1.0 + std::abs(r.real()))) continue;
            const double m = r.real();
            if (m <= lo || m >= hi) continue;
            if (std::isnan(best) || m < best) best = m;
        }
        if (std::isnan(best)) throw std::runtime_error("stieltjes_m: root selection failed");
        return best;
    }
    throw std::domain_error(
        "stieltjes_m: real argument lies in the spectral support; use a complex argument");
}

double t_transform(double z, AspectRatio y) {
    const auto [a, b] = lsd_edges(y);
    if (!(z > b)) throw std::domain_error("t_transform: z must exceed the right edge b");

    // Bisect the decreasing branch of z_of_t, then polish with Newton.
    double hi = t_at_b_plus(y);               // z_of_t(hi) = b < z
    double lo = hi;
    while (z_of_t(lo, y) <= z) lo *= 0.5;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (z_of_t(mid, y) > z ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double u = t + y.y;
        const double f = (t + 1.0) * u * u / t - z;
        const double df = u * (2.0 * t * t + t - y.y) / (t * t);
        if (df == 0.0) break;
        const double step = f / df;
        const double next = t - step;
        if (next <= 0.0) break;
        t = next;
    }
    return t;
}

TransformPoint transform_point(double z, AspectRatio y) {
    const double t = t_transform(z, y);
    return TransformPoint{z, -(1.0 + t) / z, t};
}

double lsd_density(double x, AspectRatio y) {
    if (!(x > 0.0)) throw std::domain_error("lsd_density: x must be positive");
    const auto [a, b] = lsd_edges(y);
    if (x <= a || x >= b) return 0.0;

    // Richardson step: Im m_c(x + i*eps) = pi f(x) + O(eps) away from the
    // edges, where m_c removes the atom at the origin whose smoothed mass
    // would otherwise swamp the density for small x.
    const double atom = lsd_atom_mass(y);
    const auto continuous_im = [&](double eps) {
        const cplx z(x, eps);
        return (stieltjes_m(z, y) + atom / z).imag();
    };
    const double eps = 1e-9;
    const double im = 2.0 * continuous_im(0.5 * eps) - continuous_im(eps);
    return std::max(0.0, im / M_PI);
}

double lsd_atom_mass(AspectRatio y) { return std::max(0.0, 1.0 - y.y); }

}  // namespace facnum
