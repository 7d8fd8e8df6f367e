#include "facnum/calibration.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "facnum/parallel.hpp"
#include "facnum/rng.hpp"

namespace facnum {

namespace {

// Type-7 quantile (linear interpolation between order statistics).
double quantile_type7(std::vector<double> v, double level) {
    std::sort(v.begin(), v.end());
    const double h = level * (static_cast<double>(v.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - std::floor(h)) * (v[lo + 1] - v[lo]);
}

}  // namespace

CalibrationReport calibrate_dT(std::int64_t p, std::int64_t t_len, std::int64_t reps,
                               double quantile_level, std::uint64_t seed, int threads) {
    if (p < 10 || t_len < 10)
        throw std::invalid_argument("calibrate_dT: p and T must be at least 10");
    if (reps < 100) throw std::invalid_argument("calibrate_dT: reps must be at least 100");
    if (!(quantile_level > 0.0 && quantile_level < 0.5))
        throw std::invalid_argument("calibrate_dT: quantile_level must lie in (0, 0.5)");

    const double t23 = std::pow(static_cast<double>(t_len), 2.0 / 3.0);
    std::vector<double> stats(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        auto rng = make_stream(seed, rep);
        std::normal_distribution<double> gauss;
        Eigen::MatrixXd noise(p, t_len + 1);
        for (Eigen::Index c = 0; c < noise.cols(); ++c)
            for (Eigen::Index r = 0; r < noise.rows(); ++r) noise(r, c) = gauss(rng);
        const Eigen::MatrixXd sigma = noise.rightCols(t_len) * noise.leftCols(t_len).transpose() /
                                      static_cast<double>(t_len);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(sigma);
        const double nu1 = svd.singularValues()(0) * svd.singularValues()(0);
        const double nu2 = svd.singularValues()(1) * svd.singularValues()(1);
        stats[rep] = t23 * (nu2 / nu1 - 1.0);
    });

    const double q = quantile_type7(std::move(stats), quantile_level);
    if (q >= 0.0) throw std::runtime_error("calibrate_dT: nonnegative quantile (pathological)");
    return CalibrationReport{p, t_len, reps, quantile_level, q, std::abs(q) / t23, seed};
}

}  // namespace facnum
