#pragma once

#include <cstdint>

namespace facnum {

// Simulated calibration of the ratio threshold d_T. For pure standard
// Gaussian noise the statistic T^{2/3}(nu2/nu1 - 1), built from the two
// largest eigenvalues of the lag-1 autocovariance product matrix, has a
// nondegenerate lower tail; d_T is set from its empirical lower quantile so
// that noise-only ratios are flagged below 1 - d_T with the chosen
// probability. The statistic is scale-free, so the noise variance never
// enters.
struct CalibrationReport {
    std::int64_t p = 0;
    std::int64_t t_len = 0;
    std::int64_t reps = 0;
    double quantile_level = 0.0;
    double q = 0.0;    // empirical lower quantile of T^{2/3}(nu2/nu1 - 1), < 0
    double d_t = 0.0;  // |q| / T^{2/3}
    std::uint64_t seed = 0;
};

inline constexpr std::int64_t kDefaultCalibrationReps = 2000;
inline constexpr double kDefaultQuantileLevel = 0.005;

// Runs `reps` independent noise replications (stream i derived from `seed`)
// and extracts the type-7 empirical quantile. Replications run on `threads`
// workers (<= 0 for auto); the result does not depend on the thread count.
CalibrationReport calibrate_dT(std::int64_t p, std::int64_t t_len, std::int64_t reps,
                               double quantile_level, std::uint64_t seed, int threads = 0);

}  // namespace facnum
