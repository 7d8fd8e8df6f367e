#pragma once

#include <cstdint>
#include <vector>

#include "facnum/panel.hpp"

namespace facnum {

// Squared singular values of the lag-1 autocovariance matrix, sorted
// descending, plus the consecutive-ratio sequence theta_j = l_{j+1}/l_j.
struct Spectrum {
    std::vector<double> eigenvalues;  // l_1 >= ... >= l_{min(p,T)} >= 0
    std::vector<double> ratios;       // theta_j, j = 1..min(p,T)-1
};

struct EstimatorConfig {
    double d_t;            // threshold, in (0,1)
    std::int64_t search_cap;  // largest ratio index scanned, in [1, min(p,T))
    bool require_two;      // demand two consecutive exceedances
};

struct KhatResult {
    std::int64_t k;
    bool saturated;  // no qualifying index within search_cap
};

struct MultistepStep {
    int step;                  // 1-based
    std::int64_t r;            // factors removed at this step
    std::int64_t cumulative;   // running total
};

// Spectrum of S = lag1_autocov(panel) via SVD of S itself (the eigenvalues of
// S S' are the squares; forming the product would square the condition
// number). Keeps min(p, T) values.
Spectrum mhat_spectrum(const Panel& panel);

// Default scan caps. Threshold estimators scan the whole ratio range; the
// argmin estimator stops at min(p,T)/2 because for p < T the smallest
// eigenvalues approach zero and their ratios would otherwise capture the
// argmin.
std::int64_t default_threshold_cap(const Spectrum& spectrum);
std::int64_t default_argmin_cap(const Spectrum& spectrum);

// Threshold estimator: (first j >= 1 with theta_j > 1 - d_t) - 1. With
// require_two, theta_{j+1} must also exceed the threshold. When no index
// qualifies the result saturates at search_cap with the flag set.
KhatResult k_hat(const Spectrum& spectrum, const EstimatorConfig& config);

// Argmin-of-ratios estimator over j = 1..search_cap, smallest index on ties.
std::int64_t k_tilde(const Spectrum& spectrum, std::int64_t search_cap);

// Iterative argmin estimation with residual projection: estimate r by
// k_tilde, project the panel on the orthocomplement of the top-r left
// singular vectors of the lag-1 autocovariance, repeat. Gives no intrinsic
// stopping signal; max_steps bounds the iteration.
std::vector<MultistepStep> k_tilde_multistep(const Panel& panel, int max_steps,
                                             std::int64_t search_cap);

}  // namespace facnum
