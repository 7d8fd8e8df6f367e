#include "facnum/spectrum.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace facnum {

namespace {

std::vector<double> ratio_sequence(const std::vector<double>& ev) {
    std::vector<double> ratios;
    if (ev.size() < 2) return ratios;
    ratios.reserve(ev.size() - 1);
    for (std::size_t j = 0; j + 1 < ev.size(); ++j)
        // Exhausted (zero) tail: treat tied zero eigenvalues as ratio 1.
        ratios.push_back(ev[j] > 0.0 ? ev[j + 1] / ev[j] : 1.0);
    return ratios;
}

void check_config(const Spectrum& spectrum, double d_t, std::int64_t cap) {
    if (!(d_t > 0.0 && d_t < 1.0))
        throw std::invalid_argument("EstimatorConfig: d_t must lie in (0,1)");
    if (cap < 1 || cap > static_cast<std::int64_t>(spectrum.ratios.size()))
        throw std::invalid_argument("EstimatorConfig: search_cap out of range");
}

}  // namespace

Spectrum mhat_spectrum(const Panel& panel) {
    const Eigen::MatrixXd sigma = lag1_autocov(panel);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(sigma);
    const auto& sv = svd.singularValues();
    const Eigen::Index keep = std::min(panel.p(), panel.t_len());
    Spectrum out;
    out.eigenvalues.resize(static_cast<std::size_t>(std::min<Eigen::Index>(keep, sv.size())));
    for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
        const double s = sv(static_cast<Eigen::Index>(i));
        out.eigenvalues[i] = s * s;
    }
    out.ratios = ratio_sequence(out.eigenvalues);
    return out;
}

std::int64_t default_threshold_cap(const Spectrum& spectrum) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(spectrum.ratios.size()));
}

std::int64_t default_argmin_cap(const Spectrum& spectrum) {
    const auto n = static_cast<std::int64_t>(spectrum.eigenvalues.size());
    return std::clamp<std::int64_t>(n / 2, 1, static_cast<std::int64_t>(spectrum.ratios.size()));
}

KhatResult k_hat(const Spectrum& spectrum, const EstimatorConfig& config) {
    check_config(spectrum, config.d_t, config.search_cap);
    const double threshold = 1.0 - config.d_t;
    const auto& theta = spectrum.ratios;
    const auto n = static_cast<std::int64_t>(theta.size());
    for (std::int64_t j = 1; j <= config.search_cap; ++j) {
        if (theta[static_cast<std::size_t>(j - 1)] <= threshold) continue;
        if (!config.require_two) return {j - 1, false};
        if (j < n && theta[static_cast<std::size_t>(j)] > threshold) return {j - 1, false};
    }
    return {config.search_cap, true};
}

std::int64_t k_tilde(const Spectrum& spectrum, std::int64_t search_cap) {
    check_config(spectrum, 0.5, search_cap);
    const auto& theta = spectrum.ratios;
    std::int64_t best = 1;
    for (std::int64_t j = 2; j <= search_cap; ++j)
        if (theta[static_cast<std::size_t>(j - 1)] < theta[static_cast<std::size_t>(best - 1)])
            best = j;
    return best;
}

std::vector<MultistepStep> k_tilde_multistep(const Panel& panel, int max_steps,
                                             std::int64_t search_cap) {
    if (max_steps < 1) throw std::invalid_argument("k_tilde_multistep: max_steps >= 1");
    std::vector<MultistepStep> trace;
    Panel current = panel;
    std::int64_t total = 0;
    for (int step = 1; step <= max_steps; ++step) {
        const Eigen::MatrixXd sigma = lag1_autocov(current);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(sigma, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        Spectrum spec;
        const Eigen::Index keep = std::min(current.p(), current.t_len());
        spec.eigenvalues.assign(sv.data(), sv.data() + std::min<Eigen::Index>(keep, sv.size()));
        for (auto& v : spec.eigenvalues) v *= v;
        spec.ratios = ratio_sequence(spec.eigenvalues);

        const std::int64_t cap =
            std::min<std::int64_t>(search_cap, static_cast<std::int64_t>(spec.ratios.size()));
        const std::int64_t r = k_tilde(spec, cap);
        if (r >= current.p() || total + r >= std::min(current.p(), current.t_len()))
            throw std::runtime_error("k_tilde_multistep: estimated rank exhausts the panel");
        total += r;
        trace.push_back({step, r, total});

        // Residuals (I - A A') y_t, A = top-r left singular vectors.
        const Eigen::MatrixXd basis = svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
        current.data -= basis * (basis.transpose() * current.data);
    }
    return trace;
}

}  // namespace facnum
