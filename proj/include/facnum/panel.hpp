#pragma once

#include <Eigen/Dense>
#include <string>

namespace facnum {

// Observed p x (T+1) data block, one column per time point.
struct Panel {
    Eigen::MatrixXd data;  // p rows (series) x n_obs columns (time)

    Eigen::Index p() const { return data.rows(); }
    Eigen::Index n_obs() const { return data.cols(); }
    Eigen::Index t_len() const { return data.cols() - 1; }
};

// Validates dimensions (p >= 1, n_obs >= 3) and finiteness.
Panel make_panel(Eigen::MatrixXd data);

// Subtracts the per-series sample mean in place.
void demean_rows(Panel& panel);

// Lag-1 sample autocovariance S = (1/T) sum_{t=2}^{T+1} y_t y_{t-1}'.
Eigen::MatrixXd lag1_autocov(const Panel& panel);

// CSV ingestion. The file stores one time point per row and one series per
// column (pass transpose=true for series-per-row files); a leading row with
// any non-numeric cell is treated as a header and skipped. Non-numeric cells
// elsewhere, ragged rows and non-finite values are rejected.
Panel read_panel_csv(const std::string& path, bool transpose, bool demean);

// Writes the panel in the same row-per-time-point layout, full precision.
void write_panel_csv(const Panel& panel, const std::string& path);

}  // namespace facnum
