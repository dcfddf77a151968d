#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cemech {

/// Outcome of any fit: named estimates with 1-sigma errors and covariance.
struct FitReport {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> std_errors;
    Eigen::MatrixXd covariance;

    double residual_rms = 0.0; // RMS of the weighted residuals
    std::size_t n_points = 0;  // residuals entering the fit
    std::size_t dof = 0;       // n_points - number of free parameters
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0; // max |J^T r| at the returned point
    std::string stop_reason;

    std::vector<std::string> diagnostics; // why a fit failed
    std::vector<std::string> warnings;    // fit succeeded but something is off
    std::map<std::string, double> constants; // fixed inputs such as reference points

    std::size_t index(std::string_view name) const;
    bool has(std::string_view name) const;
    double value(std::string_view name) const;
    double error(std::string_view name) const;
};

} // namespace cemech
