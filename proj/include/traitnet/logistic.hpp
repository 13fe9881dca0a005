#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "traitnet/error.hpp"

namespace traitnet {

struct LogisticOptions {
    int max_iterations = 50;
    double tolerance = 1e-10;        // relative deviance change
    double separation_bound = 30.0;  // |coefficient| beyond this flags separation
};

struct LogisticFit {
    Eigen::VectorXd coefficients;  // log-odds
    Eigen::VectorXd std_errors;
    Eigen::VectorXd wald_p_values;
    Eigen::MatrixXd covariance;  // inverse observed information
    std::vector<std::pair<double, double>> ci95;
    double deviance = 0.0;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;

    double probability(const Eigen::VectorXd& x) const;
};

// Maximum likelihood by IRLS with step-halving. X must include the intercept
// column. Throws NumericError on rank deficiency (naming the collinear
// columns) and on perfect separation (naming the diverging column).
LogisticFit fit_logistic(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                         const std::vector<std::string>& column_names = {},
                         const LogisticOptions& options = {});

inline double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

}  // namespace traitnet
