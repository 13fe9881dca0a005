#include "traitnet/logistic.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "traitnet/special.hpp"

namespace traitnet {

namespace {

std::string column_label(const std::vector<std::string>& names, Eigen::Index j) {
    if (j < static_cast<Eigen::Index>(names.size())) return names[j];
    return "column " + std::to_string(j);
}

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    // -2 log L with the saturated model contributing zero for 0/1 outcomes.
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        // log(1 + e^eta) evaluated stably.
        const double log1pe = eta(i) > 0 ? eta(i) + std::log1p(std::exp(-eta(i)))
                                         : std::log1p(std::exp(eta(i)));
        dev += 2.0 * (log1pe - y(i) * eta(i));
    }
    return dev;
}

}  // namespace

double LogisticFit::probability(const Eigen::VectorXd& x) const {
    return logistic(coefficients.dot(x));
}

LogisticFit fit_logistic(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                         const std::vector<std::string>& column_names,
                         const LogisticOptions& options) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n) throw ConfigError("fit_logistic: y/X size mismatch");
    if (n < k) throw NumericError("fit_logistic: fewer observations than parameters");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) throw ConfigError("fit_logistic: response must be 0/1");
    }
    const double positives = y.sum();
    if (positives == 0.0 || positives == static_cast<double>(n)) {
        throw NumericError("fit_logistic: response is constant (all " +
                           std::string(positives == 0.0 ? "0" : "1") + "), likelihood is degenerate");
    }

    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        qr.setThreshold(1e-10);
        if (qr.rank() < k) {
            std::string collinear;
            const auto& perm = qr.colsPermutation().indices();
            for (Eigen::Index j = qr.rank(); j < k; ++j) {
                if (!collinear.empty()) collinear += ", ";
                collinear += column_label(column_names, perm(j));
            }
            throw NumericError("fit_logistic: design matrix is rank deficient; collinear terms: " +
                               collinear);
        }
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    double deviance = binomial_deviance(y, eta);
    LogisticFit fit;
    fit.iterations = 0;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        fit.iterations = iter;
        Eigen::VectorXd p(n), w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p(i) = logistic(eta(i));
            w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
        }
        const Eigen::MatrixXd xtwx = X.transpose() * w.asDiagonal() * X;
        const Eigen::VectorXd score = X.transpose() * (y - p);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(xtwx);
        if (ldlt.info() != Eigen::Success) throw NumericError("fit_logistic: information matrix is singular");
        const Eigen::VectorXd direction = ldlt.solve(score);

        // Newton step with halving on deviance increase.
        double step = 1.0;
        Eigen::VectorXd candidate_beta;
        Eigen::VectorXd candidate_eta;
        double candidate_deviance = deviance;
        for (int half = 0; half < 32; ++half) {
            candidate_beta = beta + step * direction;
            candidate_eta = X * candidate_beta;
            candidate_deviance = binomial_deviance(y, candidate_eta);
            if (candidate_deviance <= deviance + 1e-14) break;
            step *= 0.5;
        }
        beta = candidate_beta;
        eta = candidate_eta;
        const double change = std::abs(deviance - candidate_deviance) /
                              (std::abs(candidate_deviance) + 0.1);
        deviance = candidate_deviance;

        if (beta.cwiseAbs().maxCoeff() > options.separation_bound) {
            Eigen::Index worst = 0;
            beta.cwiseAbs().maxCoeff(&worst);
            throw NumericError("fit_logistic: perfect separation suspected, coefficient of " +
                               column_label(column_names, worst) + " is diverging");
        }
        if (change < options.tolerance) {
            fit.converged = true;
            break;
        }
    }

    // A deviance at numerical zero means every point is classified perfectly:
    // the MLE does not exist and some coefficient is running off to infinity.
    if (deviance < 1e-6) {
        Eigen::Index worst = 0;
        double largest = -1.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double scale = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(n));
            if (std::abs(beta(j)) * scale > largest) {
                largest = std::abs(beta(j)) * scale;
                worst = j;
            }
        }
        throw NumericError("fit_logistic: perfect separation, coefficient of " +
                           column_label(column_names, worst) + " is unbounded");
    }

    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        p(i) = logistic(eta(i));
        w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
    }
    const Eigen::MatrixXd information = X.transpose() * w.asDiagonal() * X;
    fit.covariance = information.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    fit.coefficients = beta;
    fit.std_errors = fit.covariance.diagonal().cwiseSqrt();
    fit.wald_p_values.resize(k);
    fit.ci95.reserve(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double z = beta(j) / fit.std_errors(j);
        fit.wald_p_values(j) = 2.0 * special::normal_sf(std::abs(z));
        fit.ci95.emplace_back(beta(j) - 1.96 * fit.std_errors(j), beta(j) + 1.96 * fit.std_errors(j));
    }
    fit.deviance = deviance;
    fit.log_likelihood = -deviance / 2.0;
    return fit;
}

}  // namespace traitnet
