#include "traitnet/autocorr.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "traitnet/rng.hpp"
#include "traitnet/special.hpp"

namespace traitnet {

std::string_view weight_mode_name(WeightMode mode) {
    return mode == WeightMode::raw_adjacency ? "raw_adjacency" : "row_normalized";
}

WeightMode weight_mode_from_name(std::string_view name) {
    if (name == "raw_adjacency" || name == "raw") return WeightMode::raw_adjacency;
    if (name == "row_normalized" || name == "rownorm") return WeightMode::row_normalized;
    throw ConfigError("unknown weight mode '" + std::string(name) + "'");
}

std::string_view autocorr_method_name(AutocorrMethod method) {
    return method == AutocorrMethod::lag_covariate_least_squares ? "lag_covariate_least_squares"
                                                                 : "profile_ml";
}

AutocorrMethod autocorr_method_from_name(std::string_view name) {
    if (name == "lag_covariate_least_squares" || name == "lag_ls") {
        return AutocorrMethod::lag_covariate_least_squares;
    }
    if (name == "profile_ml" || name == "ml") return AutocorrMethod::profile_ml;
    throw ConfigError("unknown autocorrelation method '" + std::string(name) + "'");
}

WeightMatrix build_weight_matrix(const ContactNetwork& network, WeightMode mode) {
    const auto n = static_cast<Eigen::Index>(network.node_count());
    WeightMatrix out;
    out.mode = mode;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(network.edge_count() * 2);
    for (const auto& [u, v] : network.edges()) {
        const double wu = mode == WeightMode::raw_adjacency
                              ? 1.0
                              : 1.0 / static_cast<double>(network.degree(u));
        const double wv = mode == WeightMode::raw_adjacency
                              ? 1.0
                              : 1.0 / static_cast<double>(network.degree(v));
        triplets.emplace_back(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v), wu);
        triplets.emplace_back(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u), wv);
    }
    out.matrix.resize(n, n);
    out.matrix.setFromTriplets(triplets.begin(), triplets.end());
    for (std::uint32_t v = 0; v < network.node_count(); ++v) {
        if (network.degree(v) == 0) out.isolated.push_back(v);
    }
    return out;
}

Eigen::VectorXd weight_spectrum(const WeightMatrix& weights) {
    const Eigen::Index n = weights.matrix.rows();
    if (n == 0) return {};
    if (n > 5000) {
        throw SizeError(
            "weight_spectrum: dense eigen-decomposition limited to 5000 nodes; larger networks "
            "need a sparse eigensolver, which this build does not provide");
    }
    if (weights.mode == WeightMode::raw_adjacency) {
        Eigen::MatrixXd dense = Eigen::MatrixXd(weights.matrix);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericError("weight_spectrum: eigensolver failed");
        return solver.eigenvalues();
    }
    // Row-normalized W = D^{-1} A is similar to D^{-1/2} A D^{-1/2} on the
    // non-isolated block; isolated nodes contribute zero eigenvalues.
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < weights.matrix.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(weights.matrix, k); it; ++it) {
            degree(it.row()) += 1.0;
        }
    }
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (degree(i) > 0) active.push_back(i);
    }
    Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
    if (!active.empty()) {
        Eigen::VectorXd inv_index(n);
        Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(active.size()),
                                                    static_cast<Eigen::Index>(active.size()));
        std::vector<Eigen::Index> position(n, -1);
        for (std::size_t i = 0; i < active.size(); ++i) position[active[i]] = static_cast<Eigen::Index>(i);
        for (Eigen::Index k = 0; k < weights.matrix.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(weights.matrix, k); it; ++it) {
                const Eigen::Index r = position[it.row()];
                const Eigen::Index c = position[it.col()];
                // entry of D^{-1/2} A D^{-1/2} = 1/sqrt(d_r d_c) per adjacency pair
                sym(r, c) = 1.0 / std::sqrt(degree(it.row()) * degree(it.col()));
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) throw NumericError("weight_spectrum: eigensolver failed");
        values.head(static_cast<Eigen::Index>(active.size())) = solver.eigenvalues();
    }
    std::sort(values.data(), values.data() + values.size());
    return values;
}

namespace {

// Power-iteration bound on the spectral radius; deterministic start.
double spectral_radius_estimate(const Eigen::SparseMatrix<double>& m) {
    const Eigen::Index n = m.rows();
    if (n == 0 || m.nonZeros() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double radius = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        Eigen::VectorXd next = m * v;
        const double norm = next.norm();
        if (norm == 0.0) return 0.0;
        next /= norm;
        const double estimate = std::abs(next.dot(m * next));
        if (std::abs(estimate - radius) < 1e-12 * std::max(1.0, radius)) {
            radius = estimate;
            break;
        }
        radius = estimate;
        v = next;
    }
    return radius;
}

}  // namespace

SimulationRecord simulate_autocorrelation(const WeightMatrix& weights, double rho,
                                          const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                                          double noise_sd, std::uint64_t seed, int max_iterations,
                                          double tolerance, bool force) {
    const Eigen::Index n = weights.matrix.rows();
    if (X.rows() != n) throw ConfigError("simulate_autocorrelation: X row count mismatch");
    if (X.cols() != beta.size()) throw ConfigError("simulate_autocorrelation: beta size mismatch");

    SimulationRecord record;
    record.spectral_radius = std::abs(rho) * spectral_radius_estimate(weights.matrix);
    if (record.spectral_radius >= 1.0 && !force) {
        throw NumericError("simulate_autocorrelation: spectral radius of rho*W is " +
                           std::to_string(record.spectral_radius) +
                           " >= 1, iteration need not converge (pass force to override)");
    }

    auto gen = rng::replicate_stream(seed, 0);
    Eigen::VectorXd drift = X * beta;
    for (Eigen::Index i = 0; i < n; ++i) drift(i) += noise_sd == 0.0 ? 0.0 : gen.normal(0.0, noise_sd);

    Eigen::VectorXd y = drift;  // natural first iterate; exact when rho == 0
    for (int iter = 1; iter <= max_iterations; ++iter) {
        record.iterations = iter;
        Eigen::VectorXd next = rho * (weights.matrix * y) + drift;
        record.final_delta = (next - y).cwiseAbs().maxCoeff();
        y = next;
        if (record.final_delta < tolerance) {
            record.converged = true;
            break;
        }
        if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 1e12) {
            throw NumericError("simulate_autocorrelation: iteration diverged (spectral radius " +
                               std::to_string(record.spectral_radius) + ")");
        }
    }
    if (!record.converged) {
        throw NumericError("simulate_autocorrelation: no convergence after " +
                           std::to_string(max_iterations) + " iterations (last delta " +
                           std::to_string(record.final_delta) + ")");
    }
    record.outcome = std::move(y);
    return record;
}

namespace {

struct OlsResult {
    Eigen::VectorXd coefficients;
    Eigen::MatrixXd robust_covariance;
    Eigen::VectorXd residuals;
};

OlsResult ols_hc1(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y) {
    const Eigen::Index n = Z.rows();
    const Eigen::Index k = Z.cols();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw NumericError("spatial lag fit: design matrix is rank deficient");
    OlsResult out;
    out.coefficients = qr.solve(y);
    out.residuals = y - Z * out.coefficients;
    const Eigen::MatrixXd ztz_inv =
        (Z.transpose() * Z).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd meat =
        Z.transpose() * out.residuals.array().square().matrix().asDiagonal() * Z;
    const double small_sample = static_cast<double>(n) / static_cast<double>(n - k);
    out.robust_covariance = small_sample * ztz_inv * meat * ztz_inv;
    return out;
}

double wald_p(double estimate, double se) {
    if (se <= 0.0) return estimate == 0.0 ? 1.0 : 0.0;
    return 2.0 * special::normal_sf(std::abs(estimate / se));
}

SpatialLagFit profile_ml_fit(const WeightMatrix& weights, const Eigen::VectorXd& y,
                             const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
    const Eigen::Index n = y.size();
    const Eigen::Index k = X.cols();
    const Eigen::VectorXd spectrum = weight_spectrum(weights);
    const double lambda_min = spectrum.minCoeff();
    const double lambda_max = spectrum.maxCoeff();
    if (lambda_max <= 0.0 || lambda_min >= 0.0) {
        throw DegenerateError("profile_ml: weight spectrum does not bracket zero (empty network?)");
    }
    const double margin = 1e-8;
    const double rho_lo = 1.0 / lambda_min + margin;
    const double rho_hi = 1.0 / lambda_max - margin;

    // Residual-maker pieces: e(rho) = e0 - rho*e1 with e0, e1 the OLS
    // residuals of y and Wy on X.
    Eigen::LDLT<Eigen::MatrixXd> xtx((X.transpose() * X).eval());
    const Eigen::VectorXd wy = weights.matrix * y;
    const Eigen::VectorXd b0 = xtx.solve(X.transpose() * y);
    const Eigen::VectorXd b1 = xtx.solve(X.transpose() * wy);
    const Eigen::VectorXd e0 = y - X * b0;
    const Eigen::VectorXd e1 = wy - X * b1;

    auto concentrated = [&](double rho) {
        const Eigen::VectorXd e = e0 - rho * e1;
        const double sigma2 = e.squaredNorm() / static_cast<double>(n);
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < spectrum.size(); ++i) log_det += std::log1p(-rho * spectrum(i));
        return -0.5 * static_cast<double>(n) * (std::log(2.0 * M_PI * sigma2) + 1.0) + log_det;
    };

    // Golden-section maximization of the 1-D profile.
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = rho_lo;
    double b = rho_hi;
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = concentrated(c);
    double fd = concentrated(d);
    int iterations = 0;
    while (b - a > 1e-11 * std::max(1.0, std::abs(a) + std::abs(b)) && iterations < 300) {
        ++iterations;
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = concentrated(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = concentrated(d);
        }
    }
    const double rho = 0.5 * (a + b);

    const Eigen::VectorXd ay = y - rho * wy;
    const Eigen::VectorXd beta = xtx.solve(X.transpose() * ay);
    const Eigen::VectorXd residuals = ay - X * beta;
    const double sigma2 = residuals.squaredNorm() / static_cast<double>(n);

    // Information matrix for (beta, rho, sigma^2); B = W (I - rho W)^{-1}.
    Eigen::MatrixXd a_dense = Eigen::MatrixXd::Identity(n, n) - rho * Eigen::MatrixXd(weights.matrix);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a_dense);
    const Eigen::MatrixXd a_inv = lu.solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd b_mat = Eigen::MatrixXd(weights.matrix) * a_inv;
    const Eigen::VectorXd b_xbeta = b_mat * (X * beta);

    const Eigen::Index dim = k + 2;
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(dim, dim);
    info.topLeftCorner(k, k) = X.transpose() * X / sigma2;
    info.block(0, k, k, 1) = X.transpose() * b_xbeta / sigma2;
    info.block(k, 0, 1, k) = info.block(0, k, k, 1).transpose();
    info(k, k) = (b_mat * b_mat).trace() + (b_mat.transpose() * b_mat).trace() +
                 b_xbeta.squaredNorm() / sigma2;
    info(k, k + 1) = b_mat.trace() / sigma2;
    info(k + 1, k) = info(k, k + 1);
    info(k + 1, k + 1) = static_cast<double>(n) / (2.0 * sigma2 * sigma2);
    const Eigen::MatrixXd covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(dim, dim));

    SpatialLagFit fit;
    fit.method = AutocorrMethod::profile_ml;
    fit.weight_mode = weights.mode;
    fit.rho = rho;
    fit.rho_std_error = std::sqrt(std::max(0.0, covariance(k, k)));
    fit.rho_p_value = wald_p(rho, fit.rho_std_error);
    fit.beta = beta;
    fit.beta_std_errors = covariance.topLeftCorner(k, k).diagonal().cwiseSqrt();
    fit.beta_p_values.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        fit.beta_p_values(j) = wald_p(beta(j), fit.beta_std_errors(j));
    }
    fit.column_names = names;
    fit.sigma2 = sigma2;
    fit.iterations = iterations;
    fit.converged = true;
    fit.log_likelihood = concentrated(rho);
    return fit;
}

}  // namespace

SpatialLagFit fit_spatial_lag(const WeightMatrix& weights, const Eigen::VectorXd& y,
                              const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                              AutocorrMethod method, std::optional<double> fixed_rho) {
    const Eigen::Index n = y.size();
    if (weights.matrix.rows() != n || X.rows() != n) {
        throw ConfigError("fit_spatial_lag: dimension mismatch");
    }
    if (X.cols() == 0) throw ConfigError("fit_spatial_lag: empty design");

    if (fixed_rho) {
        const Eigen::VectorXd target = y - *fixed_rho * (weights.matrix * y);
        OlsResult ols = ols_hc1(X, target);
        SpatialLagFit fit;
        fit.method = method;
        fit.weight_mode = weights.mode;
        fit.rho = *fixed_rho;
        fit.rho_std_error = 0.0;
        fit.rho_p_value = 1.0;
        fit.beta = ols.coefficients;
        fit.beta_std_errors = ols.robust_covariance.diagonal().cwiseSqrt();
        fit.beta_p_values.resize(X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            fit.beta_p_values(j) = wald_p(fit.beta(j), fit.beta_std_errors(j));
        }
        fit.column_names = names;
        fit.sigma2 = ols.residuals.squaredNorm() / static_cast<double>(n - X.cols());
        return fit;
    }

    if (method == AutocorrMethod::profile_ml) return profile_ml_fit(weights, y, X, names);

    Eigen::MatrixXd Z(n, X.cols() + 1);
    Z.col(0) = weights.matrix * y;
    Z.rightCols(X.cols()) = X;
    OlsResult ols = ols_hc1(Z, y);

    SpatialLagFit fit;
    fit.method = AutocorrMethod::lag_covariate_least_squares;
    fit.weight_mode = weights.mode;
    fit.rho = ols.coefficients(0);
    fit.rho_std_error = std::sqrt(ols.robust_covariance(0, 0));
    fit.rho_p_value = wald_p(fit.rho, fit.rho_std_error);
    fit.beta = ols.coefficients.tail(X.cols());
    fit.beta_std_errors = ols.robust_covariance.bottomRightCorner(X.cols(), X.cols())
                              .diagonal()
                              .cwiseSqrt();
    fit.beta_p_values.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        fit.beta_p_values(j) = wald_p(fit.beta(j), fit.beta_std_errors(j));
    }
    fit.column_names = names;
    fit.sigma2 =
        ols.residuals.squaredNorm() / static_cast<double>(n - Z.cols());
    return fit;
}

AutocorrFit fit_autocorrelation(const ContactNetwork& network, const Cohort& cohort,
                                const Eigen::VectorXd& outcome,
                                const std::vector<Attribute>& covariates, WeightMode weight_mode,
                                AutocorrMethod method) {
    const Eigen::Index n = static_cast<Eigen::Index>(network.node_count());
    if (outcome.size() != n) throw ConfigError("fit_autocorrelation: outcome size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (outcome(i) != 0.0 && outcome(i) != 1.0) {
            throw ConfigError("fit_autocorrelation: outcome must be a binary 0/1 trait vector");
        }
    }
    for (Attribute attr : covariates) {
        if (attr == Attribute::contraceptive) {
            throw ConfigError(
                "fit_autocorrelation: sex-specific covariates cannot enter this model");
        }
    }

    const WeightMatrix weights = build_weight_matrix(network, weight_mode);
    const DesignMatrix design = dummy_design(cohort, covariates, /*intercept=*/true);

    AutocorrFit out;
    if (design.n_complete == cohort.size()) {
        out.fit = fit_spatial_lag(weights, outcome, design.X, design.column_names, method);
        out.n_used = cohort.size();
    } else if (method == AutocorrMethod::profile_ml) {
        throw NumericError(
            "fit_autocorrelation: profile_ml requires complete covariates (" +
            std::to_string(cohort.size() - design.n_complete) +
            " participants have missing values); drop the incomplete attributes or use "
            "lag_covariate_least_squares");
    } else {
        // Lag term from the full network; regression rows restricted to
        // complete cases.
        std::vector<Eigen::Index> rows;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (design.complete[static_cast<std::size_t>(i)]) rows.push_back(i);
        }
        const Eigen::VectorXd lag = weights.matrix * outcome;
        Eigen::MatrixXd Z(static_cast<Eigen::Index>(rows.size()), design.X.cols() + 1);
        Eigen::VectorXd y_sub(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Z(static_cast<Eigen::Index>(i), 0) = lag(rows[i]);
            Z.row(static_cast<Eigen::Index>(i)).tail(design.X.cols()) = design.X.row(rows[i]);
            y_sub(static_cast<Eigen::Index>(i)) = outcome(rows[i]);
        }
        OlsResult ols = ols_hc1(Z, y_sub);
        SpatialLagFit fit;
        fit.method = method;
        fit.weight_mode = weight_mode;
        fit.rho = ols.coefficients(0);
        fit.rho_std_error = std::sqrt(ols.robust_covariance(0, 0));
        fit.rho_p_value = wald_p(fit.rho, fit.rho_std_error);
        fit.beta = ols.coefficients.tail(design.X.cols());
        fit.beta_std_errors =
            ols.robust_covariance.bottomRightCorner(design.X.cols(), design.X.cols())
                .diagonal()
                .cwiseSqrt();
        fit.beta_p_values.resize(design.X.cols());
        for (Eigen::Index j = 0; j < design.X.cols(); ++j) {
            fit.beta_p_values(j) = wald_p(fit.beta(j), fit.beta_std_errors(j));
        }
        fit.column_names = design.column_names;
        fit.sigma2 = ols.residuals.squaredNorm() / static_cast<double>(rows.size() - Z.cols());
        out.fit = std::move(fit);
        out.n_used = rows.size();
        out.n_dropped_incomplete = cohort.size() - rows.size();
    }
    if (!weights.isolated.empty()) {
        out.notes.push_back(std::to_string(weights.isolated.size()) +
                            " isolated participants have an all-zero weight row");
    }
    out.notes.push_back(
        "covariate estimates are not individually interpretable in this model; read rho only");
    return out;
}

AutocorrFit fit_autocorrelation(const ContactNetwork& network, const Cohort& cohort,
                                TraitPhenotype trait, const std::vector<Attribute>& covariates,
                                WeightMode weight_mode, AutocorrMethod method) {
    const auto trait01 = trait_vector(cohort, trait);
    Eigen::VectorXd outcome(static_cast<Eigen::Index>(trait01.size()));
    for (std::size_t i = 0; i < trait01.size(); ++i) {
        outcome(static_cast<Eigen::Index>(i)) = trait01[i];
    }
    return fit_autocorrelation(network, cohort, outcome, covariates, weight_mode, method);
}

}  // namespace traitnet
