#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "traitnet/design.hpp"
#include "traitnet/network.hpp"

namespace traitnet {

enum class WeightMode { raw_adjacency, row_normalized };

std::string_view weight_mode_name(WeightMode mode);
WeightMode weight_mode_from_name(std::string_view name);

struct WeightMatrix {
    WeightMode mode = WeightMode::raw_adjacency;
    Eigen::SparseMatrix<double> matrix;     // zero diagonal, symmetric support
    std::vector<std::uint32_t> isolated;    // zero-row nodes
};

WeightMatrix build_weight_matrix(const ContactNetwork& network, WeightMode mode);

// Real spectrum of W (raw W is symmetric; row-normalized W is similar to a
// symmetric matrix on its non-isolated block, padded with zeros).
Eigen::VectorXd weight_spectrum(const WeightMatrix& weights);

struct SimulationRecord {
    Eigen::VectorXd outcome;
    int iterations = 0;
    bool converged = false;
    double final_delta = 0.0;
    double spectral_radius = 0.0;  // of rho * W
};

// Iterates Y <- rho*W*Y + X*beta + eps (eps drawn once from `seed` and held
// fixed) until max |dY| < tolerance; the fixed point is the SAR equilibrium
// (I - rho W)^{-1}(X beta + eps). Refuses spectral radius >= 1 unless forced.
SimulationRecord simulate_autocorrelation(const WeightMatrix& weights, double rho,
                                          const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                                          double noise_sd, std::uint64_t seed,
                                          int max_iterations = 1000, double tolerance = 1e-10,
                                          bool force = false);

enum class AutocorrMethod { lag_covariate_least_squares, profile_ml };

std::string_view autocorr_method_name(AutocorrMethod method);
AutocorrMethod autocorr_method_from_name(std::string_view name);

struct SpatialLagFit {
    AutocorrMethod method;
    WeightMode weight_mode;
    double rho = 0.0;
    double rho_std_error = 0.0;
    double rho_p_value = 1.0;
    Eigen::VectorXd beta;
    Eigen::VectorXd beta_std_errors;
    Eigen::VectorXd beta_p_values;
    std::vector<std::string> column_names;
    double sigma2 = 0.0;
    bool converged = true;
    int iterations = 0;
    std::optional<double> log_likelihood;  // profile_ml only
};

// Real-valued estimation core.
//  - lag_covariate_least_squares: OLS of y on [W y, X] with HC1 robust SEs;
//    with raw adjacency the lag column is the positive-neighbor count, so rho
//    reads as outcome increment per additional positive neighbor.
//  - profile_ml: Gaussian SAR maximum likelihood; the profile over rho uses
//    log det(I - rho W) = sum log(1 - rho lambda_i) from the precomputed
//    spectrum, and SEs come from the full information matrix.
// `fixed_rho` skips estimation of rho and reduces to OLS of (y - rho W y) on X.
SpatialLagFit fit_spatial_lag(const WeightMatrix& weights, const Eigen::VectorXd& y,
                              const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                              AutocorrMethod method,
                              std::optional<double> fixed_rho = std::nullopt);

struct AutocorrFit {
    SpatialLagFit fit;
    std::size_t n_used = 0;  // rows entering the regression
    std::size_t n_dropped_incomplete = 0;
    std::vector<std::string> notes;  // e.g. the non-interpretable-beta flag
};

// Binary-trait front end: outcome must be a 0/1 vector over the cohort.
// Covariates are dummy-coded against the survey reference categories;
// sex-specific attributes (contraceptive) are rejected.
AutocorrFit fit_autocorrelation(const ContactNetwork& network, const Cohort& cohort,
                                const Eigen::VectorXd& outcome,
                                const std::vector<Attribute>& covariates,
                                WeightMode weight_mode = WeightMode::raw_adjacency,
                                AutocorrMethod method = AutocorrMethod::lag_covariate_least_squares);

AutocorrFit fit_autocorrelation(const ContactNetwork& network, const Cohort& cohort,
                                TraitPhenotype trait, const std::vector<Attribute>& covariates,
                                WeightMode weight_mode = WeightMode::raw_adjacency,
                                AutocorrMethod method = AutocorrMethod::lag_covariate_least_squares);

}  // namespace traitnet
