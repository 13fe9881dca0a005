#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "traitnet/ingest.hpp"
#include "traitnet/network.hpp"

namespace traitnet {

// Per-attribute generation recipe: category probabilities in the label order
// of categorical_view, a same-value nomination weight multiplier, and an
// independent missingness rate.
struct AttributeSpec {
    Attribute attribute;
    std::vector<double> probabilities;
    double homophily_weight = 1.0;
    double missing_rate = 0.0;
};

struct SchoolSpec {
    std::string id;
    std::uint32_t size = 0;
    std::vector<std::pair<IsoWeek, std::uint32_t>> attendance;  // optional week plan
};

enum class ContagionMechanism { sar, threshold };

std::string_view contagion_mechanism_name(ContagionMechanism mechanism);
ContagionMechanism contagion_mechanism_from_name(std::string_view name);

struct CohortConfig {
    std::uint32_t n = 0;
    std::vector<SchoolSpec> schools;
    std::uint32_t nomination_cap = 5;
    double mean_out_nominations = 4.0;
    double within_school_bias = 1.0;
    std::vector<AttributeSpec> attribute_specs;
    double prevalence_direct = 0.3;
    double prevalence_enrichment = 0.426;
    std::optional<double> planted_rho;
    ContagionMechanism planted_mechanism = ContagionMechanism::threshold;
    std::array<double, kContextCount> context_flag_probabilities{0.75, 0.79, 0.16, 0.33, 0.29};
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

struct GeneratedCohort {
    Cohort cohort;
    std::vector<Nomination> nominations;
};

// Deterministic in the config (seed included). Out-degree is a capped Poisson
// draw; targets are sampled without replacement with weight proportional to
// within_school_bias for same-school pairs times the per-attribute homophily
// multipliers; context flags are independent per context.
GeneratedCohort generate_cohort(const CohortConfig& config);

struct PlantResult {
    std::vector<std::uint8_t> trait;
    ContagionMechanism mechanism;
    int iterations = 0;
    bool converged = false;
    double intercept = 0.0;  // calibrated base log-odds (threshold mechanism)
};

// Plants a contagious binary trait on a fixed network.
//  - sar: thresholds the simulate_autocorrelation equilibrium at the quantile
//    matching base_prevalence.
//  - threshold: sequential Bernoulli sweeps where each node's odds are
//    base_odds * exp(rho / (p0 (1 - p0)))^k for k currently-positive friends,
//    so rho reads as the probability increment per positive friend near p0;
//    the intercept is calibrated to base_prevalence by bisection.
PlantResult plant_contagion(const ContactNetwork& network, double rho, double base_prevalence,
                            const Eigen::MatrixXd& covariates, const Eigen::VectorXd& effects,
                            std::uint64_t seed, ContagionMechanism mechanism, int max_iterations = 80);

// The desk-scale stand-in for the restricted cohort: n = 1038, eight school
// blocks with the published attendance-week plan, survey-like attribute
// frequencies, and a within-school bias tuned for school homophily near 88%.
CohortConfig survey_shaped_config(std::uint64_t seed);

// Bisection on within_school_bias against the measured overall-layer school
// homophily; returns the tuned config.
CohortConfig calibrate_within_school_bias(CohortConfig config, double target_homophily_pct,
                                          double lo = 1.0, double hi = 2000.0, int iterations = 24);

}  // namespace traitnet
