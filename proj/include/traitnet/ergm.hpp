#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "traitnet/logistic.hpp"
#include "traitnet/network.hpp"

namespace traitnet {

// Dyad-independent ERGM reduced to its logistic form: one row per unordered
// node pair, response = edge present, predictors = intercept (edges term) and
// per-attribute endpoint-match indicators.
struct DyadDesign {
    std::vector<Attribute> attributes;
    std::vector<std::string> term_names;  // "edges", "match(<attr>)", ...
    std::uint64_t n_dyads = 0;
    Eigen::VectorXd response;                                // edge indicator per dyad
    Eigen::MatrixXd match;                                   // n_dyads x n_attributes, 0/1
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> missing;  // endpoint missing
};

DyadDesign enumerate_dyads(const ContactNetwork& network, const Cohort& cohort,
                           const std::vector<Attribute>& attributes);

struct ErgmTerm {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double p_value = 1.0;
    double homophily_pct = -1.0;  // same-attribute edge percentage; -1 for the edges term
};

struct DyadicErgmFit {
    std::vector<ErgmTerm> terms;  // edges first
    std::uint64_t n_dyads = 0;    // after missing-data exclusion
    std::uint64_t n_dyads_excluded = 0;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Joint fit over edges + one match term per attribute. Dyads missing any
// included attribute are dropped (complete-dyad analysis).
DyadicErgmFit fit_dyadic_ergm(const ContactNetwork& network, const Cohort& cohort,
                              const std::vector<Attribute>& attributes,
                              const LogisticOptions& options = {});

// One single-attribute model per attribute (edges + that match term).
std::vector<DyadicErgmFit> fit_dyadic_ergm_separate(const ContactNetwork& network,
                                                    const Cohort& cohort,
                                                    const std::vector<Attribute>& attributes,
                                                    const LogisticOptions& options = {});

}  // namespace traitnet
