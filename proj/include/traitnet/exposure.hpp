#pragma once

#include <string>
#include <vector>

#include "traitnet/logistic.hpp"
#include "traitnet/network.hpp"

namespace traitnet {

// Univariable logistic fit of carrier status on the positive-friend count,
// with the derived quantities reported alongside the fitted response curve.
struct FriendExposureFit {
    TraitPhenotype trait;
    LogisticFit fit;  // coefficients: intercept, slope on positive friends
    double average_marginal_effect = 0.0;  // mean of p(k+1) - p(k) at observed k
    double ame_ci_low = 0.0, ame_ci_high = 0.0;
    double marginal_effect_at_mean = 0.0;

    struct CurvePoint {
        int k = 0;
        double probability = 0.0;
        std::size_t n_carriers = 0;
        std::size_t n_non_carriers = 0;
    };
    std::vector<CurvePoint> curve;  // k = 0..max observed

    struct CountSummary {
        double mean = 0, q1 = 0, median = 0, q3 = 0;
    };
    CountSummary carriers;       // positive-friend count among carriers
    CountSummary non_carriers;
};

FriendExposureFit carrier_vs_positive_friends(const ContactNetwork& network, const Cohort& cohort,
                                              TraitPhenotype trait);

// How "exposed through social interaction" is operationalized for the
// relative-risk table; recorded in the output metadata.
enum class ExposureDefinition { any_positive_friend, above_median_positive_friends };

std::string_view exposure_definition_name(ExposureDefinition def);
ExposureDefinition exposure_definition_from_name(std::string_view name);

struct CategoryRiskRow {
    std::string label;
    std::size_t n = 0;
    double exposed_pct = 0.0;
    double relative_risk = 1.0;
    double ci_low = 1.0, ci_high = 1.0;  // delta method on log RR
    double p_value = 1.0;                // Wald p of the category log-odds vs reference
    bool is_reference = false;
};

struct RelativeRiskTable {
    Attribute attribute;
    TraitPhenotype trait;
    ExposureDefinition exposure;
    std::vector<CategoryRiskRow> rows;
    std::size_t n_included = 0;
    std::vector<std::string> warnings;
};

RelativeRiskTable category_relative_risk(const ContactNetwork& network, const Cohort& cohort,
                                         Attribute risk_attribute, TraitPhenotype trait,
                                         ExposureDefinition exposure =
                                             ExposureDefinition::any_positive_friend);

}  // namespace traitnet
