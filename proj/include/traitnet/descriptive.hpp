#pragma once

#include <array>
#include <string>
#include <vector>

#include "traitnet/network.hpp"
#include "traitnet/stats.hpp"

namespace traitnet {

struct CategoryPopularity {
    std::string label;
    std::size_t n = 0;
    double mean_popularity = 0.0;
    double isolation_share_pct = 0.0;  // share of all never-nominated participants
    double frequency_pct = 0.0;        // share of participants with a non-missing value
};

struct PopularityByCategory {
    Attribute attribute;
    Layer layer = Layer::overall;
    double overall_mean = 0.0;
    std::size_t n_never_nominated = 0;
    std::vector<CategoryPopularity> categories;
    TestKind test;  // t_test for two categories, anova beyond
    double statistic = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
    double p_value = 1.0;
    std::vector<std::string> warnings;
};

// Mean nominator count per category; Welch t for two categories (pooled on
// request, for the F = t^2 identity), one-way ANOVA beyond.
PopularityByCategory popularity_by_category(const Cohort& cohort,
                                            const std::vector<Nomination>& nominations,
                                            Attribute attr, Layer layer = Layer::overall,
                                            bool welch = true);

struct SameWeekRow {
    IsoWeek week;
    std::size_t n_participants = 0;
    double mean_same_week_pct = 0.0;
};

struct SameWeekReport {
    std::vector<SameWeekRow> weeks;
    double weighted_average_pct = 0.0;  // participant-weighted over all weeks
    std::size_t n_participants_included = 0;
    std::size_t n_skipped = 0;
    std::vector<std::string> warnings;
};

// Per participant: fraction of nominated friends sharing their attendance
// week. Participants without a week, without nominations, or whose friends all
// lack weeks are skipped with a warning.
SameWeekReport same_week_friend_proportion(const Cohort& cohort,
                                           const std::vector<Nomination>& nominations);

struct RepresentativenessSummary {
    std::array<std::size_t, 11> histogram{};  // scores 0..10
    std::size_t n_scored = 0;
    double mean = 0.0;
    double fraction_at_least_5_pct = 0.0;
};

RepresentativenessSummary representativeness_summary(const Cohort& cohort);

}  // namespace traitnet
