#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "traitnet/cohort.hpp"

namespace traitnet {

enum class TestKind { chi_square_yates, chi_square, fisher_exact, t_test, anova };

std::string_view test_kind_name(TestKind kind);

struct TestResult {
    TestKind kind;
    double statistic = 0.0;
    double p_value = 1.0;
    double df1 = 0.0;
    double df2 = 0.0;
};

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Pearson chi-square on an r x c table; Yates continuity correction applies
// to 2x2 only and clamps |ad-bc| - n/2 at zero.
TestResult chi_square_test(const CountMatrix& counts, bool yates);

// Conditional two-sided Fisher exact test for [[a, b], [c, d]]: sum of all
// hypergeometric table probabilities <= P(observed) * (1 + 1e-7).
TestResult fisher_exact_test(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);

TestResult welch_t_test(std::span<const double> group_a, std::span<const double> group_b);
TestResult pooled_t_test(std::span<const double> group_a, std::span<const double> group_b);
TestResult one_way_anova(const std::vector<std::vector<double>>& groups);

struct CrossTab {
    Attribute row_attribute;
    Attribute column_attribute;
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    CountMatrix counts;
    int positive_column = -1;              // column used for the prevalence percentages
    std::vector<double> prevalence_pct;    // per row, when positive_column >= 0
    TestKind test;
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    std::size_t n_included = 0;            // both variables non-missing
};

// Auto rule: 2x2 -> Yates chi-square, switching to Fisher exact when any
// expected cell is below 5; larger tables use the plain chi-square.
CrossTab cross_tab(const Cohort& cohort, Attribute row_attr, Attribute column_attr,
                   std::optional<TestKind> forced_test = std::nullopt);

}  // namespace traitnet
