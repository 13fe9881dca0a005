#include "traitnet/stats.hpp"

#include <algorithm>
#include <cmath>

#include "traitnet/special.hpp"

namespace traitnet {

std::string_view test_kind_name(TestKind kind) {
    switch (kind) {
        case TestKind::chi_square_yates: return "chi_square_yates";
        case TestKind::chi_square: return "chi_square";
        case TestKind::fisher_exact: return "fisher_exact";
        case TestKind::t_test: return "t_test";
        case TestKind::anova: return "anova";
    }
    return "?";
}

TestResult chi_square_test(const CountMatrix& counts, bool yates) {
    const auto r = counts.rows();
    const auto c = counts.cols();
    if (r < 2 || c < 2) throw DegenerateError("chi-square needs at least a 2x2 table");
    if (yates && (r != 2 || c != 2)) throw UnsupportedError("Yates correction is defined for 2x2 tables");

    const Eigen::VectorXd row_sums = counts.cast<double>().rowwise().sum();
    const Eigen::VectorXd col_sums = counts.cast<double>().colwise().sum();
    const double n = row_sums.sum();
    if (n <= 0 || (row_sums.array() <= 0).any() || (col_sums.array() <= 0).any()) {
        throw DegenerateError("chi-square: zero margin");
    }

    double statistic = 0.0;
    if (yates) {
        const double a = static_cast<double>(counts(0, 0));
        const double b = static_cast<double>(counts(0, 1));
        const double cc = static_cast<double>(counts(1, 0));
        const double d = static_cast<double>(counts(1, 1));
        const double corrected = std::max(0.0, std::abs(a * d - b * cc) - n / 2.0);
        statistic = n * corrected * corrected /
                    (row_sums(0) * row_sums(1) * col_sums(0) * col_sums(1));
    } else {
        for (Eigen::Index i = 0; i < r; ++i) {
            for (Eigen::Index j = 0; j < c; ++j) {
                const double expected = row_sums(i) * col_sums(j) / n;
                const double diff = static_cast<double>(counts(i, j)) - expected;
                statistic += diff * diff / expected;
            }
        }
    }
    const double df = static_cast<double>((r - 1) * (c - 1));
    TestResult out;
    out.kind = yates ? TestKind::chi_square_yates : TestKind::chi_square;
    out.statistic = statistic;
    out.df1 = df;
    out.p_value = special::chi_squared_sf(statistic, df);
    return out;
}

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

}  // namespace

TestResult fisher_exact_test(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    if (a < 0 || b < 0 || c < 0 || d < 0) throw ConfigError("fisher: negative count");
    const std::int64_t r1 = a + b;
    const std::int64_t r2 = c + d;
    const std::int64_t c1 = a + c;
    const std::int64_t n = r1 + r2;
    TestResult out;
    out.kind = TestKind::fisher_exact;
    out.statistic = static_cast<double>(a);
    if (n == 0 || r1 == 0 || r2 == 0 || c1 == 0 || c1 == n) {
        out.p_value = 1.0;  // degenerate margin: only one table is possible
        return out;
    }
    const std::int64_t k_min = std::max<std::int64_t>(0, c1 - r2);
    const std::int64_t k_max = std::min(r1, c1);
    const double log_denominator = log_choose(n, c1);
    const double log_p_observed = log_choose(r1, a) + log_choose(r2, c1 - a) - log_denominator;
    double p = 0.0;
    for (std::int64_t k = k_min; k <= k_max; ++k) {
        const double log_p_k = log_choose(r1, k) + log_choose(r2, c1 - k) - log_denominator;
        if (log_p_k <= log_p_observed + std::log1p(1e-7)) p += std::exp(log_p_k);
    }
    out.p_value = std::min(1.0, p);
    return out;
}

namespace {

struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double var = 0.0;  // sample variance (n-1 denominator)
};

Moments moments(std::span<const double> values) {
    Moments m;
    m.n = static_cast<double>(values.size());
    for (double v : values) m.mean += v;
    m.mean /= m.n;
    for (double v : values) m.var += (v - m.mean) * (v - m.mean);
    m.var = m.n > 1 ? m.var / (m.n - 1) : 0.0;
    return m;
}

}  // namespace

TestResult welch_t_test(std::span<const double> group_a, std::span<const double> group_b) {
    if (group_a.size() < 2 || group_b.size() < 2) throw DegenerateError("t-test needs >=2 values per group");
    const Moments a = moments(group_a);
    const Moments b = moments(group_b);
    const double va = a.var / a.n;
    const double vb = b.var / b.n;
    TestResult out;
    out.kind = TestKind::t_test;
    if (va + vb == 0.0) {
        out.statistic = 0.0;
        out.df1 = a.n + b.n - 2;
        out.p_value = a.mean == b.mean ? 1.0 : 0.0;
        return out;
    }
    out.statistic = (a.mean - b.mean) / std::sqrt(va + vb);
    out.df1 = (va + vb) * (va + vb) / (va * va / (a.n - 1) + vb * vb / (b.n - 1));
    out.p_value = special::t_two_sided_p(std::abs(out.statistic), out.df1);
    return out;
}

TestResult pooled_t_test(std::span<const double> group_a, std::span<const double> group_b) {
    if (group_a.size() < 2 || group_b.size() < 2) throw DegenerateError("t-test needs >=2 values per group");
    const Moments a = moments(group_a);
    const Moments b = moments(group_b);
    const double df = a.n + b.n - 2;
    const double pooled = ((a.n - 1) * a.var + (b.n - 1) * b.var) / df;
    TestResult out;
    out.kind = TestKind::t_test;
    out.df1 = df;
    if (pooled == 0.0) {
        out.statistic = 0.0;
        out.p_value = a.mean == b.mean ? 1.0 : 0.0;
        return out;
    }
    out.statistic = (a.mean - b.mean) / std::sqrt(pooled * (1.0 / a.n + 1.0 / b.n));
    out.p_value = special::t_two_sided_p(std::abs(out.statistic), df);
    return out;
}

TestResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DegenerateError("ANOVA needs >=2 groups");
    double grand_sum = 0.0;
    double n_total = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw DegenerateError("ANOVA needs >=2 values per group");
        for (double v : g) grand_sum += v;
        n_total += static_cast<double>(g.size());
    }
    const double grand_mean = grand_sum / n_total;
    double ss_between = 0.0;
    double ss_within = 0.0;
    for (const auto& g : groups) {
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= static_cast<double>(g.size());
        ss_between += static_cast<double>(g.size()) * (mean - grand_mean) * (mean - grand_mean);
        for (double v : g) ss_within += (v - mean) * (v - mean);
    }
    const double df1 = static_cast<double>(groups.size()) - 1.0;
    const double df2 = n_total - static_cast<double>(groups.size());
    TestResult out;
    out.kind = TestKind::anova;
    out.df1 = df1;
    out.df2 = df2;
    if (ss_within == 0.0) {
        out.statistic = ss_between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        out.p_value = ss_between == 0.0 ? 1.0 : 0.0;
        return out;
    }
    out.statistic = (ss_between / df1) / (ss_within / df2);
    out.p_value = special::f_sf(out.statistic, df1, df2);
    return out;
}

CrossTab cross_tab(const Cohort& cohort, Attribute row_attr, Attribute column_attr,
                   std::optional<TestKind> forced_test) {
    if (forced_test && (*forced_test == TestKind::t_test || *forced_test == TestKind::anova)) {
        throw UnsupportedError("cross_tab supports chi-square and Fisher tests only");
    }

    const CategoricalView rows = categorical_view(cohort, row_attr);
    const CategoricalView cols = categorical_view(cohort, column_attr);

    CrossTab tab;
    tab.row_attribute = row_attr;
    tab.column_attribute = column_attr;
    tab.row_labels = rows.labels;
    tab.column_labels = cols.labels;
    tab.counts = CountMatrix::Zero(static_cast<Eigen::Index>(rows.labels.size()),
                                   static_cast<Eigen::Index>(cols.labels.size()));
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const auto rc = rows.codes[i];
        const auto cc = cols.codes[i];
        if (rc < 0 || cc < 0) continue;
        ++tab.counts(rc, cc);
        ++tab.n_included;
    }
    if (tab.counts.rows() < 2 || tab.counts.cols() < 2) {
        throw DegenerateError("cross_tab: fewer than two observed categories on one margin");
    }

    for (std::size_t j = 0; j < cols.labels.size(); ++j) {
        if (cols.labels[j] == "positive") tab.positive_column = static_cast<int>(j);
    }
    if (tab.positive_column >= 0) {
        for (Eigen::Index i = 0; i < tab.counts.rows(); ++i) {
            const double row_total = static_cast<double>(tab.counts.row(i).sum());
            tab.prevalence_pct.push_back(
                row_total > 0
                    ? 100.0 * static_cast<double>(tab.counts(i, tab.positive_column)) / row_total
                    : 0.0);
        }
    }

    const bool is_2x2 = tab.counts.rows() == 2 && tab.counts.cols() == 2;
    TestKind kind;
    if (forced_test) {
        kind = *forced_test;
        if (kind == TestKind::fisher_exact && !is_2x2) {
            throw UnsupportedError("Fisher exact test is implemented for 2x2 tables only");
        }
    } else if (is_2x2) {
        const Eigen::VectorXd row_sums = tab.counts.cast<double>().rowwise().sum();
        const Eigen::VectorXd col_sums = tab.counts.cast<double>().colwise().sum();
        const double n = row_sums.sum();
        bool small_expected = false;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                if (row_sums(i) * col_sums(j) / n < 5.0) small_expected = true;
            }
        }
        kind = small_expected ? TestKind::fisher_exact : TestKind::chi_square_yates;
    } else {
        kind = TestKind::chi_square;
    }

    TestResult result;
    switch (kind) {
        case TestKind::fisher_exact:
            result = fisher_exact_test(tab.counts(0, 0), tab.counts(0, 1), tab.counts(1, 0),
                                       tab.counts(1, 1));
            break;
        case TestKind::chi_square_yates:
            result = chi_square_test(tab.counts, true);
            break;
        case TestKind::chi_square:
            result = chi_square_test(tab.counts, false);
            break;
        default:
            throw UnsupportedError("unsupported cross_tab test");
    }
    tab.test = result.kind;
    tab.statistic = result.statistic;
    tab.df = result.df1;
    tab.p_value = result.p_value;
    return tab;
}

}  // namespace traitnet
