#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "traitnet/rng.hpp"
#include "traitnet/stats.hpp"

using namespace traitnet;

namespace {

CountMatrix table2x2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    CountMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("Yates chi-square clamps to zero on a balanced table") {
    const TestResult r = chi_square_test(table2x2(10, 10, 10, 10), true);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("Yates correction never exceeds the plain statistic") {
    auto gen = rng::replicate_stream(5, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto draw = [&] { return static_cast<std::int64_t>(gen.below(40) + 1); };
        const CountMatrix m = table2x2(draw(), draw(), draw(), draw());
        const TestResult yates = chi_square_test(m, true);
        const TestResult plain = chi_square_test(m, false);
        CHECK(yates.statistic <= plain.statistic + 1e-12);
        CHECK(yates.p_value >= plain.p_value - 1e-12);
    }
}

TEST_CASE("chi-square on the published sex-by-carriage margin") {
    // Male 193/337, female 122/386.
    const TestResult r = chi_square_test(table2x2(193, 337, 122, 386), true);
    CHECK(r.statistic == doctest::Approx(18.28420971032031).epsilon(1e-10));
    CHECK(r.p_value == doctest::Approx(1.9027785516424658e-05).epsilon(1e-8));
    const TestResult plain = chi_square_test(table2x2(193, 337, 122, 386), false);
    CHECK(plain.statistic == doctest::Approx(18.866253427395414).epsilon(1e-10));
}

TEST_CASE("chi-square on a 3x2 table") {
    CountMatrix m(3, 2);
    m << 30, 70, 45, 55, 28, 92;
    const TestResult r = chi_square_test(m, false);
    CHECK(r.df1 == 2.0);
    CHECK(r.statistic == doctest::Approx(12.050169269085648).epsilon(1e-10));
    CHECK(r.p_value == doctest::Approx(0.0024173469676510694).epsilon(1e-10));
}

TEST_CASE("Fisher exact on the diagonal table equals 2/252") {
    const TestResult r = fisher_exact_test(5, 0, 0, 5);
    CHECK(r.p_value == doctest::Approx(2.0 / 252.0).epsilon(1e-12));
}

TEST_CASE("Fisher exact matches frozen references") {
    CHECK(fisher_exact_test(3, 7, 9, 2).p_value ==
          doctest::Approx(0.02997312285237981).epsilon(1e-10));
    CHECK(fisher_exact_test(8, 2, 1, 5).p_value ==
          doctest::Approx(0.034965034965034975).epsilon(1e-10));
}

TEST_CASE("Fisher exact agrees with the rational-arithmetic oracle") {
    auto gen = rng::replicate_stream(99, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = static_cast<std::int64_t>(gen.below(9));
        const auto b = static_cast<std::int64_t>(gen.below(9));
        const auto c = static_cast<std::int64_t>(gen.below(9));
        const auto d = static_cast<std::int64_t>(gen.below(9));
        const double expected = oracles::fisher_exact_rational(a, b, c, d);
        const double actual = fisher_exact_test(a, b, c, d).p_value;
        CHECK(actual == doctest::Approx(expected).epsilon(1e-11));
    }
}

TEST_CASE("Welch t-test against a frozen reference") {
    const std::vector<double> a{2.1, 2.5, 2.9, 3.3, 1.9, 2.7};
    const std::vector<double> b{3.1, 3.9, 3.5, 4.4, 3.2};
    const TestResult welch = welch_t_test(a, b);
    CHECK(welch.statistic == doctest::Approx(-3.3006323820980588).epsilon(1e-10));
    CHECK(welch.p_value == doctest::Approx(0.009954936183441185).epsilon(1e-9));
    const TestResult pooled = pooled_t_test(a, b);
    CHECK(pooled.statistic == doctest::Approx(-3.312903704605148).epsilon(1e-10));
    CHECK(pooled.p_value == doctest::Approx(0.00904197065028784).epsilon(1e-9));
}

TEST_CASE("ANOVA against a frozen reference and the F = t^2 identity") {
    const std::vector<std::vector<double>> groups{{4.2, 5.1, 3.8, 4.9},
                                                  {5.5, 6.1, 5.9, 6.4, 5.2},
                                                  {4.8, 4.4, 5.0}};
    const TestResult anova = one_way_anova(groups);
    CHECK(anova.statistic == doctest::Approx(9.092610874848123).epsilon(1e-10));
    CHECK(anova.p_value == doctest::Approx(0.006911834536851592).epsilon(1e-9));

    // Two groups: F equals the square of the pooled t statistic.
    const std::vector<std::vector<double>> two{{4.2, 5.1, 3.8, 4.9}, {5.5, 6.1, 5.9, 6.4, 5.2}};
    const TestResult f = one_way_anova(two);
    const TestResult t = pooled_t_test(two[0], two[1]);
    CHECK(f.statistic == doctest::Approx(t.statistic * t.statistic).epsilon(1e-8));
    CHECK(f.p_value == doctest::Approx(t.p_value).epsilon(1e-8));
}

TEST_CASE("cross_tab auto rule and prevalence on the published margins") {
    // Cohort shaped to reproduce the published sex-by-carriage counts.
    std::vector<Participant> people;
    auto add = [&](int count, Sex sex, Carriage carriage) {
        for (int i = 0; i < count; ++i) {
            people.push_back(helpers::person("P" + std::to_string(people.size()), sex, carriage));
        }
    };
    add(193, Sex::male, Carriage::positive);
    add(337, Sex::male, Carriage::negative);
    add(122, Sex::female, Carriage::positive);
    add(386, Sex::female, Carriage::negative);
    const Cohort cohort = helpers::cohort_of(std::move(people));

    const CrossTab tab = cross_tab(cohort, Attribute::sex, Attribute::carriage_direct);
    CHECK(tab.test == TestKind::chi_square_yates);
    CHECK(tab.n_included == 1038);
    // Rows follow label order (female, male).
    CHECK(tab.prevalence_pct[0] == doctest::Approx(100.0 * 122 / 508).epsilon(1e-12));
    CHECK(tab.prevalence_pct[1] == doctest::Approx(100.0 * 193 / 530).epsilon(1e-12));
    CHECK(tab.prevalence_pct[1] == doctest::Approx(36.4).epsilon(1e-2));
    CHECK(tab.prevalence_pct[0] == doctest::Approx(24.0).epsilon(1e-2));
    CHECK(tab.p_value < 0.001);
}

TEST_CASE("cross_tab switches to Fisher when expected cells are small") {
    std::vector<Participant> people;
    for (int i = 0; i < 5; ++i) people.push_back(helpers::person("A" + std::to_string(i), Sex::female, Carriage::positive));
    for (int i = 0; i < 5; ++i) people.push_back(helpers::person("B" + std::to_string(i), Sex::male, Carriage::negative));
    const Cohort cohort = helpers::cohort_of(std::move(people));
    const CrossTab tab = cross_tab(cohort, Attribute::sex, Attribute::carriage_direct);
    CHECK(tab.test == TestKind::fisher_exact);
    CHECK(tab.p_value == doctest::Approx(2.0 / 252.0).epsilon(1e-12));
}

TEST_CASE("cross_tab rejects unsupported forcing") {
    const Cohort cohort = helpers::simple_cohort(12, {1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0});
    CHECK_THROWS_AS(cross_tab(cohort, Attribute::sex, Attribute::carriage_direct, TestKind::t_test),
                    UnsupportedError);
}
