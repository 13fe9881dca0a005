#include <doctest.h>

#include <algorithm>
#include <map>

#include "helpers.hpp"
#include "oracles.hpp"
#include "traitnet/permutation.hpp"

using namespace traitnet;

namespace {

CategoricalView binary_view(const std::vector<int>& codes) {
    CategoricalView view;
    view.attribute = Attribute::carriage_direct;
    view.labels = {"negative", "positive"};
    for (int c : codes) view.codes.push_back(c);
    return view;
}

}  // namespace

TEST_CASE("marginal shuffle preserves category counts exactly") {
    CategoricalView view = binary_view({1, 1, 0, 0, 0, -1, 1});
    auto gen = rng::replicate_stream(4, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto relabeled = randomize_attributes(view, NullMode::marginal_shuffle, gen);
        CHECK(std::count(relabeled.begin(), relabeled.end(), 1) == 3);
        CHECK(std::count(relabeled.begin(), relabeled.end(), 0) == 3);
        CHECK(relabeled[5] == -1);  // missing stays missing
    }
}

TEST_CASE("single-category attributes relabel to themselves under both modes") {
    CategoricalView view;
    view.attribute = Attribute::school;
    view.labels = {"H1"};
    view.codes = {0, 0, 0, -1, 0};
    auto gen = rng::replicate_stream(4, 1);
    CHECK(randomize_attributes(view, NullMode::marginal_shuffle, gen) == view.codes);
    CHECK(randomize_attributes(view, NullMode::probability_draw, gen) == view.codes);
}

TEST_CASE("probability draw matches the binomial expectation") {
    // 1000 nodes at empirical prevalence 0.3; mean positives over 1e4 draws
    // sits within a fraction of a count of 300.
    std::vector<int> codes(1000, 0);
    for (int i = 0; i < 300; ++i) codes[i] = 1;
    const CategoricalView view = binary_view(codes);
    auto gen = rng::replicate_stream(123, 5);
    double total_positives = 0.0;
    const int draws = 10000;
    for (int rep = 0; rep < draws; ++rep) {
        const auto relabeled = randomize_attributes(view, NullMode::probability_draw, gen);
        total_positives += std::count(relabeled.begin(), relabeled.end(), 1);
    }
    CHECK(std::abs(total_positives / draws - 300.0) < 5.0);
}

TEST_CASE("permutation test is reproducible bit for bit and across thread counts") {
    const Cohort cohort = helpers::simple_cohort(30, std::vector<int>{1, 0, 1, 1, 0, 0, 1, 0, 1, 0,
                                                                      1, 1, 0, 0, 1, 0, 1, 0, 1, 0,
                                                                      0, 0, 1, 1, 0, 1, 0, 1, 0, 0});
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i + 1 < 30; ++i) edges.emplace_back(i, i + 1);
    const ContactNetwork net = helpers::network_of(30, edges);
    const auto view = categorical_view(cohort, Attribute::carriage_direct);

    const auto base = homophily_permutation_test(net, view, 400, 99, NullMode::marginal_shuffle, 1);
    for (int threads : {2, 4, 8}) {
        const auto again =
            homophily_permutation_test(net, view, 400, 99, NullMode::marginal_shuffle, threads);
        CHECK(again.sims.mean == base.sims.mean);
        CHECK(again.sims.sd == base.sims.sd);
        CHECK(again.sims.min == base.sims.min);
        CHECK(again.sims.max == base.sims.max);
        CHECK(again.p_value == base.p_value);
        CHECK(again.p_empirical == base.p_empirical);
    }
    CHECK(base.observed == same_attribute_edge_count(net, view));
    CHECK(base.sims.min <= base.sims.q1);
    CHECK(base.sims.q1 <= base.sims.median);
    CHECK(base.sims.median <= base.sims.q3);
    CHECK(base.sims.q3 <= base.sims.max);
}

TEST_CASE("probability-draw null mean matches the analytic expectation") {
    // Cycle on 100 nodes (m = 100 edges), prevalence exactly 0.5:
    // E[same] = m (p^2 + (1-p)^2) = 50.
    std::vector<int> codes(100);
    for (int i = 0; i < 100; ++i) codes[i] = i < 50 ? 1 : 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < 100; ++i) edges.emplace_back(std::min(i, (i + 1) % 100),
                                                               std::max(i, (i + 1) % 100));
    const ContactNetwork net = helpers::network_of(100, edges);
    const auto result = homophily_permutation_test(net, binary_view(codes), 4000, 11,
                                                   NullMode::probability_draw, 2);
    const double estimator_sd = result.sims.sd / std::sqrt(4000.0);
    CHECK(std::abs(result.sims.mean - 50.0) <= 2.0 * estimator_sd + 1e-9);
}

TEST_CASE("degenerate constant null yields p = 1 instead of an error") {
    // Single category: every probability_draw replicate equals the observed count.
    CategoricalView view;
    view.attribute = Attribute::school;
    view.labels = {"H1"};
    view.codes = {0, 0, 0, 0};
    const ContactNetwork net = helpers::network_of(4, {{0, 1}, {1, 2}, {2, 3}});
    const auto result =
        homophily_permutation_test(net, view, 100, 3, NullMode::probability_draw, 1);
    CHECK(result.sims.sd == 0.0);
    CHECK(result.p_value == 1.0);
}

TEST_CASE("no eligible edges raises a degenerate-result error") {
    CategoricalView view = binary_view({-1, -1, 1, 0});
    const ContactNetwork net = helpers::network_of(4, {{0, 1}});
    CHECK_THROWS_AS(homophily_permutation_test(net, view, 10, 1, NullMode::marginal_shuffle, 1),
                    DegenerateError);
}

TEST_CASE("exact oracle on trivial fixtures") {
    // K2 with one + and one -: every arrangement has zero same edges.
    {
        const ContactNetwork net = helpers::network_of(2, {{0, 1}});
        const auto result = exact_permutation_pvalue(net, binary_view({1, 0}));
        CHECK(result.observed == 0);
        CHECK(result.n_arrangements == 2);
        CHECK(result.p_two_sided == 1.0);
    }
    // Path with labels +,+,-: tail over the 3 distinct arrangements is 2/3.
    {
        const ContactNetwork net = helpers::network_of(3, {{0, 1}, {1, 2}});
        const auto result = exact_permutation_pvalue(net, binary_view({1, 1, 0}));
        CHECK(result.observed == 1);
        CHECK(result.n_arrangements == 3);
        CHECK(result.tail_upper == doctest::Approx(2.0 / 3.0));
        CHECK(result.p_two_sided == 1.0);
    }
    // Star K_{1,3}, center + and leaves {+,-,-}: the same-count is constant 1.
    {
        const ContactNetwork net = helpers::network_of(4, {{0, 1}, {0, 2}, {0, 3}});
        const auto result = exact_permutation_pvalue(net, binary_view({1, 1, 0, 0}));
        CHECK(result.observed == 1);
        CHECK(result.n_arrangements == 6);
        CHECK(result.tail_upper == 1.0);
        CHECK(result.tail_lower == 1.0);
        CHECK(result.p_two_sided == 1.0);
    }
}

TEST_CASE("exact oracle matches an independent recursive enumeration") {
    auto gen = rng::replicate_stream(2024, 0);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 5 + static_cast<int>(gen.below(4));  // 5..8 nodes
        std::vector<int> codes(n);
        for (int i = 0; i < n; ++i) codes[i] = static_cast<int>(gen.below(3));
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        std::vector<std::pair<int, int>> oracle_edges;
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                if (gen.bernoulli(0.45)) {
                    edges.emplace_back(u, v);
                    oracle_edges.emplace_back(u, v);
                }
            }
        }
        if (edges.empty()) continue;
        CategoricalView view;
        view.attribute = Attribute::school;
        view.labels = {"a", "b", "c"};
        view.codes.assign(codes.begin(), codes.end());
        const ContactNetwork net = helpers::network_of(static_cast<std::uint32_t>(n), edges);
        const auto result = exact_permutation_pvalue(net, view);
        const auto expected =
            oracles::enumerate_same_count_tails(codes, oracle_edges, result.observed);
        CHECK(result.tail_upper == doctest::Approx(expected.tail_upper).epsilon(1e-12));
        CHECK(result.tail_lower == doctest::Approx(expected.tail_lower).epsilon(1e-12));
    }
}

TEST_CASE("exact oracle refuses more than 12 labeled nodes") {
    std::vector<int> codes(13, 0);
    codes[0] = 1;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges{{0, 1}};
    const ContactNetwork net = helpers::network_of(13, edges);
    CHECK_THROWS_AS(exact_permutation_pvalue(net, binary_view(codes)), SizeError);
}

TEST_CASE("Monte-Carlo empirical tail tracks the exact tail on a small graph") {
    const ContactNetwork net =
        helpers::network_of(9, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8},
                                {0, 8}, {2, 6}});
    const auto view = binary_view({1, 1, 1, 0, 0, 0, 1, 0, 0});
    const auto exact = exact_permutation_pvalue(net, view);
    const auto mc = homophily_permutation_test(net, view, 10000, 77, NullMode::marginal_shuffle, 2);
    const double se = std::sqrt(exact.tail_upper * (1.0 - exact.tail_upper) / 10000.0);
    CHECK(std::abs(mc.p_empirical - exact.tail_upper) <= 3.0 * se + 2.0 / 10001.0);
}

TEST_CASE("category transmission reduces to the restricted homophily test on the full cohort") {
    std::vector<int> trait_codes{1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0};
    const Cohort cohort = helpers::simple_cohort(12, trait_codes);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i + 1 < 12; ++i) edges.emplace_back(i, i + 1);
    edges.emplace_back(0, 6);
    edges.emplace_back(3, 9);
    const ContactNetwork net = helpers::network_of(12, edges);

    // A category every node belongs to.
    CategoricalView everyone;
    everyone.attribute = Attribute::school;
    everyone.labels = {"H1"};
    everyone.codes.assign(12, 0);

    const auto trait01 = trait_vector(cohort, TraitPhenotype::direct);
    const auto transmission = category_transmission_test(net, trait01, everyone, 0, 500, 31, 2);

    const auto trait_view = categorical_view(cohort, Attribute::carriage_direct);
    const auto restricted = homophily_permutation_test(net, trait_view, 500, 31,
                                                       NullMode::marginal_shuffle, 2,
                                                       trait_view.code_of("positive"));
    CHECK(transmission.observed == restricted.observed);
    CHECK(transmission.null_within_category.mean == restricted.sims.mean);
    CHECK(transmission.null_within_category.sd == restricted.sims.sd);
    CHECK(transmission.p_value == restricted.p_value);
    // The two nulls coincide in distribution when the category is everyone.
    CHECK(std::abs(transmission.null_whole_network.mean -
                   transmission.null_within_category.mean) <
          4.0 * transmission.null_within_category.sd / std::sqrt(500.0) + 1e-9);
}

TEST_CASE("category transmission flags categories without internal edges") {
    const Cohort cohort = helpers::simple_cohort(4, {1, 1, 0, 0});
    const ContactNetwork net = helpers::network_of(4, {{0, 2}, {1, 3}});
    CategoricalView view;
    view.attribute = Attribute::sex;
    view.labels = {"female", "male"};
    view.codes = {0, 0, 1, 1};
    const auto trait01 = trait_vector(cohort, TraitPhenotype::direct);
    CHECK_THROWS_AS(category_transmission_test(net, trait01, view, 0, 100, 1, 1), DegenerateError);
}

TEST_CASE("planted positive clustering is detected") {
    // Positives form a clique, negatives hang off separately.
    std::vector<int> trait_codes(20, 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < 8; ++i) {
        trait_codes[i] = 1;
        for (std::uint32_t j = i + 1; j < 8; ++j) edges.emplace_back(i, j);
    }
    for (std::uint32_t i = 8; i + 1 < 20; ++i) edges.emplace_back(i, i + 1);
    const Cohort cohort = helpers::simple_cohort(20, trait_codes);
    const ContactNetwork net = helpers::network_of(20, edges);
    const auto view = categorical_view(cohort, Attribute::carriage_direct);
    const auto result = homophily_permutation_test(net, view, 1000, 5, NullMode::marginal_shuffle, 2);
    CHECK(result.p_value < 0.001);
    CHECK(result.observed > result.sims.max);
}

TEST_CASE("missing labels drop out of the permutation problem") {
    CategoricalView view = binary_view({1, 0, -1, 1, 0});
    const ContactNetwork net =
        helpers::network_of(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 3}});
    const auto result = homophily_permutation_test(net, view, 200, 8, NullMode::marginal_shuffle, 1);
    CHECK(result.total_edges == 5);
    CHECK(result.eligible_edges == 3);  // edges touching node 2 are out
    CHECK(result.observed == same_attribute_edge_count(net, view));
}
