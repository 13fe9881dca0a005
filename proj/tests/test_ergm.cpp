#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "traitnet/ergm.hpp"
#include "traitnet/rng.hpp"

using namespace traitnet;

namespace {

Cohort school_cohort(const std::vector<std::string>& schools) {
    std::vector<Participant> people;
    for (std::size_t i = 0; i < schools.size(); ++i) {
        Participant p = helpers::person("P" + std::to_string(i + 1),
                                        i % 2 ? Sex::male : Sex::female);
        if (!schools[i].empty()) p.school = schools[i];
        people.push_back(std::move(p));
    }
    return Cohort::from_participants(std::move(people));
}

}  // namespace

TEST_CASE("three nodes and one edge enumerate to the documented dyad rows") {
    const Cohort cohort = school_cohort({"H1", "H1", "H2"});
    const ContactNetwork net = helpers::network_of(3, {{0, 1}});
    const DyadDesign design = enumerate_dyads(net, cohort, {Attribute::school});
    CHECK(design.n_dyads == 3);
    // Row order (0,1), (0,2), (1,2).
    CHECK(design.response(0) == 1.0);
    CHECK(design.response(1) == 0.0);
    CHECK(design.response(2) == 0.0);
    CHECK(design.match(0, 0) == 1.0);  // same school
    CHECK(design.match(1, 0) == 0.0);
    CHECK(design.term_names == std::vector<std::string>{"edges", "match(school)"});
}

TEST_CASE("sex-match indicator fires exactly on equal-sex dyads") {
    const Cohort cohort = helpers::simple_cohort(4);  // F,M,F,M
    const ContactNetwork net = helpers::network_of(4, {});
    const DyadDesign design = enumerate_dyads(net, cohort, {Attribute::sex});
    // dyads: (0,1) FM, (0,2) FF, (0,3) FM, (1,2) MF, (1,3) MM, (2,3) FM
    CHECK(design.match(0, 0) == 0.0);
    CHECK(design.match(1, 0) == 1.0);
    CHECK(design.match(4, 0) == 1.0);
    CHECK(design.match(5, 0) == 0.0);
}

TEST_CASE("the published cohort size enumerates to 538203 dyads") {
    std::vector<std::string> schools(1038, "H1");
    const Cohort cohort = school_cohort(schools);
    const ContactNetwork net = helpers::network_of(1038, {{0, 1}});
    const DyadDesign design = enumerate_dyads(net, cohort, {});
    CHECK(design.n_dyads == 538203);
}

TEST_CASE("missing attribute values drop dyads from the fit") {
    const Cohort cohort = school_cohort({"H1", "H1", "", "H2", "H1", "H2"});
    const ContactNetwork net = helpers::network_of(6, {{0, 1}, {0, 3}, {2, 4}});
    const DyadDesign design = enumerate_dyads(net, cohort, {Attribute::school});
    CHECK(design.n_dyads == 15);
    // Dyad (0,2) = row 1 touches the unlabeled node.
    CHECK(design.missing(1, 0) == 1);
    CHECK(design.missing(0, 0) == 0);
    const DyadicErgmFit fit = fit_dyadic_ergm(net, cohort, {Attribute::school});
    CHECK(fit.n_dyads == 10);  // 5 pairs touch the unlabeled node
    CHECK(fit.n_dyads_excluded == 5);
    CHECK(fit.converged);
}

TEST_CASE("four-node fit matches the grid-search MLE oracle") {
    const Cohort cohort = school_cohort({"H1", "H1", "H2", "H2"});
    // Edges: one inside H1, one across.
    const ContactNetwork net = helpers::network_of(4, {{0, 1}, {1, 2}});
    const DyadicErgmFit fit = fit_dyadic_ergm(net, cohort, {Attribute::school});
    // Cells over the 6 dyads: match dyads {01, 23} with 1 edge; non-match 4 dyads, 1 edge.
    const auto oracle = oracles::grid_search_dyadic_mle({{1, 4}, {1, 2}});
    CHECK(fit.terms[0].estimate == doctest::Approx(oracle.edges).epsilon(1e-6));
    CHECK(fit.terms[1].estimate == doctest::Approx(oracle.match).epsilon(1e-6));
    CHECK(fit.terms[0].name == "edges");
}

TEST_CASE("fitted probabilities reproduce the observed edge count") {
    auto gen = rng::replicate_stream(8, 1);
    std::vector<std::string> schools;
    for (int i = 0; i < 40; ++i) schools.push_back("H" + std::to_string(gen.below(3)));
    const Cohort cohort = school_cohort(schools);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t u = 0; u < 40; ++u) {
        for (std::uint32_t v = u + 1; v < 40; ++v) {
            if (gen.bernoulli(schools[u] == schools[v] ? 0.25 : 0.05)) edges.emplace_back(u, v);
        }
    }
    const ContactNetwork net = helpers::network_of(40, edges);
    const DyadicErgmFit fit = fit_dyadic_ergm(net, cohort, {Attribute::school, Attribute::sex});
    CHECK(fit.converged);

    const DyadDesign design = enumerate_dyads(net, cohort, {Attribute::school, Attribute::sex});
    double expected_edges = 0.0;
    for (Eigen::Index i = 0; i < design.response.size(); ++i) {
        const double eta = fit.terms[0].estimate + fit.terms[1].estimate * design.match(i, 0) +
                           fit.terms[2].estimate * design.match(i, 1);
        expected_edges += logistic(eta);
    }
    CHECK(expected_edges ==
          doctest::Approx(static_cast<double>(net.edge_count())).epsilon(1e-6));
}

TEST_CASE("estimates are invariant under node relabeling") {
    auto gen = rng::replicate_stream(44, 0);
    std::vector<std::string> schools;
    for (int i = 0; i < 24; ++i) schools.push_back("H" + std::to_string(gen.below(2)));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t u = 0; u < 24; ++u) {
        for (std::uint32_t v = u + 1; v < 24; ++v) {
            if (gen.bernoulli(schools[u] == schools[v] ? 0.3 : 0.08)) edges.emplace_back(u, v);
        }
    }
    // Permute node identities.
    std::vector<std::uint32_t> perm(24);
    for (std::uint32_t i = 0; i < 24; ++i) perm[i] = i;
    rng::shuffle(perm, gen);
    std::vector<std::string> schools_perm(24);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_perm;
    for (std::uint32_t i = 0; i < 24; ++i) schools_perm[perm[i]] = schools[i];
    for (auto [u, v] : edges) edges_perm.emplace_back(perm[u], perm[v]);

    const DyadicErgmFit a = fit_dyadic_ergm(helpers::network_of(24, edges),
                                            school_cohort(schools), {Attribute::school});
    const DyadicErgmFit b = fit_dyadic_ergm(helpers::network_of(24, edges_perm),
                                            school_cohort(schools_perm), {Attribute::school});
    CHECK(a.terms[0].estimate == doctest::Approx(b.terms[0].estimate).epsilon(1e-9));
    CHECK(a.terms[1].estimate == doctest::Approx(b.terms[1].estimate).epsilon(1e-9));
}

TEST_CASE("separate fits produce one model per attribute") {
    const Cohort cohort = school_cohort({"H1", "H1", "H2", "H2", "H1", "H2"});
    const ContactNetwork net = helpers::network_of(6, {{0, 1}, {0, 4}, {2, 3}, {1, 2}});
    const auto fits = fit_dyadic_ergm_separate(net, cohort, {Attribute::school, Attribute::sex});
    REQUIRE(fits.size() == 2);
    CHECK(fits[0].terms.size() == 2);
    CHECK(fits[1].terms[1].name == "match(sex)");
}

TEST_CASE("an edgeless network cannot be fit") {
    const Cohort cohort = school_cohort({"H1", "H2"});
    const ContactNetwork net = helpers::network_of(2, {});
    CHECK_THROWS_AS(fit_dyadic_ergm(net, cohort, {Attribute::school}), DegenerateError);
}

TEST_CASE("a saturated match cell raises the separation diagnostic") {
    // Every same-school dyad is an edge and no cross-school edge exists.
    const Cohort cohort = school_cohort({"H1", "H1", "H1", "H2", "H2", "H2"});
    const ContactNetwork net =
        helpers::network_of(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
    CHECK_THROWS_WITH_AS(fit_dyadic_ergm(net, cohort, {Attribute::school}),
                         doctest::Contains("separation"), NumericError);
}

TEST_CASE("duplicated attributes raise the collinearity diagnostic") {
    auto gen = rng::replicate_stream(12, 0);
    std::vector<std::string> schools;
    for (int i = 0; i < 20; ++i) schools.push_back("H" + std::to_string(gen.below(2)));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t u = 0; u < 20; ++u) {
        for (std::uint32_t v = u + 1; v < 20; ++v) {
            if (gen.bernoulli(schools[u] == schools[v] ? 0.4 : 0.1)) edges.emplace_back(u, v);
        }
    }
    const ContactNetwork net = helpers::network_of(20, edges);
    CHECK_THROWS_WITH_AS(
        fit_dyadic_ergm(net, school_cohort(schools), {Attribute::school, Attribute::school}),
        doctest::Contains("match(school)"), NumericError);
}

TEST_CASE("independent edges recover a pure edges effect with a null match term") {
    // Edges placed iid with probability 1/(1+e^8); no attribute effect.
    const double theta = -8.0;
    const std::uint32_t n = 600;
    std::vector<std::string> schools;
    auto gen = rng::replicate_stream(123, 9);
    for (std::uint32_t i = 0; i < n; ++i) schools.push_back("H" + std::to_string(gen.below(4)));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    const double p = 1.0 / (1.0 + std::exp(8.0));
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v) {
            if (gen.bernoulli(p)) edges.emplace_back(u, v);
        }
    }
    const ContactNetwork net = helpers::network_of(n, edges);
    const DyadicErgmFit fit = fit_dyadic_ergm(net, school_cohort(schools), {Attribute::school});
    CHECK(std::abs(fit.terms[0].estimate - theta) <= 2.0 * fit.terms[0].std_error);
    CHECK(std::abs(fit.terms[1].estimate) <= 2.0 * fit.terms[1].std_error);
}
