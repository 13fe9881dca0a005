#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "helpers.hpp"
#include "traitnet/autocorr.hpp"
#include "traitnet/ingest.hpp"
#include "traitnet/permutation.hpp"
#include "traitnet/synth.hpp"

using namespace traitnet;

namespace {

CohortConfig small_config(std::uint64_t seed) {
    CohortConfig config;
    config.n = 200;
    config.seed = seed;
    config.mean_out_nominations = 3.5;
    config.schools = {{"H1", 120, {}}, {"H2", 80, {}}};
    config.within_school_bias = 8.0;
    config.attribute_specs = {
        {Attribute::sex, {0.5, 0.5}, 1.0, 0.0},
        {Attribute::smoking, {0.1, 0.2, 0.7}, 1.0, 0.05},
    };
    config.prevalence_direct = 0.3;
    config.prevalence_enrichment = 0.4;
    return config;
}

}  // namespace

TEST_CASE("config validation rejects inconsistent settings") {
    CohortConfig config = small_config(1);
    config.schools[0].size = 10;  // sizes no longer sum to n
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config = small_config(1);
    config.attribute_specs[0].probabilities = {0.7, 0.7};
    CHECK_THROWS_AS(config.validate(), ConfigError);

    config = small_config(1);
    config.nomination_cap = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("two-person cohort produces at most two within-school nominations") {
    CohortConfig config;
    config.n = 2;
    config.seed = 9;
    config.mean_out_nominations = 1.0;
    config.schools = {{"H1", 2, {}}};
    const GeneratedCohort generated = generate_cohort(config);
    CHECK(generated.nominations.size() <= 2);
    for (const Nomination& nom : generated.nominations) {
        CHECK(nom.from != nom.to);
        CHECK(generated.cohort.participant(nom.from).school == "H1");
    }
}

TEST_CASE("generation is deterministic in the config") {
    const GeneratedCohort a = generate_cohort(small_config(33));
    const GeneratedCohort b = generate_cohort(small_config(33));
    std::ostringstream csv_a, csv_b, noms_a, noms_b;
    write_cohort_csv(a.cohort, csv_a);
    write_cohort_csv(b.cohort, csv_b);
    write_nominations_csv(a.cohort, a.nominations, noms_a);
    write_nominations_csv(b.cohort, b.nominations, noms_b);
    CHECK(csv_a.str() == csv_b.str());
    CHECK(noms_a.str() == noms_b.str());

    const GeneratedCohort c = generate_cohort(small_config(34));
    std::ostringstream csv_c;
    write_cohort_csv(c.cohort, csv_c);
    CHECK(csv_a.str() != csv_c.str());
}

TEST_CASE("nomination cap holds and no self-nominations appear") {
    CohortConfig config = small_config(5);
    config.mean_out_nominations = 9.0;  // far above the cap
    const GeneratedCohort generated = generate_cohort(config);
    std::map<std::uint32_t, std::size_t> out_counts;
    for (const Nomination& nom : generated.nominations) {
        CHECK(nom.from != nom.to);
        ++out_counts[nom.from];
    }
    for (const auto& [from, count] : out_counts) CHECK(count <= 5);
}

TEST_CASE("generated attribute frequencies track the specs within 3 binomial SEs") {
    const CohortConfig config = small_config(77);
    const GeneratedCohort generated = generate_cohort(config);
    const auto view = categorical_view(generated.cohort, Attribute::sex);
    const auto sizes = view.category_sizes();
    const double n = static_cast<double>(generated.cohort.size());
    const double se = std::sqrt(0.5 * 0.5 / n);
    CHECK(std::abs(static_cast<double>(sizes[0]) / n - 0.5) <= 3.0 * se);

    const auto trait = trait_vector(generated.cohort, TraitPhenotype::direct);
    double positives = 0;
    for (auto t : trait) positives += t;
    const double trait_se = std::sqrt(0.3 * 0.7 / n);
    CHECK(std::abs(positives / n - 0.3) <= 3.0 * trait_se);
}

TEST_CASE("without bias, school homophily matches random mixing") {
    CohortConfig config = small_config(101);
    config.within_school_bias = 1.0;
    config.n = 600;
    config.schools = {{"H1", 360, {}}, {"H2", 240, {}}};
    const GeneratedCohort generated = generate_cohort(config);
    const ContactNetwork net = build_network(generated.cohort, generated.nominations, Layer::overall);
    const double homophily =
        homophily_fraction(net, categorical_view(generated.cohort, Attribute::school));
    // Random-mixing expectation: sum_s (n_s/n) (n_s-1)/(n-1).
    const double expected =
        100.0 * (360.0 / 600.0 * 359.0 / 599.0 + 240.0 / 600.0 * 239.0 / 599.0);
    CHECK(std::abs(homophily - expected) < 6.0);  // Monte-Carlo slack
}

TEST_CASE("within-school bias raises homophily and the calibrator hits a target") {
    CohortConfig config = small_config(7);
    config.within_school_bias = 40.0;
    const GeneratedCohort biased = generate_cohort(config);
    const ContactNetwork net = build_network(biased.cohort, biased.nominations, Layer::overall);
    const double homophily =
        homophily_fraction(net, categorical_view(biased.cohort, Attribute::school));
    CHECK(homophily > 75.0);

    const CohortConfig tuned = calibrate_within_school_bias(small_config(7), 80.0, 1.0, 500.0);
    const GeneratedCohort generated = generate_cohort(tuned);
    const double tuned_homophily = homophily_fraction(
        build_network(generated.cohort, generated.nominations, Layer::overall),
        categorical_view(generated.cohort, Attribute::school));
    CHECK(std::abs(tuned_homophily - 80.0) < 3.0);
}

TEST_CASE("attribute homophily weights cluster the attribute along edges") {
    CohortConfig config = small_config(13);
    config.attribute_specs[0].homophily_weight = 25.0;  // sex
    const GeneratedCohort generated = generate_cohort(config);
    const ContactNetwork net = build_network(generated.cohort, generated.nominations, Layer::overall);
    const double homophily =
        homophily_fraction(net, categorical_view(generated.cohort, Attribute::sex));
    CHECK(homophily > 75.0);  // random mixing would sit near 50
}

TEST_CASE("context flags follow their probabilities") {
    CohortConfig config = small_config(21);
    config.context_flag_probabilities = {1.0, 0.0, 0.5, 0.0, 0.0};
    const GeneratedCohort generated = generate_cohort(config);
    std::size_t physical = 0, school = 0;
    for (const Nomination& nom : generated.nominations) {
        physical += nom.contexts.contains(Layer::physical);
        school += nom.contexts.contains(Layer::school);
    }
    CHECK(physical == generated.nominations.size());
    CHECK(school == 0);
}

TEST_CASE("survey-shaped config reproduces the survey scale") {
    const CohortConfig config = survey_shaped_config(3);
    config.validate();
    std::uint32_t total = 0;
    for (const auto& school : config.schools) total += school.size;
    CHECK(total == 1038);
    const GeneratedCohort generated = generate_cohort(config);
    CHECK(generated.cohort.size() == 1038);
    const ContactNetwork net = build_network(generated.cohort, generated.nominations, Layer::overall);
    CHECK(net.edge_count() > 2500);
    // Attendance weeks were assigned inside each school's plan.
    const auto& p0 = generated.cohort.participant(0);
    CHECK(p0.school == "H1");
    CHECK(p0.attendance_week.has_value());
    CHECK(p0.attendance_week->year == 2010);
}

TEST_CASE("plant_contagion with rho 0 leaves the trait unassociated with the network") {
    const CohortConfig config = small_config(55);
    const GeneratedCohort generated = generate_cohort(config);
    const ContactNetwork net = build_network(generated.cohort, generated.nominations, Layer::overall);
    const Eigen::MatrixXd no_covariates(static_cast<Eigen::Index>(net.node_count()), 0);
    const PlantResult planted = plant_contagion(net, 0.0, 0.3, no_covariates, Eigen::VectorXd(0),
                                                99, ContagionMechanism::threshold);
    CategoricalView view;
    view.attribute = Attribute::carriage_direct;
    view.labels = {"negative", "positive"};
    for (auto t : planted.trait) view.codes.push_back(t);
    const auto test = homophily_permutation_test(net, view, 600, 5, NullMode::marginal_shuffle, 2);
    CHECK(test.p_value > 0.01);
    const double assort = nominal_assortativity(net, view);
    CHECK(std::abs(assort) < 0.1);
}

TEST_CASE("planted contagion is recovered by the lag regression without material bias") {
    const CohortConfig config = survey_shaped_config(8);
    const GeneratedCohort generated = generate_cohort(config);
    const ContactNetwork net = build_network(generated.cohort, generated.nominations, Layer::overall);
    const Eigen::MatrixXd no_covariates(static_cast<Eigen::Index>(net.node_count()), 0);
    const double rho = 0.05;
    double mean_estimate = 0.0;
    const int replicates = 12;
    for (int rep = 0; rep < replicates; ++rep) {
        const PlantResult planted =
            plant_contagion(net, rho, 0.3, no_covariates, Eigen::VectorXd(0),
                            1000 + static_cast<std::uint64_t>(rep), ContagionMechanism::threshold);
        Eigen::VectorXd outcome(static_cast<Eigen::Index>(planted.trait.size()));
        for (std::size_t i = 0; i < planted.trait.size(); ++i) {
            outcome(static_cast<Eigen::Index>(i)) = planted.trait[i];
        }
        const AutocorrFit fit = fit_autocorrelation(net, generated.cohort, outcome, {});
        mean_estimate += fit.fit.rho;
    }
    mean_estimate /= replicates;
    // Dependence inflates per-replicate spread, so the check targets the mean.
    CHECK(std::abs(mean_estimate - rho) < 0.02);
}

TEST_CASE("extreme planted contagion concentrates positives") {
    const CohortConfig config = survey_shaped_config(9);
    const GeneratedCohort generated = generate_cohort(config);
    const ContactNetwork net = build_network(generated.cohort, generated.nominations, Layer::overall);
    const Eigen::MatrixXd no_covariates(static_cast<Eigen::Index>(net.node_count()), 0);
    // Deep in the supercritical regime (rho * mean degree well above 1) the
    // Gibbs dynamics phase-separate and positives clump together.
    const PlantResult planted = plant_contagion(net, 0.45, 0.3, no_covariates, Eigen::VectorXd(0),
                                                5, ContagionMechanism::threshold);
    CategoricalView view;
    view.attribute = Attribute::carriage_direct;
    view.labels = {"negative", "positive"};
    for (auto t : planted.trait) view.codes.push_back(t);
    CHECK(nominal_assortativity(net, view) > 0.5);
}

TEST_CASE("sar mechanism thresholds the equilibrium at the requested prevalence") {
    const CohortConfig config = small_config(61);
    const GeneratedCohort generated = generate_cohort(config);
    const ContactNetwork net = build_network(generated.cohort, generated.nominations, Layer::overall);
    const Eigen::MatrixXd no_covariates(static_cast<Eigen::Index>(net.node_count()), 0);
    const PlantResult planted = plant_contagion(net, 0.04, 0.3, no_covariates, Eigen::VectorXd(0),
                                                17, ContagionMechanism::sar);
    double positives = 0;
    for (auto t : planted.trait) positives += t;
    CHECK(positives / static_cast<double>(planted.trait.size()) == doctest::Approx(0.3).epsilon(0.02));
    CHECK(planted.mechanism == ContagionMechanism::sar);
}

TEST_CASE("planted_rho in the config rewires the direct phenotype") {
    // rho * mean degree stays below 1: the autologistic is single-phase and
    // the prevalence calibration can actually land.
    CohortConfig config = small_config(71);
    config.planted_rho = 0.15;
    const GeneratedCohort generated = generate_cohort(config);
    const ContactNetwork net = build_network(generated.cohort, generated.nominations, Layer::overall);
    const auto view = categorical_view(generated.cohort, Attribute::carriage_direct);
    CHECK(nominal_assortativity(net, view) > 0.1);
}
