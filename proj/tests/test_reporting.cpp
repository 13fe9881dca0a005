#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "helpers.hpp"
#include "traitnet/json_io.hpp"
#include "traitnet/parallel.hpp"

using namespace traitnet;

namespace {

PermutationTestResult small_permtest() {
    const Cohort cohort = helpers::simple_cohort(14, {1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 0, 1});
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i + 1 < 14; ++i) edges.emplace_back(i, i + 1);
    const ContactNetwork net = helpers::network_of(14, edges);
    return homophily_permutation_test(net, categorical_view(cohort, Attribute::carriage_direct),
                                      100, 4, NullMode::marginal_shuffle, 1);
}

}  // namespace

TEST_CASE("fnv1a64 digest is stable") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("traitnet") != fnv1a64_hex("TRAITNET"));
}

TEST_CASE("every serializer validates against its registered schema") {
    validate_output(to_json(small_permtest()));

    auto gen = rng::replicate_stream(404, 0);
    const Cohort cohort = helpers::simple_cohort(40, std::vector<int>(40, 0));
    std::vector<Participant> people = cohort.participants();
    for (std::size_t i = 0; i < people.size(); ++i) {
        people[i].carriage_direct = gen.bernoulli(0.4) ? Carriage::positive : Carriage::negative;
        people[i].representativeness = static_cast<int>(i % 11);
        people[i].attendance_week = IsoWeek{2010, 38};
    }
    const Cohort rich = helpers::cohort_of(std::move(people));
    validate_output(to_json(cross_tab(rich, Attribute::sex, Attribute::carriage_direct)));

    std::vector<Nomination> noms;
    for (std::uint32_t i = 0; i + 1 < 40; ++i) noms.push_back(helpers::nom(i, i + 1));
    for (std::uint32_t i = 0; i + 7 < 40; i += 3) noms.push_back(helpers::nom(i, i + 7));
    validate_output(to_json(popularity_by_category(rich, noms, Attribute::sex)));
    validate_output(to_json(same_week_friend_proportion(rich, noms)));
    validate_output(to_json(representativeness_summary(rich)));

    const ContactNetwork net = build_network(rich, noms, Layer::overall);
    validate_output(to_json(fit_dyadic_ergm(net, rich, {Attribute::sex}), true));
    validate_output(to_json(fit_autocorrelation(net, rich, TraitPhenotype::direct, {}),
                            TraitPhenotype::direct));
    validate_output(to_json(carrier_vs_positive_friends(net, rich, TraitPhenotype::direct)));
    validate_output(
        to_json(category_relative_risk(net, rich, Attribute::sex, TraitPhenotype::direct)));
    validate_output(to_json(survey_shaped_config(1)));
}

TEST_CASE("schema validation rejects missing and mistyped fields") {
    Json doc = to_json(small_permtest());
    Json broken = doc;
    broken.erase("p_value");
    CHECK_THROWS_AS(validate_output(broken), ConfigError);

    broken = doc;
    broken["n_sims"] = "a lot";
    CHECK_THROWS_AS(validate_output(broken), ConfigError);

    broken = doc;
    broken["mode"] = "coin_flip";
    CHECK_THROWS_AS(validate_output(broken), ConfigError);

    broken = doc;
    broken["p_value"] = 1.7;  // outside [0,1]
    CHECK_THROWS_AS(validate_output(broken), ConfigError);

    Json unknown{{"schema", "traitnet.unknown.v1"}};
    CHECK_THROWS_AS(validate_output(unknown), ConfigError);
}

TEST_CASE("cohort config survives a JSON round trip") {
    const CohortConfig config = survey_shaped_config(12345);
    const Json doc = to_json(config);
    const CohortConfig back = cohort_config_from_json(doc);
    CHECK(back.n == config.n);
    CHECK(back.seed == config.seed);
    CHECK(back.schools.size() == config.schools.size());
    CHECK(back.schools[2].attendance == config.schools[2].attendance);
    CHECK(back.attribute_specs.size() == config.attribute_specs.size());
    CHECK(back.attribute_specs[0].probabilities == config.attribute_specs[0].probabilities);
    CHECK(back.within_school_bias == config.within_school_bias);
    CHECK(back.context_flag_probabilities == config.context_flag_probabilities);
    // And generation agrees bit for bit.
    std::ostringstream a, b;
    write_cohort_csv(generate_cohort(config).cohort, a);
    write_cohort_csv(generate_cohort(back).cohort, b);
    CHECK(a.str() == b.str());
}

TEST_CASE("manifest identity ignores threads but tracks parameters and seed") {
    const std::string path = "/tmp/traitnet_manifest_input.csv";
    write_text_file(path, "id,sex,carriage_direct,carriage_enrichment\nP1,female,positive,negative\n");
    const Json params{{"attribute", "sex"}, {"n_sims", 100}};
    const RunManifest a = make_manifest("homophily", params, {path}, 7, true, 1);
    const RunManifest b = make_manifest("homophily", params, {path}, 7, true, 8);
    CHECK(a.run_id == b.run_id);
    const RunManifest c = make_manifest("homophily", params, {path}, 8, true, 1);
    CHECK(a.run_id != c.run_id);
    const RunManifest d = make_manifest("homophily", Json{{"attribute", "school"}, {"n_sims", 100}},
                                        {path}, 7, true, 1);
    CHECK(a.run_id != d.run_id);
    validate_output(a.to_json());

    // Changing the input bytes changes the identity.
    write_text_file(path, "id,sex,carriage_direct,carriage_enrichment\nP1,male,positive,negative\n");
    const RunManifest e = make_manifest("homophily", params, {path}, 7, true, 1);
    CHECK(a.run_id != e.run_id);
}

TEST_CASE("thread count resolution: explicit beats the environment, default is one") {
    ::setenv("TRAITNET_THREADS", "6", 1);
    CHECK(resolve_thread_count(0) == 6);
    CHECK(resolve_thread_count(3) == 3);
    ::unsetenv("TRAITNET_THREADS");
    CHECK(resolve_thread_count(0) == 1);
}
