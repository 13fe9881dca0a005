#include "traitnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "traitnet/autocorr.hpp"
#include "traitnet/logistic.hpp"
#include "traitnet/rng.hpp"

namespace traitnet {

std::string_view contagion_mechanism_name(ContagionMechanism mechanism) {
    return mechanism == ContagionMechanism::sar ? "sar" : "threshold";
}

ContagionMechanism contagion_mechanism_from_name(std::string_view name) {
    if (name == "sar") return ContagionMechanism::sar;
    if (name == "threshold") return ContagionMechanism::threshold;
    throw ConfigError("unknown contagion mechanism '" + std::string(name) + "'");
}

void CohortConfig::validate() const {
    if (n == 0) throw ConfigError("config: n must be positive");
    if (nomination_cap < 1) throw ConfigError("config: nomination_cap must be >= 1");
    if (mean_out_nominations < 0) throw ConfigError("config: mean_out_nominations must be >= 0");
    if (within_school_bias <= 0) throw ConfigError("config: within_school_bias must be positive");
    std::uint64_t total = 0;
    for (const SchoolSpec& s : schools) {
        total += s.size;
        std::uint64_t weeks = 0;
        for (const auto& [week, count] : s.attendance) weeks += count;
        if (!s.attendance.empty() && weeks != s.size) {
            throw ConfigError("config: attendance counts for school '" + s.id +
                              "' do not sum to its size");
        }
    }
    if (!schools.empty() && total != n) {
        throw ConfigError("config: school sizes sum to " + std::to_string(total) + ", expected " +
                          std::to_string(n));
    }
    auto check_probability = [](double p, const char* name) {
        if (p < 0.0 || p > 1.0) throw ConfigError(std::string("config: ") + name + " outside [0,1]");
    };
    check_probability(prevalence_direct, "prevalence_direct");
    check_probability(prevalence_enrichment, "prevalence_enrichment");
    for (double p : context_flag_probabilities) check_probability(p, "context flag probability");
    for (const AttributeSpec& spec : attribute_specs) {
        if (spec.probabilities.empty()) {
            throw ConfigError("config: attribute '" + std::string(attribute_name(spec.attribute)) +
                              "' has no category probabilities");
        }
        double sum = 0.0;
        for (double p : spec.probabilities) {
            check_probability(p, "attribute category probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ConfigError("config: probabilities for '" +
                              std::string(attribute_name(spec.attribute)) + "' sum to " +
                              std::to_string(sum));
        }
        if (spec.homophily_weight <= 0.0) {
            throw ConfigError("config: homophily weight must be positive");
        }
        check_probability(spec.missing_rate, "missing rate");
    }
}

namespace {

int draw_category(const std::vector<double>& probabilities, rng::SplitMix64& gen) {
    const double u = gen.uniform01();
    double acc = 0.0;
    for (std::size_t c = 0; c < probabilities.size(); ++c) {
        acc += probabilities[c];
        if (u < acc) return static_cast<int>(c);
    }
    return static_cast<int>(probabilities.size()) - 1;
}

// Per-attribute generated codes indexed [attribute_spec][participant].
struct DrawnAttributes {
    std::vector<std::vector<int>> codes;  // -1 missing
};

void assign_attribute(Participant& p, Attribute attr, int code) {
    switch (attr) {
        case Attribute::sex: p.sex = static_cast<Sex>(code); break;
        case Attribute::study_program: p.study_program = static_cast<StudyProgram>(code); break;
        case Attribute::bmi_category: p.bmi_category = static_cast<BmiCategory>(code); break;
        case Attribute::smoking: p.smoking = static_cast<UseFrequency>(code); break;
        case Attribute::snuff: p.snuff = static_cast<UseFrequency>(code); break;
        case Attribute::alcohol: p.alcohol = static_cast<AlcoholUse>(code); break;
        case Attribute::physical_activity: p.physical_activity = static_cast<ActivityLevel>(code); break;
        case Attribute::contraceptive: p.contraceptive = static_cast<Contraceptive>(code); break;
        case Attribute::spa_type: p.spa_type = "t" + std::to_string(100 + code); break;
        case Attribute::school:
        case Attribute::carriage_direct:
        case Attribute::carriage_enrichment:
            throw ConfigError("attribute '" + std::string(attribute_name(attr)) +
                              "' is generated structurally, not from a spec");
    }
}

}  // namespace

GeneratedCohort generate_cohort(const CohortConfig& config) {
    config.validate();
    rng::SplitMix64 gen = rng::replicate_stream(config.seed, 0);

    std::vector<Participant> participants(config.n);
    std::vector<int> school_of(config.n, -1);

    // Schools and attendance weeks in block order.
    std::uint32_t cursor = 0;
    for (std::size_t s = 0; s < config.schools.size(); ++s) {
        const SchoolSpec& school = config.schools[s];
        std::vector<IsoWeek> weeks;
        for (const auto& [week, count] : school.attendance) {
            for (std::uint32_t i = 0; i < count; ++i) weeks.push_back(week);
        }
        rng::shuffle(weeks, gen);
        for (std::uint32_t i = 0; i < school.size; ++i, ++cursor) {
            participants[cursor].school = school.id;
            school_of[cursor] = static_cast<int>(s);
            if (!weeks.empty()) participants[cursor].attendance_week = weeks[i];
        }
    }
    for (std::uint32_t i = 0; i < config.n; ++i) {
        participants[i].id = "P" + std::to_string(i + 1);
    }

    DrawnAttributes drawn;
    drawn.codes.resize(config.attribute_specs.size());
    for (std::size_t a = 0; a < config.attribute_specs.size(); ++a) {
        const AttributeSpec& spec = config.attribute_specs[a];
        drawn.codes[a].resize(config.n, -1);
        for (std::uint32_t i = 0; i < config.n; ++i) {
            if (spec.missing_rate > 0.0 && gen.bernoulli(spec.missing_rate)) continue;
            const int code = draw_category(spec.probabilities, gen);
            drawn.codes[a][i] = code;
            if (spec.attribute == Attribute::contraceptive &&
                participants[i].sex != Sex::female) {
                drawn.codes[a][i] = -1;  // women only
                continue;
            }
            assign_attribute(participants[i], spec.attribute, code);
        }
    }
    // Interview-style extras; representativeness skewed high like the survey.
    for (std::uint32_t i = 0; i < config.n; ++i) {
        participants[i].age = std::clamp(gen.normal(16.4, 1.24), 15.0, 28.0);
        participants[i].representativeness = gen.bernoulli(0.76)
                                                 ? 5 + static_cast<int>(gen.below(6))
                                                 : static_cast<int>(gen.below(5));
    }

    // Nominations: capped Poisson out-degree, weighted targets.
    std::vector<Nomination> nominations;
    std::vector<double> weight(config.n);
    for (std::uint32_t i = 0; i < config.n; ++i) {
        const int out = std::min<int>(gen.poisson(config.mean_out_nominations),
                                      static_cast<int>(config.nomination_cap));
        if (out == 0) continue;
        double total = 0.0;
        for (std::uint32_t j = 0; j < config.n; ++j) {
            double w = 1.0;
            if (j == i) {
                w = 0.0;
            } else {
                if (!config.schools.empty() && school_of[i] == school_of[j]) {
                    w *= config.within_school_bias;
                }
                for (std::size_t a = 0; a < config.attribute_specs.size(); ++a) {
                    const auto& codes = drawn.codes[a];
                    if (codes[i] >= 0 && codes[i] == codes[j]) {
                        w *= config.attribute_specs[a].homophily_weight;
                    }
                }
            }
            weight[j] = w;
            total += w;
        }
        for (int pick = 0; pick < out; ++pick) {
            if (total <= 0.0) {
                if (pick == 0) throw ConfigError("generate_cohort: all target weights are zero");
                break;
            }
            const double u = gen.uniform01() * total;
            double acc = 0.0;
            std::uint32_t target = config.n - 1;
            for (std::uint32_t j = 0; j < config.n; ++j) {
                acc += weight[j];
                if (u < acc) {
                    target = j;
                    break;
                }
            }
            ContextSet contexts;
            for (int c = 0; c < kContextCount; ++c) {
                if (gen.bernoulli(config.context_flag_probabilities[static_cast<std::size_t>(c)])) {
                    contexts.set(static_cast<Layer>(c + 1));
                }
            }
            nominations.push_back({i, target, contexts});
            total -= weight[target];
            weight[target] = 0.0;  // without replacement
        }
    }

    // Carriage phenotypes: iid draws, or a planted contagion when requested.
    for (std::uint32_t i = 0; i < config.n; ++i) {
        participants[i].carriage_direct =
            gen.bernoulli(config.prevalence_direct) ? Carriage::positive : Carriage::negative;
        participants[i].carriage_enrichment =
            gen.bernoulli(config.prevalence_enrichment) ? Carriage::positive : Carriage::negative;
    }

    GeneratedCohort out{Cohort::from_participants(std::move(participants)), std::move(nominations)};

    if (config.planted_rho) {
        const ContactNetwork network = build_network(out.cohort, out.nominations, Layer::overall);
        const Eigen::MatrixXd no_covariates(static_cast<Eigen::Index>(config.n), 0);
        const Eigen::VectorXd no_effects(0);
        const PlantResult planted =
            plant_contagion(network, *config.planted_rho, config.prevalence_direct, no_covariates,
                            no_effects, rng::mix64(config.seed + 1), config.planted_mechanism);
        std::vector<Participant> updated = out.cohort.participants();
        for (std::uint32_t i = 0; i < config.n; ++i) {
            updated[i].carriage_direct = planted.trait[i] ? Carriage::positive : Carriage::negative;
        }
        out.cohort = Cohort::from_participants(std::move(updated));
    }
    return out;
}

PlantResult plant_contagion(const ContactNetwork& network, double rho, double base_prevalence,
                            const Eigen::MatrixXd& covariates, const Eigen::VectorXd& effects,
                            std::uint64_t seed, ContagionMechanism mechanism, int max_iterations) {
    const auto n = static_cast<Eigen::Index>(network.node_count());
    if (base_prevalence <= 0.0 || base_prevalence >= 1.0) {
        throw ConfigError("plant_contagion: base_prevalence must lie strictly inside (0,1)");
    }
    if (covariates.rows() != n && covariates.rows() != 0) {
        throw ConfigError("plant_contagion: covariate row count mismatch");
    }
    Eigen::VectorXd drift = Eigen::VectorXd::Zero(n);
    if (covariates.cols() > 0) {
        if (effects.size() != covariates.cols()) {
            throw ConfigError("plant_contagion: effects size mismatch");
        }
        drift = covariates * effects;
    }

    PlantResult result;
    result.mechanism = mechanism;

    if (mechanism == ContagionMechanism::sar) {
        const WeightMatrix weights = build_weight_matrix(network, WeightMode::raw_adjacency);
        Eigen::MatrixXd X(n, 1);
        X.col(0) = drift;
        Eigen::VectorXd beta(1);
        beta << 1.0;
        const SimulationRecord sim =
            simulate_autocorrelation(weights, rho, X, beta, /*noise_sd=*/1.0, seed);
        // Threshold at the sample quantile matching the prevalence.
        std::vector<double> sorted(sim.outcome.data(), sim.outcome.data() + sim.outcome.size());
        std::sort(sorted.begin(), sorted.end());
        const auto cut_index =
            static_cast<std::size_t>(std::floor((1.0 - base_prevalence) * static_cast<double>(n)));
        const double cut = sorted[std::min(sorted.size() - 1, cut_index)];
        result.trait.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            result.trait[static_cast<std::size_t>(i)] = sim.outcome(i) > cut ? 1 : 0;
        }
        result.iterations = sim.iterations;
        result.converged = sim.converged;
        return result;
    }

    // Sequential autologistic sweeps. The interaction log-odds is scaled so
    // that rho is the per-positive-friend probability increment near the base
    // prevalence; the intercept is calibrated by bisection on the realized
    // prevalence after the burn-in sweeps.
    const double interaction = rho / (base_prevalence * (1.0 - base_prevalence));
    auto run_sweeps = [&](double intercept, std::uint64_t stream, int sweeps,
                          std::vector<std::uint8_t>& labels) {
        auto gen = rng::replicate_stream(seed, stream);
        labels.assign(static_cast<std::size_t>(n), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            labels[static_cast<std::size_t>(i)] = gen.bernoulli(base_prevalence) ? 1 : 0;
        }
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            for (Eigen::Index i = 0; i < n; ++i) {
                int positive_friends = 0;
                for (auto v : network.neighbors(static_cast<std::uint32_t>(i))) {
                    positive_friends += labels[v];
                }
                const double eta = intercept + interaction * positive_friends + drift(i);
                labels[static_cast<std::size_t>(i)] = gen.bernoulli(logistic(eta)) ? 1 : 0;
            }
        }
    };
    auto realized_prevalence = [&](double intercept, int replicates) {
        std::vector<std::uint8_t> labels;
        double mean = 0.0;
        for (int r = 0; r < replicates; ++r) {
            run_sweeps(intercept, 100 + static_cast<std::uint64_t>(r), max_iterations / 2, labels);
            mean += std::accumulate(labels.begin(), labels.end(), 0.0) / static_cast<double>(n);
        }
        return mean / replicates;
    };

    const double mean_degree =
        2.0 * static_cast<double>(network.edge_count()) / std::max(1.0, static_cast<double>(n));
    double lo = std::log(base_prevalence / (1.0 - base_prevalence)) -
                interaction * mean_degree - 2.0;
    double hi = std::log(base_prevalence / (1.0 - base_prevalence)) + 1.0;
    double intercept = 0.5 * (lo + hi);
    bool calibrated = false;
    for (int iter = 0; iter < 24; ++iter) {
        intercept = 0.5 * (lo + hi);
        const double prevalence = realized_prevalence(intercept, 2);
        if (std::abs(prevalence - base_prevalence) < 0.005) {
            calibrated = true;
            break;
        }
        if (prevalence < base_prevalence) {
            lo = intercept;
        } else {
            hi = intercept;
        }
    }
    // Near the autologistic phase transition the prevalence response is
    // discontinuous in the intercept, so exact control is not always possible.
    const double realized = realized_prevalence(intercept, 2);
    if (std::abs(realized - base_prevalence) > 0.15) {
        throw NumericError("plant_contagion: prevalence calibration failed (intercept " +
                           std::to_string(intercept) + ", bracket [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "], realized prevalence " +
                           std::to_string(realized) + ")");
    }
    run_sweeps(intercept, 0, max_iterations, result.trait);
    result.iterations = max_iterations;
    result.converged = calibrated || std::abs(realized - base_prevalence) <= 0.05;
    result.intercept = intercept;
    return result;
}

CohortConfig survey_shaped_config(std::uint64_t seed) {
    CohortConfig config;
    config.n = 1038;
    config.seed = seed;
    config.nomination_cap = 5;
    config.mean_out_nominations = 4.35;
    config.within_school_bias = 55.0;  // starting point; calibrate against 87.8%

    auto week = [](int year, int wk) { return IsoWeek{year, wk}; };
    config.schools = {
        {"H1", 207, {{week(2010, 38), 32}, {week(2010, 39), 24}, {week(2010, 40), 36},
                     {week(2010, 41), 36}, {week(2010, 42), 35}, {week(2010, 43), 30},
                     {week(2010, 44), 6},  {week(2010, 49), 4},  {week(2010, 50), 4}}},
        {"H2", 142, {{week(2010, 44), 16}, {week(2010, 45), 40}, {week(2010, 46), 42},
                     {week(2010, 47), 32}, {week(2010, 48), 6},  {week(2010, 50), 4},
                     {week(2011, 1), 2}}},
        {"H3", 168, {{week(2011, 6), 30}, {week(2011, 7), 41}, {week(2011, 8), 44},
                     {week(2011, 9), 43}, {week(2011, 11), 8}, {week(2011, 15), 2}}},
        {"H4", 98, {{week(2011, 11), 12}, {week(2011, 12), 4}, {week(2011, 13), 15},
                    {week(2011, 14), 22}, {week(2011, 15), 31}, {week(2011, 17), 14}}},
        {"H5", 85, {{week(2011, 11), 17}, {week(2011, 12), 18}, {week(2011, 13), 24},
                    {week(2011, 14), 26}}},
        {"H6", 26, {{week(2011, 12), 19}, {week(2011, 13), 5}, {week(2011, 15), 2}}},
        {"H7", 192, {{week(2011, 1), 6},  {week(2011, 2), 43}, {week(2011, 3), 45},
                     {week(2011, 4), 40}, {week(2011, 5), 46}, {week(2011, 6), 10},
                     {week(2011, 8), 2}}},
        {"H8", 120, {{week(2010, 48), 28}, {week(2010, 49), 34}, {week(2010, 50), 31},
                     {week(2011, 1), 27}}},
    };

    config.attribute_specs = {
        {Attribute::sex, {0.489, 0.511}, 1.6, 0.0},
        {Attribute::study_program, {0.3757, 0.1002, 0.5241}, 1.3, 0.0},
        {Attribute::bmi_category, {0.106, 0.684, 0.1416, 0.0684}, 1.0, 0.01},
        {Attribute::smoking, {0.0462, 0.1811, 0.7727}, 1.0, 0.01},
        {Attribute::snuff, {0.236, 0.1262, 0.6378}, 1.0, 0.01},
        {Attribute::alcohol, {0.2697, 0.4046, 0.3257}, 1.0, 0.01},
        {Attribute::physical_activity, {0.2206, 0.3256, 0.2495, 0.2043}, 1.0, 0.01},
        {Attribute::contraceptive, {0.6488, 0.0397, 0.0992, 0.2123}, 1.0, 0.05},
        // Genotype labels only for a carrier-sized subset, clustered along
        // friendships like shared strains.
        {Attribute::spa_type, {0.23, 0.17, 0.14, 0.12, 0.10, 0.08, 0.06, 0.05, 0.03, 0.02}, 3.0, 0.45},
    };
    config.prevalence_direct = 0.303;
    config.prevalence_enrichment = 0.426;
    config.context_flag_probabilities = {0.75, 0.79, 0.16, 0.33, 0.29};
    return config;
}

CohortConfig calibrate_within_school_bias(CohortConfig config, double target_homophily_pct,
                                          double lo, double hi, int iterations) {
    const Attribute attr = Attribute::school;
    for (int iter = 0; iter < iterations; ++iter) {
        config.within_school_bias = std::sqrt(lo * hi);  // geometric bisection
        const GeneratedCohort generated = generate_cohort(config);
        const ContactNetwork network =
            build_network(generated.cohort, generated.nominations, Layer::overall);
        const double homophily =
            homophily_fraction(network, categorical_view(generated.cohort, attr));
        if (std::abs(homophily - target_homophily_pct) < 0.25) break;
        if (homophily < target_homophily_pct) {
            lo = config.within_school_bias;
        } else {
            hi = config.within_school_bias;
        }
    }
    return config;
}

}  // namespace traitnet
