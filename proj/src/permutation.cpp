#include "traitnet/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "traitnet/parallel.hpp"
#include "traitnet/special.hpp"

namespace traitnet {

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TRAITNET_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

void parallel_replicates(std::uint64_t count, int threads,
                         const std::function<void(std::uint64_t)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || count < 2) {
        for (std::uint64_t r = 0; r < count; ++r) fn(r);
        return;
    }
    const std::uint64_t workers = std::min<std::uint64_t>(threads, count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t begin = count * w / workers;
        const std::uint64_t end = count * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (std::uint64_t r = begin; r < end; ++r) fn(r);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string_view null_mode_name(NullMode mode) {
    return mode == NullMode::marginal_shuffle ? "marginal_shuffle" : "probability_draw";
}

NullMode null_mode_from_name(std::string_view name) {
    if (name == "marginal_shuffle" || name == "shuffle") return NullMode::marginal_shuffle;
    if (name == "probability_draw" || name == "draw") return NullMode::probability_draw;
    throw ConfigError("unknown null mode '" + std::string(name) + "'");
}

SimsSummary summarize(const std::vector<double>& values) {
    if (values.empty()) throw DegenerateError("summarize: no replicates");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    // Type-7 quantiles (linear interpolation), the common default.
    auto quantile = [&](double q) {
        const double h = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(h);
        if (lo + 1 >= sorted.size()) return sorted.back();
        return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    };
    SimsSummary s;
    s.min = sorted.front();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.max = sorted.back();
    double sum = 0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(sorted.size());
    double ss = 0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.sd = sorted.size() > 1 ? std::sqrt(ss / static_cast<double>(sorted.size() - 1)) : 0.0;
    return s;
}

namespace {

// Two-sided z p-value of `observed` against a replicate distribution, with
// the degenerate-null guard.
double normal_theory_p(double observed, const SimsSummary& sims, const char* what) {
    if (sims.sd == 0.0) {
        if (observed == sims.mean) return 1.0;
        throw DegenerateError(std::string(what) +
                              ": replicate distribution is constant and differs from the observed value");
    }
    const double z = (observed - sims.mean) / sims.sd;
    return 2.0 * special::normal_sf(std::abs(z));
}

double empirical_tail(double observed, const std::vector<double>& sims) {
    std::size_t at_least = 0;
    for (double v : sims) {
        if (v >= observed) ++at_least;
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(sims.size() + 1);
}

// Eligible nodes and edges re-indexed into a compact array, so replicates only
// touch non-missing labels.
struct CompactProblem {
    std::vector<std::int32_t> codes;                                // per eligible node
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;     // compact indices
    std::vector<double> category_probabilities;                     // empirical distribution
};

CompactProblem compact_problem(const ContactNetwork& network, const CategoricalView& attribute) {
    CompactProblem out;
    std::vector<std::int32_t> compact_index(network.node_count(), -1);
    for (std::uint32_t v = 0; v < network.node_count(); ++v) {
        if (attribute.codes[v] >= 0) {
            compact_index[v] = static_cast<std::int32_t>(out.codes.size());
            out.codes.push_back(attribute.codes[v]);
        }
    }
    for (const auto& [u, v] : network.edges()) {
        if (compact_index[u] >= 0 && compact_index[v] >= 0) {
            out.edges.emplace_back(static_cast<std::uint32_t>(compact_index[u]),
                                   static_cast<std::uint32_t>(compact_index[v]));
        }
    }
    std::vector<std::size_t> counts(attribute.category_count(), 0);
    for (auto c : out.codes) ++counts[static_cast<std::size_t>(c)];
    for (auto c : counts) {
        out.category_probabilities.push_back(static_cast<double>(c) /
                                             static_cast<double>(out.codes.size()));
    }
    return out;
}

std::uint64_t count_same(const std::vector<std::int32_t>& codes,
                         const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                         std::optional<std::int32_t> restrict_value) {
    std::uint64_t same = 0;
    if (restrict_value) {
        const std::int32_t r = *restrict_value;
        for (const auto& [u, v] : edges) same += (codes[u] == r && codes[v] == r) ? 1 : 0;
    } else {
        for (const auto& [u, v] : edges) same += (codes[u] == codes[v]) ? 1 : 0;
    }
    return same;
}

void relabel_in_place(std::vector<std::int32_t>& codes, NullMode mode,
                      const std::vector<double>& category_probabilities, rng::SplitMix64& gen) {
    if (mode == NullMode::marginal_shuffle) {
        rng::shuffle(codes, gen);
        return;
    }
    // Inverse-CDF draw against the empirical distribution.
    for (auto& code : codes) {
        const double u = gen.uniform01();
        double acc = 0.0;
        std::int32_t drawn = static_cast<std::int32_t>(category_probabilities.size()) - 1;
        for (std::size_t c = 0; c < category_probabilities.size(); ++c) {
            acc += category_probabilities[c];
            if (u < acc) {
                drawn = static_cast<std::int32_t>(c);
                break;
            }
        }
        code = drawn;
    }
}

}  // namespace

std::vector<std::int32_t> randomize_attributes(const CategoricalView& attribute, NullMode mode,
                                               rng::SplitMix64& gen) {
    std::vector<std::int32_t> compact;
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < attribute.codes.size(); ++i) {
        if (attribute.codes[i] >= 0) {
            positions.push_back(i);
            compact.push_back(attribute.codes[i]);
        }
    }
    std::vector<double> probabilities(attribute.category_count(), 0.0);
    if (!compact.empty()) {
        for (auto c : compact) probabilities[static_cast<std::size_t>(c)] += 1.0;
        for (auto& p : probabilities) p /= static_cast<double>(compact.size());
    }
    relabel_in_place(compact, mode, probabilities, gen);
    std::vector<std::int32_t> out(attribute.codes.size(), -1);
    for (std::size_t i = 0; i < positions.size(); ++i) out[positions[i]] = compact[i];
    return out;
}

PermutationTestResult homophily_permutation_test(const ContactNetwork& network,
                                                 const CategoricalView& attribute,
                                                 std::uint32_t n_sims, std::uint64_t seed,
                                                 NullMode mode, int threads,
                                                 std::optional<std::int32_t> restrict_value) {
    const CompactProblem problem = compact_problem(network, attribute);
    if (problem.edges.empty()) {
        throw DegenerateError("homophily_permutation_test: no eligible edge for '" +
                              std::string(attribute_name(attribute.attribute)) + "'");
    }
    if (n_sims == 0) throw ConfigError("n_sims must be positive");

    PermutationTestResult result;
    result.layer = network.layer();
    result.attribute = attribute.attribute;
    if (restrict_value) {
        result.restrict_label = attribute.labels.at(static_cast<std::size_t>(*restrict_value));
    }
    result.total_edges = network.edge_count();
    result.eligible_edges = problem.edges.size();
    result.n_sims = n_sims;
    result.seed = seed;
    result.mode = mode;
    result.observed = count_same(problem.codes, problem.edges, restrict_value);

    std::vector<double> sims(n_sims);
    parallel_replicates(n_sims, resolve_thread_count(threads), [&](std::uint64_t r) {
        auto gen = rng::replicate_stream(seed, r);
        std::vector<std::int32_t> codes = problem.codes;
        relabel_in_place(codes, mode, problem.category_probabilities, gen);
        sims[r] = static_cast<double>(count_same(codes, problem.edges, restrict_value));
    });

    result.sims = summarize(sims);
    result.p_value =
        normal_theory_p(static_cast<double>(result.observed), result.sims, "homophily_permutation_test");
    result.p_empirical = empirical_tail(static_cast<double>(result.observed), sims);
    return result;
}

CategoryTransmissionResult category_transmission_test(const ContactNetwork& network,
                                                      const std::vector<std::uint8_t>& trait,
                                                      const CategoricalView& risk_attribute,
                                                      std::int32_t category_code,
                                                      std::uint32_t n_sims, std::uint64_t seed,
                                                      int threads) {
    if (trait.size() != network.node_count()) throw ConfigError("trait vector size mismatch");
    if (category_code < 0 ||
        static_cast<std::size_t>(category_code) >= risk_attribute.category_count()) {
        throw ConfigError("category code out of range");
    }
    if (n_sims == 0) throw ConfigError("n_sims must be positive");

    // Category members in node order, with their within-category edges.
    std::vector<std::int32_t> member_index(network.node_count(), -1);
    std::vector<std::int32_t> member_labels;
    for (std::uint32_t v = 0; v < network.node_count(); ++v) {
        if (risk_attribute.codes[v] == category_code) {
            member_index[v] = static_cast<std::int32_t>(member_labels.size());
            member_labels.push_back(trait[v] ? 1 : 0);
        }
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> member_edges;
    for (const auto& [u, v] : network.edges()) {
        if (member_index[u] >= 0 && member_index[v] >= 0) {
            member_edges.emplace_back(static_cast<std::uint32_t>(member_index[u]),
                                      static_cast<std::uint32_t>(member_index[v]));
        }
    }
    if (member_edges.empty()) {
        throw DegenerateError("category_transmission_test: no edge inside category '" +
                              risk_attribute.labels.at(static_cast<std::size_t>(category_code)) + "'");
    }

    CategoryTransmissionResult result;
    result.risk_attribute = risk_attribute.attribute;
    result.category = risk_attribute.labels.at(static_cast<std::size_t>(category_code));
    result.n_category_nodes = member_labels.size();
    result.n_category_edges = member_edges.size();
    result.n_sims = n_sims;
    result.seed = seed;
    const auto positive = std::optional<std::int32_t>(1);
    result.observed = count_same(member_labels, member_edges, positive);

    // Null B: trait shuffled within the category (stream r matches the
    // homophily test so that category == whole cohort reduces exactly).
    std::vector<double> within(n_sims);
    // Null A: trait shuffled over the whole network.
    std::vector<double> whole(n_sims);
    std::vector<std::int32_t> all_labels(trait.begin(), trait.end());

    const int thread_count = resolve_thread_count(threads);
    parallel_replicates(n_sims, thread_count, [&](std::uint64_t r) {
        auto gen = rng::replicate_stream(seed, r);
        std::vector<std::int32_t> labels = member_labels;
        rng::shuffle(labels, gen);
        within[r] = static_cast<double>(count_same(labels, member_edges, positive));
    });
    parallel_replicates(n_sims, thread_count, [&](std::uint64_t r) {
        auto gen = rng::replicate_stream(seed, n_sims + r);
        std::vector<std::int32_t> labels = all_labels;
        rng::shuffle(labels, gen);
        std::uint64_t same = 0;
        for (const auto& [u, v] : network.edges()) {
            if (member_index[u] >= 0 && member_index[v] >= 0 && labels[u] == 1 && labels[v] == 1) ++same;
        }
        whole[r] = static_cast<double>(same);
    });

    result.null_within_category = summarize(within);
    result.null_whole_network = summarize(whole);
    const double observed = static_cast<double>(result.observed);
    result.p_vs_null_within =
        normal_theory_p(observed, result.null_within_category, "category_transmission_test");
    result.p_vs_null_whole =
        normal_theory_p(observed, result.null_whole_network, "category_transmission_test");
    result.p_value = result.p_vs_null_within;
    result.p_empirical_within = empirical_tail(observed, within);
    result.p_empirical_whole = empirical_tail(observed, whole);

    const double pooled_se =
        std::sqrt(result.null_whole_network.sd * result.null_whole_network.sd / n_sims +
                  result.null_within_category.sd * result.null_within_category.sd / n_sims);
    if (pooled_se == 0.0) {
        result.null_shift_p =
            result.null_whole_network.mean == result.null_within_category.mean ? 1.0 : 0.0;
    } else {
        const double z =
            (result.null_whole_network.mean - result.null_within_category.mean) / pooled_se;
        result.null_shift_p = 2.0 * special::normal_sf(std::abs(z));
    }
    return result;
}

ExactPermutationResult exact_permutation_pvalue(const ContactNetwork& network,
                                                const CategoricalView& attribute,
                                                std::optional<std::int32_t> restrict_value) {
    const CompactProblem problem = compact_problem(network, attribute);
    if (problem.codes.size() > 12) {
        throw SizeError("exact_permutation_pvalue: " + std::to_string(problem.codes.size()) +
                        " non-missing nodes exceed the enumeration limit of 12");
    }
    if (problem.codes.empty()) throw DegenerateError("exact_permutation_pvalue: no labeled nodes");

    ExactPermutationResult result;
    result.observed = count_same(problem.codes, problem.edges, restrict_value);

    std::vector<std::int32_t> arrangement = problem.codes;
    std::sort(arrangement.begin(), arrangement.end());
    std::uint64_t total = 0;
    std::uint64_t at_least = 0;
    std::uint64_t at_most = 0;
    do {
        const std::uint64_t same = count_same(arrangement, problem.edges, restrict_value);
        ++total;
        if (same >= result.observed) ++at_least;
        if (same <= result.observed) ++at_most;
    } while (std::next_permutation(arrangement.begin(), arrangement.end()));

    result.n_arrangements = total;
    result.tail_upper = static_cast<double>(at_least) / static_cast<double>(total);
    result.tail_lower = static_cast<double>(at_most) / static_cast<double>(total);
    result.p_two_sided = std::min(1.0, 2.0 * std::min(result.tail_upper, result.tail_lower));
    return result;
}

}  // namespace traitnet
