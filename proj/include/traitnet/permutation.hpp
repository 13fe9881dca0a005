#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "traitnet/network.hpp"
#include "traitnet/rng.hpp"

namespace traitnet {

// Null models over a fixed topology: marginal_shuffle permutes the observed
// non-missing labels (keeps category counts exact); probability_draw redraws
// each label independently from the empirical category distribution.
enum class NullMode { marginal_shuffle, probability_draw };

std::string_view null_mode_name(NullMode mode);
NullMode null_mode_from_name(std::string_view name);

struct SimsSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double mean = 0, sd = 0;
};

SimsSummary summarize(const std::vector<double>& values);

struct PermutationTestResult {
    Layer layer;
    Attribute attribute;
    std::optional<std::string> restrict_label;  // when counting one category only
    std::uint64_t observed = 0;
    std::uint64_t total_edges = 0;
    std::uint64_t eligible_edges = 0;
    std::uint32_t n_sims = 0;
    SimsSummary sims;
    double p_value = 1.0;      // two-sided z against the replicate mean/sd
    double p_empirical = 1.0;  // (1 + #{sim >= observed}) / (n_sims + 1)
    std::uint64_t seed = 0;
    NullMode mode = NullMode::marginal_shuffle;
};

// One relabeling under the given null; missing codes stay missing.
std::vector<std::int32_t> randomize_attributes(const CategoricalView& attribute, NullMode mode,
                                               rng::SplitMix64& gen);

// Observed same-attribute edge count against n_sims relabeled replicates.
// Replicate r draws from rng::replicate_stream(seed, r), so results are
// independent of the worker count.
PermutationTestResult homophily_permutation_test(
    const ContactNetwork& network, const CategoricalView& attribute, std::uint32_t n_sims,
    std::uint64_t seed, NullMode mode = NullMode::marginal_shuffle, int threads = 0,
    std::optional<std::int32_t> restrict_value = std::nullopt);

struct CategoryTransmissionResult {
    Attribute risk_attribute;
    std::string category;
    std::uint64_t observed = 0;  // positive-positive edges inside the category
    std::uint64_t n_category_nodes = 0;
    std::uint64_t n_category_edges = 0;
    std::uint32_t n_sims = 0;
    SimsSummary null_whole_network;    // trait shuffled over every node
    SimsSummary null_within_category;  // trait shuffled inside the category only
    double p_value = 1.0;  // headline: observed vs the within-category null
    double p_vs_null_whole = 1.0;
    double p_vs_null_within = 1.0;
    double p_empirical_whole = 1.0;
    double p_empirical_within = 1.0;
    double null_shift_p = 1.0;  // two-sample z between the two null means
    std::uint64_t seed = 0;
};

// Category-conditional transmission test; the two-null construction is a
// documented choice (see README).
CategoryTransmissionResult category_transmission_test(const ContactNetwork& network,
                                                      const std::vector<std::uint8_t>& trait,
                                                      const CategoricalView& risk_attribute,
                                                      std::int32_t category_code,
                                                      std::uint32_t n_sims, std::uint64_t seed,
                                                      int threads = 0);

struct ExactPermutationResult {
    std::uint64_t observed = 0;
    std::uint64_t n_arrangements = 0;
    double tail_upper = 1.0;  // P(S >= observed)
    double tail_lower = 1.0;  // P(S <= observed)
    double p_two_sided = 1.0;  // min(1, 2 * min(tails))
};

// Exhaustive oracle over all distinct label arrangements; requires at most 12
// non-missing nodes.
ExactPermutationResult exact_permutation_pvalue(
    const ContactNetwork& network, const CategoricalView& attribute,
    std::optional<std::int32_t> restrict_value = std::nullopt);

}  // namespace traitnet
