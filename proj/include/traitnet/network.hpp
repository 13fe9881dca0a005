#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "traitnet/cohort.hpp"

namespace traitnet {

// Contact contexts from the nomination interview, plus the union layer.
enum class Layer { overall, physical, school, sports, home, other };

constexpr int kContextCount = 5;  // physical..other

std::string_view layer_name(Layer layer);
Layer layer_from_name(std::string_view name);
const std::vector<Layer>& all_layers();

// Subset of the five contact contexts as a bitset.
struct ContextSet {
    std::uint8_t bits = 0;

    static ContextSet all();
    bool contains(Layer context) const;
    void set(Layer context);
    bool empty() const noexcept { return bits == 0; }
    ContextSet& operator|=(ContextSet other) {
        bits |= other.bits;
        return *this;
    }
    friend bool operator==(const ContextSet&, const ContextSet&) = default;
};

// Directed "most contact last week" naming.
struct Nomination {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    ContextSet contexts;
};

// Simple undirected graph over the full cohort node set; immutable once built.
class ContactNetwork {
public:
    ContactNetwork() = default;
    ContactNetwork(Layer layer, std::uint32_t node_count,
                   std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

    Layer layer() const noexcept { return layer_; }
    std::uint32_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const noexcept { return edges_; }
    std::span<const std::uint32_t> neighbors(std::uint32_t node) const;
    std::uint32_t degree(std::uint32_t node) const;

private:
    Layer layer_ = Layer::overall;
    std::uint32_t node_count_ = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;  // sorted, first < second
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> adjacency_;
};

// Collapses nominations (either direction, duplicates, reciprocals) into one
// undirected edge per pair. Context-flagless nominations only reach `overall`.
ContactNetwork build_network(const Cohort& cohort, const std::vector<Nomination>& nominations,
                             Layer layer);

// Number of distinct nominators naming `id`, optionally within one context.
std::uint32_t popularity(const Cohort& cohort, const std::vector<Nomination>& nominations,
                         std::string_view id, Layer layer = Layer::overall);

std::vector<std::uint32_t> popularity_counts(const Cohort& cohort,
                                             const std::vector<Nomination>& nominations,
                                             Layer layer = Layer::overall);

// 100 * (#edges with equal non-missing endpoint values)
//     / (#edges with both endpoints non-missing).
double homophily_fraction(const ContactNetwork& network, const CategoricalView& attribute);

std::uint64_t same_attribute_edge_count(const ContactNetwork& network,
                                        const CategoricalView& attribute,
                                        std::optional<std::int32_t> restrict_value = std::nullopt);

// Edges whose endpoints both carry a non-missing value for the attribute.
std::uint64_t eligible_edge_count(const ContactNetwork& network, const CategoricalView& attribute);

std::uint32_t positive_friend_count(const ContactNetwork& network,
                                    const std::vector<std::uint8_t>& trait, std::uint32_t node);

std::vector<std::uint32_t> positive_friend_counts(const ContactNetwork& network,
                                                  const std::vector<std::uint8_t>& trait);

// Newman's nominal assortativity over non-missing endpoint pairs.
double nominal_assortativity(const ContactNetwork& network, const CategoricalView& attribute);

// Node-induced subgraph keeping the original node indexing; used for explicit
// cohort filters (e.g. carriers-only views) at the CLI level.
ContactNetwork induced_subgraph(const ContactNetwork& network, const std::vector<std::uint8_t>& keep);

}  // namespace traitnet
