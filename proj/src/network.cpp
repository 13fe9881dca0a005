#include "traitnet/network.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace traitnet {

namespace {

constexpr std::array<std::string_view, 6> kLayerNames = {"overall", "physical", "school",
                                                         "sports",  "home",     "other"};

// Bit position for a non-overall layer.
int context_bit(Layer layer) { return static_cast<int>(layer) - 1; }

}  // namespace

std::string_view layer_name(Layer layer) { return kLayerNames[static_cast<int>(layer)]; }

Layer layer_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kLayerNames.size(); ++i) {
        if (kLayerNames[i] == name) return static_cast<Layer>(i);
    }
    throw ConfigError("unknown layer '" + std::string(name) + "'");
}

const std::vector<Layer>& all_layers() {
    static const std::vector<Layer> layers = {Layer::overall, Layer::physical, Layer::school,
                                              Layer::sports,  Layer::home,     Layer::other};
    return layers;
}

ContextSet ContextSet::all() { return ContextSet{0x1F}; }

bool ContextSet::contains(Layer context) const {
    if (context == Layer::overall) throw ConfigError("overall is not a nomination context");
    return bits & (1u << context_bit(context));
}

void ContextSet::set(Layer context) {
    if (context == Layer::overall) throw ConfigError("overall is not a nomination context");
    bits |= (1u << context_bit(context));
}

ContactNetwork::ContactNetwork(Layer layer, std::uint32_t node_count,
                               std::vector<std::pair<std::uint32_t, std::uint32_t>> edges)
    : layer_(layer), node_count_(node_count), edges_(std::move(edges)) {
    for (auto& [u, v] : edges_) {
        if (u == v) throw ConfigError("self-loop in edge set");
        if (u > v) std::swap(u, v);
        if (v >= node_count_) throw ConfigError("edge endpoint outside node set");
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    std::vector<std::uint32_t> degree(node_count_, 0);
    for (const auto& [u, v] : edges_) {
        ++degree[u];
        ++degree[v];
    }
    offsets_.assign(node_count_ + 1, 0);
    for (std::uint32_t i = 0; i < node_count_; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    adjacency_.resize(offsets_.back());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges_) {
        adjacency_[cursor[u]++] = v;
        adjacency_[cursor[v]++] = u;
    }
    for (std::uint32_t i = 0; i < node_count_; ++i) {
        std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1]);
    }
}

std::span<const std::uint32_t> ContactNetwork::neighbors(std::uint32_t node) const {
    if (node >= node_count_) throw LookupError("node index out of range");
    return {adjacency_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
}

std::uint32_t ContactNetwork::degree(std::uint32_t node) const {
    if (node >= node_count_) throw LookupError("node index out of range");
    return offsets_[node + 1] - offsets_[node];
}

ContactNetwork build_network(const Cohort& cohort, const std::vector<Nomination>& nominations,
                             Layer layer) {
    const auto n = static_cast<std::uint32_t>(cohort.size());
    std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set;
    for (const Nomination& nom : nominations) {
        if (nom.from >= n || nom.to >= n) throw LookupError("nomination endpoint outside cohort");
        if (layer != Layer::overall && !nom.contexts.contains(layer)) continue;
        const auto u = std::min(nom.from, nom.to);
        const auto v = std::max(nom.from, nom.to);
        edge_set.emplace(u, v);
    }
    return ContactNetwork(layer, n, {edge_set.begin(), edge_set.end()});
}

std::uint32_t popularity(const Cohort& cohort, const std::vector<Nomination>& nominations,
                         std::string_view id, Layer layer) {
    const std::uint32_t target = cohort.require_index(id);
    return popularity_counts(cohort, nominations, layer)[target];
}

std::vector<std::uint32_t> popularity_counts(const Cohort& cohort,
                                             const std::vector<Nomination>& nominations,
                                             Layer layer) {
    // Nominations are merged per (from, to) at ingestion, so each entry is one
    // distinct nominator of its target.
    std::vector<std::uint32_t> counts(cohort.size(), 0);
    for (const Nomination& nom : nominations) {
        if (layer != Layer::overall && !nom.contexts.contains(layer)) continue;
        ++counts[nom.to];
    }
    return counts;
}

std::uint64_t eligible_edge_count(const ContactNetwork& network, const CategoricalView& attribute) {
    std::uint64_t eligible = 0;
    for (const auto& [u, v] : network.edges()) {
        if (attribute.codes[u] >= 0 && attribute.codes[v] >= 0) ++eligible;
    }
    return eligible;
}

double homophily_fraction(const ContactNetwork& network, const CategoricalView& attribute) {
    std::uint64_t eligible = 0;
    std::uint64_t same = 0;
    for (const auto& [u, v] : network.edges()) {
        const auto cu = attribute.codes[u];
        const auto cv = attribute.codes[v];
        if (cu < 0 || cv < 0) continue;
        ++eligible;
        if (cu == cv) ++same;
    }
    if (eligible == 0) {
        throw DegenerateError("homophily_fraction: no edge has both endpoints non-missing for '" +
                              std::string(attribute_name(attribute.attribute)) + "'");
    }
    return 100.0 * static_cast<double>(same) / static_cast<double>(eligible);
}

std::uint64_t same_attribute_edge_count(const ContactNetwork& network,
                                        const CategoricalView& attribute,
                                        std::optional<std::int32_t> restrict_value) {
    std::uint64_t same = 0;
    for (const auto& [u, v] : network.edges()) {
        const auto cu = attribute.codes[u];
        const auto cv = attribute.codes[v];
        if (cu < 0 || cv < 0 || cu != cv) continue;
        if (restrict_value && cu != *restrict_value) continue;
        ++same;
    }
    return same;
}

std::uint32_t positive_friend_count(const ContactNetwork& network,
                                    const std::vector<std::uint8_t>& trait, std::uint32_t node) {
    std::uint32_t count = 0;
    for (std::uint32_t v : network.neighbors(node)) count += trait[v] ? 1 : 0;
    return count;
}

std::vector<std::uint32_t> positive_friend_counts(const ContactNetwork& network,
                                                  const std::vector<std::uint8_t>& trait) {
    std::vector<std::uint32_t> counts(network.node_count(), 0);
    for (const auto& [u, v] : network.edges()) {
        counts[u] += trait[v] ? 1 : 0;
        counts[v] += trait[u] ? 1 : 0;
    }
    return counts;
}

double nominal_assortativity(const ContactNetwork& network, const CategoricalView& attribute) {
    const std::size_t k = attribute.category_count();
    if (k == 0) throw DegenerateError("assortativity: attribute has no categories");
    // Mixing matrix over ordered endpoint pairs.
    std::vector<double> a(k, 0.0);
    std::vector<double> diag(k, 0.0);
    double total = 0.0;
    for (const auto& [u, v] : network.edges()) {
        const auto cu = attribute.codes[u];
        const auto cv = attribute.codes[v];
        if (cu < 0 || cv < 0) continue;
        a[cu] += 1.0;
        a[cv] += 1.0;
        if (cu == cv) diag[cu] += 1.0;
        total += 2.0;
    }
    if (total == 0.0) throw DegenerateError("assortativity: no eligible edges");
    double trace = 0.0;
    double expected = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        trace += diag[i] * 2.0 / total;
        expected += (a[i] / total) * (a[i] / total);
    }
    if (expected >= 1.0) return 1.0;  // single occupied category
    return (trace - expected) / (1.0 - expected);
}

ContactNetwork induced_subgraph(const ContactNetwork& network, const std::vector<std::uint8_t>& keep) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& [u, v] : network.edges()) {
        if (keep[u] && keep[v]) edges.emplace_back(u, v);
    }
    return ContactNetwork(network.layer(), network.node_count(), std::move(edges));
}

}  // namespace traitnet
