#pragma once

// Small fixture builders shared across the test files.

#include <string>
#include <vector>

#include "traitnet/network.hpp"

namespace helpers {

using namespace traitnet;

// Minimal participant: id + sex + the two carriage phenotypes.
inline Participant person(std::string id, Sex sex = Sex::female,
                          Carriage direct = Carriage::negative,
                          Carriage enrichment = Carriage::negative) {
    Participant p;
    p.id = std::move(id);
    p.sex = sex;
    p.carriage_direct = direct;
    p.carriage_enrichment = enrichment;
    return p;
}

inline Cohort cohort_of(std::vector<Participant> people) {
    return Cohort::from_participants(std::move(people));
}

// n participants P1..Pn, traits from the 0/1 vector when given.
inline Cohort simple_cohort(std::size_t n, const std::vector<int>& direct = {}) {
    std::vector<Participant> people;
    for (std::size_t i = 0; i < n; ++i) {
        people.push_back(person("P" + std::to_string(i + 1), i % 2 ? Sex::male : Sex::female,
                                !direct.empty() && direct[i] ? Carriage::positive
                                                             : Carriage::negative));
    }
    return cohort_of(std::move(people));
}

inline ContextSet contexts(std::initializer_list<Layer> layers) {
    ContextSet set;
    for (Layer layer : layers) set.set(layer);
    return set;
}

inline Nomination nom(std::uint32_t from, std::uint32_t to,
                      std::initializer_list<Layer> layers = {Layer::school}) {
    return Nomination{from, to, contexts(layers)};
}

// Undirected network over n nodes directly from an edge list.
inline ContactNetwork network_of(std::uint32_t n,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                                 Layer layer = Layer::overall) {
    return ContactNetwork(layer, n, std::move(edges));
}

}  // namespace helpers
