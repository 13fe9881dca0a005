#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "traitnet/autocorr.hpp"
#include "traitnet/descriptive.hpp"
#include "traitnet/ergm.hpp"
#include "traitnet/exposure.hpp"
#include "traitnet/ingest.hpp"
#include "traitnet/permutation.hpp"
#include "traitnet/stats.hpp"
#include "traitnet/synth.hpp"

namespace traitnet {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "0.1.0";

// 64-bit FNV-1a, the digest used for input files and run ids.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
std::string digest_file(const std::string& path);

// Result serialization. Every document carries a versioned "schema" field and
// validates against the matching entry of schema_registry().
Json to_json(const SimsSummary& summary);
Json to_json(const PermutationTestResult& result);
Json to_json(const CategoryTransmissionResult& result);
Json to_json(const CrossTab& tab);
Json to_json(const PopularityByCategory& table);
Json to_json(const SameWeekReport& report);
Json to_json(const RepresentativenessSummary& summary);
Json to_json(const IngestReport& report);
Json to_json(const DyadicErgmFit& fit, bool joint);
Json to_json(const AutocorrFit& fit, TraitPhenotype trait);
Json to_json(const FriendExposureFit& fit);
Json to_json(const RelativeRiskTable& table);
Json to_json(const CohortConfig& config);
CohortConfig cohort_config_from_json(const Json& doc);

// Minimal JSON-schema subset: type, properties, required, items, enum,
// minimum, maximum, const. Throws ConfigError with a JSON-pointer-ish path.
void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                             const std::string& path = "$");

// name -> schema document for every emitted file kind.
const std::map<std::string, nlohmann::json>& schema_registry();

// Looks up doc["schema"] in the registry and validates.
void validate_output(const nlohmann::json& doc);

struct RunManifest {
    std::string command;
    Json parameters;  // identity-relevant parameter echo
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    std::uint64_t seed = 0;
    bool seed_recorded = false;
    int threads = 1;
    std::string run_id;

    Json to_json() const;  // adds version, timestamp, environment
};

RunManifest make_manifest(const std::string& command, Json parameters,
                          const std::vector<std::string>& input_paths, std::uint64_t seed,
                          bool seed_recorded, int threads);

// Creates parent directories; writes atomically enough for test purposes.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string canonical_dump(const Json& doc);

}  // namespace traitnet
