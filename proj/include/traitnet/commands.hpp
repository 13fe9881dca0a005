#pragma once

#include <optional>
#include <string>
#include <vector>

#include "traitnet/json_io.hpp"

namespace traitnet {

// Subcommand entry points. Each loads inputs, runs the pipeline, validates
// every JSON document against its schema, and writes results plus a manifest
// under `out_dir`. Errors propagate as traitnet exceptions; the CLI main maps
// them to exit codes.

struct DescribeOptions {
    std::string cohort_path;
    std::string nominations_path;
    Layer layer = Layer::overall;
    std::string out_dir;
    int threads = 0;
};

struct HomophilyOptions {
    std::string cohort_path;
    std::string nominations_path;
    Attribute attribute = Attribute::carriage_direct;
    std::vector<Layer> layers;  // empty = all six
    std::uint32_t n_sims = 1000;
    std::optional<std::uint64_t> seed;
    NullMode mode = NullMode::marginal_shuffle;
    std::optional<std::string> restrict_label;
    // Category-conditional transmission test when set.
    std::optional<Attribute> category_attribute;
    std::optional<std::string> category;
    std::string out_dir;
    int threads = 0;
};

struct FitOptions {
    std::string cohort_path;
    std::string nominations_path;
    std::string model;  // ergm | autocorr | logit | rr
    Layer layer = Layer::overall;
    TraitPhenotype trait = TraitPhenotype::direct;
    std::vector<Attribute> attributes;  // ergm terms / rr attribute / autocorr covariates
    bool joint = true;
    WeightMode weight_mode = WeightMode::raw_adjacency;
    AutocorrMethod method = AutocorrMethod::lag_covariate_least_squares;
    ExposureDefinition exposure = ExposureDefinition::any_positive_friend;
    std::string out_dir;
    int threads = 0;
};

struct ExportOptions {
    std::string cohort_path;
    std::string nominations_path;
    std::string format = "edge-list";  // edge-list | graphml | dot
    Layer layer = Layer::overall;
    std::optional<Attribute> color_by;
    // Restrict to the carrier-induced subgraph of this phenotype (the
    // carriers-only network view); isolated non-carriers drop out.
    std::optional<TraitPhenotype> carriers_only;
    std::string out_dir;
    int threads = 0;
};

struct GenerateOptions {
    std::optional<std::string> config_path;  // JSON config; otherwise survey-shaped
    bool survey_shaped = false;
    bool calibrate = false;  // bisection on within_school_bias against 87.85%
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int threads = 0;
};

int cmd_describe(const DescribeOptions& options);
int cmd_homophily(const HomophilyOptions& options);
int cmd_fit(const FitOptions& options);
int cmd_export(const ExportOptions& options);
int cmd_generate(const GenerateOptions& options);
int cmd_schema(const std::string& out_dir);

// Exit codes by error class.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitNumeric = 66;
inline constexpr int kExitInternal = 70;

int exit_code_for(const Error& error);

}  // namespace traitnet
