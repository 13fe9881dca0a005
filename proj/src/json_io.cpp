#include "traitnet/json_io.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace traitnet {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string fnv1a64_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string digest_file(const std::string& path) { return fnv1a64_hex(read_text_file(path)); }

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
}

std::string canonical_dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json to_json(const SimsSummary& summary) {
    return Json{{"min", summary.min}, {"q1", summary.q1},     {"median", summary.median},
                {"q3", summary.q3},   {"max", summary.max},   {"mean", summary.mean},
                {"sd", summary.sd}};
}

Json to_json(const PermutationTestResult& result) {
    Json doc;
    doc["schema"] = "traitnet.permtest.v1";
    doc["layer"] = layer_name(result.layer);
    doc["attribute"] = attribute_name(result.attribute);
    if (result.restrict_label) doc["restrict"] = *result.restrict_label;
    doc["total_relationships"] = result.total_edges;
    doc["eligible_relationships"] = result.eligible_edges;
    doc["equal_relationships"] = result.observed;
    doc["n_sims"] = result.n_sims;
    doc["sims"] = to_json(result.sims);
    doc["p_value"] = result.p_value;
    doc["p_empirical"] = result.p_empirical;
    doc["seed"] = result.seed;
    doc["mode"] = null_mode_name(result.mode);
    return doc;
}

Json to_json(const CategoryTransmissionResult& result) {
    Json doc;
    doc["schema"] = "traitnet.transmission.v1";
    doc["risk_attribute"] = attribute_name(result.risk_attribute);
    doc["category"] = result.category;
    doc["observed_positive_pairs"] = result.observed;
    doc["n_category_nodes"] = result.n_category_nodes;
    doc["n_category_edges"] = result.n_category_edges;
    doc["n_sims"] = result.n_sims;
    doc["null_whole_network"] = to_json(result.null_whole_network);
    doc["null_within_category"] = to_json(result.null_within_category);
    doc["p_value"] = result.p_value;
    doc["p_vs_null_whole"] = result.p_vs_null_whole;
    doc["p_vs_null_within"] = result.p_vs_null_within;
    doc["p_empirical_whole"] = result.p_empirical_whole;
    doc["p_empirical_within"] = result.p_empirical_within;
    doc["null_shift_p"] = result.null_shift_p;
    doc["seed"] = result.seed;
    return doc;
}

Json to_json(const CrossTab& tab) {
    Json doc;
    doc["schema"] = "traitnet.crosstab.v1";
    doc["row_attribute"] = attribute_name(tab.row_attribute);
    doc["column_attribute"] = attribute_name(tab.column_attribute);
    doc["row_labels"] = tab.row_labels;
    doc["column_labels"] = tab.column_labels;
    Json counts = Json::array();
    for (Eigen::Index i = 0; i < tab.counts.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < tab.counts.cols(); ++j) row.push_back(tab.counts(i, j));
        counts.push_back(std::move(row));
    }
    doc["counts"] = std::move(counts);
    doc["positive_column"] = tab.positive_column;
    doc["prevalence_pct"] = tab.prevalence_pct;
    doc["test"] = test_kind_name(tab.test);
    doc["statistic"] = tab.statistic;
    doc["df"] = tab.df;
    doc["p_value"] = tab.p_value;
    doc["n_included"] = tab.n_included;
    return doc;
}

Json to_json(const PopularityByCategory& table) {
    Json doc;
    doc["schema"] = "traitnet.popularity.v1";
    doc["attribute"] = attribute_name(table.attribute);
    doc["layer"] = layer_name(table.layer);
    doc["overall_mean"] = table.overall_mean;
    doc["n_never_nominated"] = table.n_never_nominated;
    Json rows = Json::array();
    for (const CategoryPopularity& c : table.categories) {
        rows.push_back(Json{{"label", c.label},
                            {"n", c.n},
                            {"mean_popularity", c.mean_popularity},
                            {"isolation_share_pct", c.isolation_share_pct},
                            {"frequency_pct", c.frequency_pct}});
    }
    doc["categories"] = std::move(rows);
    doc["test"] = test_kind_name(table.test);
    doc["statistic"] = table.statistic;
    doc["df1"] = table.df1;
    doc["df2"] = table.df2;
    doc["p_value"] = table.p_value;
    doc["warnings"] = table.warnings;
    return doc;
}

Json to_json(const SameWeekReport& report) {
    Json doc;
    doc["schema"] = "traitnet.sameweek.v1";
    Json weeks = Json::array();
    for (const SameWeekRow& row : report.weeks) {
        weeks.push_back(Json{{"week", format_iso_week(row.week)},
                             {"n_participants", row.n_participants},
                             {"mean_same_week_pct", row.mean_same_week_pct}});
    }
    doc["weeks"] = std::move(weeks);
    doc["weighted_average_pct"] = report.weighted_average_pct;
    doc["n_participants_included"] = report.n_participants_included;
    doc["n_skipped"] = report.n_skipped;
    return doc;
}

Json to_json(const RepresentativenessSummary& summary) {
    Json doc;
    doc["schema"] = "traitnet.representativeness.v1";
    doc["histogram"] = summary.histogram;
    doc["n_scored"] = summary.n_scored;
    doc["mean"] = summary.mean;
    doc["fraction_at_least_5_pct"] = summary.fraction_at_least_5_pct;
    return doc;
}

Json to_json(const IngestReport& report) {
    Json warnings = Json::array();
    for (const IngestWarning& w : report.warnings) {
        warnings.push_back(Json{{"row", w.row}, {"message", w.message}});
    }
    return Json{{"n_participants", report.n_participants},
                {"n_nominations_raw", report.n_nominations_raw},
                {"n_nominations_kept", report.n_nominations_kept},
                {"n_nominations_dropped_external", report.n_nominations_dropped_external},
                {"n_nominations_dropped_self", report.n_nominations_dropped_self},
                {"n_nominations_dropped_unknown_nominator",
                 report.n_nominations_dropped_unknown_nominator},
                {"n_duplicate_nominations", report.n_duplicate_nominations},
                {"n_flagless_nominations", report.n_flagless_nominations},
                {"warnings", std::move(warnings)}};
}

Json to_json(const DyadicErgmFit& fit, bool joint) {
    Json doc;
    doc["schema"] = "traitnet.fit.ergm.v1";
    doc["joint"] = joint;
    Json terms = Json::array();
    for (const ErgmTerm& term : fit.terms) {
        Json t{{"name", term.name},
               {"estimate", term.estimate},
               {"std_error", term.std_error},
               {"p_value", term.p_value}};
        if (term.homophily_pct >= 0.0) {
            t["homophily_pct"] = term.homophily_pct;
        } else {
            t["homophily_pct"] = nullptr;
        }
        terms.push_back(std::move(t));
    }
    doc["terms"] = std::move(terms);
    doc["n_dyads"] = fit.n_dyads;
    doc["n_dyads_excluded"] = fit.n_dyads_excluded;
    doc["log_likelihood"] = fit.log_likelihood;
    doc["iterations"] = fit.iterations;
    doc["converged"] = fit.converged;
    return doc;
}

Json to_json(const AutocorrFit& fit, TraitPhenotype trait) {
    Json doc;
    doc["schema"] = "traitnet.fit.autocorr.v1";
    doc["trait"] = trait_name(trait);
    doc["method"] = autocorr_method_name(fit.fit.method);
    doc["weight_mode"] = weight_mode_name(fit.fit.weight_mode);
    Json rows = Json::array();
    rows.push_back(Json{{"name", "rho"},
                        {"estimate", fit.fit.rho},
                        {"std_error", fit.fit.rho_std_error},
                        {"p_value", fit.fit.rho_p_value}});
    for (Eigen::Index j = 0; j < fit.fit.beta.size(); ++j) {
        rows.push_back(Json{{"name", fit.fit.column_names[static_cast<std::size_t>(j)]},
                            {"estimate", fit.fit.beta(j)},
                            {"std_error", fit.fit.beta_std_errors(j)},
                            {"p_value", fit.fit.beta_p_values(j)}});
    }
    doc["rows"] = std::move(rows);
    doc["sigma2"] = fit.fit.sigma2;
    if (fit.fit.log_likelihood) {
        doc["log_likelihood"] = *fit.fit.log_likelihood;
    } else {
        doc["log_likelihood"] = nullptr;
    }
    doc["n_used"] = fit.n_used;
    doc["n_dropped_incomplete"] = fit.n_dropped_incomplete;
    doc["converged"] = fit.fit.converged;
    doc["notes"] = fit.notes;
    return doc;
}

Json to_json(const FriendExposureFit& fit) {
    Json doc;
    doc["schema"] = "traitnet.fit.logit.v1";
    doc["trait"] = trait_name(fit.trait);
    Json rows = Json::array();
    const std::array<std::string, 2> names{"intercept", "positive_friends"};
    for (Eigen::Index j = 0; j < fit.fit.coefficients.size(); ++j) {
        rows.push_back(Json{{"name", names[static_cast<std::size_t>(j)]},
                            {"estimate", fit.fit.coefficients(j)},
                            {"std_error", fit.fit.std_errors(j)},
                            {"p_value", fit.fit.wald_p_values(j)},
                            {"ci95", Json::array({fit.fit.ci95[static_cast<std::size_t>(j)].first,
                                                  fit.fit.ci95[static_cast<std::size_t>(j)].second})}});
    }
    doc["rows"] = std::move(rows);
    doc["average_marginal_effect"] = fit.average_marginal_effect;
    doc["ame_ci95"] = Json::array({fit.ame_ci_low, fit.ame_ci_high});
    doc["marginal_effect_at_mean"] = fit.marginal_effect_at_mean;
    Json curve = Json::array();
    for (const auto& point : fit.curve) {
        curve.push_back(Json{{"k", point.k},
                             {"probability", point.probability},
                             {"n_carriers", point.n_carriers},
                             {"n_non_carriers", point.n_non_carriers}});
    }
    doc["curve"] = std::move(curve);
    auto summary = [](const FriendExposureFit::CountSummary& s) {
        return Json{{"mean", s.mean}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}};
    };
    doc["carriers"] = summary(fit.carriers);
    doc["non_carriers"] = summary(fit.non_carriers);
    doc["deviance"] = fit.fit.deviance;
    doc["iterations"] = fit.fit.iterations;
    doc["converged"] = fit.fit.converged;
    return doc;
}

Json to_json(const RelativeRiskTable& table) {
    Json doc;
    doc["schema"] = "traitnet.fit.rr.v1";
    doc["trait"] = trait_name(table.trait);
    doc["attribute"] = attribute_name(table.attribute);
    doc["exposure_definition"] = exposure_definition_name(table.exposure);
    Json rows = Json::array();
    for (const CategoryRiskRow& row : table.rows) {
        rows.push_back(Json{{"label", row.label},
                            {"n", row.n},
                            {"exposed_pct", row.exposed_pct},
                            {"relative_risk", row.relative_risk},
                            {"ci_low", row.ci_low},
                            {"ci_high", row.ci_high},
                            {"p_value", row.p_value},
                            {"is_reference", row.is_reference}});
    }
    doc["rows"] = std::move(rows);
    doc["n_included"] = table.n_included;
    doc["warnings"] = table.warnings;
    return doc;
}

Json to_json(const CohortConfig& config) {
    Json doc;
    doc["schema"] = "traitnet.config.v1";
    doc["n"] = config.n;
    Json schools = Json::array();
    for (const SchoolSpec& s : config.schools) {
        Json attendance = Json::array();
        for (const auto& [week, count] : s.attendance) {
            attendance.push_back(Json{{"week", format_iso_week(week)}, {"count", count}});
        }
        schools.push_back(Json{{"id", s.id}, {"size", s.size}, {"attendance", std::move(attendance)}});
    }
    doc["schools"] = std::move(schools);
    doc["nomination_cap"] = config.nomination_cap;
    doc["mean_out_nominations"] = config.mean_out_nominations;
    doc["within_school_bias"] = config.within_school_bias;
    Json specs = Json::array();
    for (const AttributeSpec& spec : config.attribute_specs) {
        specs.push_back(Json{{"attribute", attribute_name(spec.attribute)},
                             {"probabilities", spec.probabilities},
                             {"homophily_weight", spec.homophily_weight},
                             {"missing_rate", spec.missing_rate}});
    }
    doc["attribute_specs"] = std::move(specs);
    doc["prevalence_direct"] = config.prevalence_direct;
    doc["prevalence_enrichment"] = config.prevalence_enrichment;
    if (config.planted_rho) {
        doc["planted_rho"] = *config.planted_rho;
    } else {
        doc["planted_rho"] = nullptr;
    }
    doc["planted_mechanism"] = contagion_mechanism_name(config.planted_mechanism);
    Json flags;
    for (int c = 0; c < kContextCount; ++c) {
        flags[std::string(layer_name(static_cast<Layer>(c + 1)))] =
            config.context_flag_probabilities[static_cast<std::size_t>(c)];
    }
    doc["context_flag_probabilities"] = std::move(flags);
    doc["seed"] = config.seed;
    return doc;
}

CohortConfig cohort_config_from_json(const Json& doc) {
    CohortConfig config;
    try {
        config.n = doc.at("n").get<std::uint32_t>();
        if (doc.contains("schools")) {
            for (const auto& s : doc.at("schools")) {
                SchoolSpec spec;
                spec.id = s.at("id").get<std::string>();
                spec.size = s.at("size").get<std::uint32_t>();
                if (s.contains("attendance")) {
                    for (const auto& a : s.at("attendance")) {
                        spec.attendance.emplace_back(parse_iso_week(a.at("week").get<std::string>()),
                                                     a.at("count").get<std::uint32_t>());
                    }
                }
                config.schools.push_back(std::move(spec));
            }
        }
        if (doc.contains("nomination_cap")) config.nomination_cap = doc.at("nomination_cap");
        if (doc.contains("mean_out_nominations")) {
            config.mean_out_nominations = doc.at("mean_out_nominations");
        }
        if (doc.contains("within_school_bias")) config.within_school_bias = doc.at("within_school_bias");
        if (doc.contains("attribute_specs")) {
            for (const auto& s : doc.at("attribute_specs")) {
                AttributeSpec spec;
                spec.attribute = attribute_from_name(s.at("attribute").get<std::string>());
                spec.probabilities = s.at("probabilities").get<std::vector<double>>();
                if (s.contains("homophily_weight")) spec.homophily_weight = s.at("homophily_weight");
                if (s.contains("missing_rate")) spec.missing_rate = s.at("missing_rate");
                config.attribute_specs.push_back(std::move(spec));
            }
        }
        if (doc.contains("prevalence_direct")) config.prevalence_direct = doc.at("prevalence_direct");
        if (doc.contains("prevalence_enrichment")) {
            config.prevalence_enrichment = doc.at("prevalence_enrichment");
        }
        if (doc.contains("planted_rho") && !doc.at("planted_rho").is_null()) {
            config.planted_rho = doc.at("planted_rho").get<double>();
        }
        if (doc.contains("planted_mechanism")) {
            config.planted_mechanism =
                contagion_mechanism_from_name(doc.at("planted_mechanism").get<std::string>());
        }
        if (doc.contains("context_flag_probabilities")) {
            const auto& flags = doc.at("context_flag_probabilities");
            for (int c = 0; c < kContextCount; ++c) {
                const std::string key(layer_name(static_cast<Layer>(c + 1)));
                if (flags.contains(key)) {
                    config.context_flag_probabilities[static_cast<std::size_t>(c)] = flags.at(key);
                }
            }
        }
        if (doc.contains("seed")) config.seed = doc.at("seed");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    config.validate();
    return config;
}

void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                             const std::string& path) {
    auto fail = [&](const std::string& message) {
        throw ConfigError("schema violation at " + path + ": " + message);
    };
    if (schema.contains("const")) {
        if (doc != schema.at("const")) fail("expected const " + schema.at("const").dump());
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& candidate : schema.at("enum")) {
            if (doc == candidate) found = true;
        }
        if (!found) fail("value " + doc.dump() + " not in enum");
    }
    if (schema.contains("type")) {
        const auto check_type = [&](const std::string& type) {
            if (type == "object") return doc.is_object();
            if (type == "array") return doc.is_array();
            if (type == "string") return doc.is_string();
            if (type == "number") return doc.is_number();
            if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
            if (type == "boolean") return doc.is_boolean();
            if (type == "null") return doc.is_null();
            return false;
        };
        const auto& type = schema.at("type");
        bool ok = false;
        if (type.is_array()) {
            for (const auto& t : type) ok = ok || check_type(t.get<std::string>());
        } else {
            ok = check_type(type.get<std::string>());
        }
        if (!ok) fail("expected type " + type.dump() + ", got " + std::string(doc.type_name()));
    }
    if (doc.is_number() && schema.contains("minimum") &&
        doc.get<double>() < schema.at("minimum").get<double>()) {
        fail("value below minimum " + schema.at("minimum").dump());
    }
    if (doc.is_number() && schema.contains("maximum") &&
        doc.get<double>() > schema.at("maximum").get<double>()) {
        fail("value above maximum " + schema.at("maximum").dump());
    }
    if (schema.contains("required")) {
        for (const auto& key : schema.at("required")) {
            if (!doc.contains(key.get<std::string>())) {
                fail("missing required key '" + key.get<std::string>() + "'");
            }
        }
    }
    if (schema.contains("properties") && doc.is_object()) {
        for (const auto& [key, sub] : schema.at("properties").items()) {
            if (doc.contains(key)) validate_against_schema(doc.at(key), sub, path + "." + key);
        }
    }
    if (schema.contains("items") && doc.is_array()) {
        std::size_t index = 0;
        for (const auto& item : doc) {
            validate_against_schema(item, schema.at("items"), path + "[" + std::to_string(index) + "]");
            ++index;
        }
    }
}

namespace {

using nlohmann::json;

json number() { return json{{"type", "number"}}; }
json integer() { return json{{"type", "integer"}, {"minimum", 0}}; }
json string_type() { return json{{"type", "string"}}; }
json boolean() { return json{{"type", "boolean"}}; }
json probability() { return json{{"type", "number"}, {"minimum", 0.0}, {"maximum", 1.0}}; }

json object(json properties, json required) {
    return json{{"type", "object"}, {"properties", std::move(properties)},
                {"required", std::move(required)}};
}

json array_of(json items) { return json{{"type", "array"}, {"items", std::move(items)}}; }

json sims_summary_schema() {
    return object({{"min", number()}, {"q1", number()}, {"median", number()}, {"q3", number()},
                   {"max", number()}, {"mean", number()}, {"sd", number()}},
                  json::array({"min", "q1", "median", "q3", "max", "mean", "sd"}));
}

json estimate_row_schema() {
    return object({{"name", string_type()}, {"estimate", number()}, {"std_error", number()},
                   {"p_value", probability()}},
                  json::array({"name", "estimate", "std_error", "p_value"}));
}

json permtest_schema() {
    return object({{"schema", json{{"const", "traitnet.permtest.v1"}}},
                   {"layer", string_type()},
                   {"attribute", string_type()},
                   {"total_relationships", integer()},
                   {"eligible_relationships", integer()},
                   {"equal_relationships", integer()},
                   {"n_sims", integer()},
                   {"sims", sims_summary_schema()},
                   {"p_value", probability()},
                   {"p_empirical", probability()},
                   {"seed", integer()},
                   {"mode", json{{"enum", json::array({"marginal_shuffle", "probability_draw"})}}}},
                  json::array({"schema", "layer", "attribute", "total_relationships",
                               "eligible_relationships", "equal_relationships", "n_sims", "sims",
                               "p_value", "p_empirical", "seed", "mode"}));
}

json crosstab_schema() {
    return object({{"schema", json{{"const", "traitnet.crosstab.v1"}}},
                   {"row_attribute", string_type()},
                   {"column_attribute", string_type()},
                   {"row_labels", array_of(string_type())},
                   {"column_labels", array_of(string_type())},
                   {"counts", array_of(array_of(integer()))},
                   {"prevalence_pct", array_of(number())},
                   {"test", string_type()},
                   {"statistic", number()},
                   {"df", number()},
                   {"p_value", probability()},
                   {"n_included", integer()}},
                  json::array({"schema", "row_attribute", "column_attribute", "counts", "test",
                               "statistic", "p_value", "n_included"}));
}

json popularity_schema() {
    return object(
        {{"schema", json{{"const", "traitnet.popularity.v1"}}},
         {"attribute", string_type()},
         {"layer", string_type()},
         {"overall_mean", number()},
         {"n_never_nominated", integer()},
         {"categories",
          array_of(object({{"label", string_type()},
                           {"n", integer()},
                           {"mean_popularity", number()},
                           {"isolation_share_pct", number()},
                           {"frequency_pct", number()}},
                          json::array({"label", "n", "mean_popularity"})))},
         {"test", string_type()},
         {"p_value", probability()}},
        json::array({"schema", "attribute", "layer", "overall_mean", "categories", "test", "p_value"}));
}

json sameweek_schema() {
    return object({{"schema", json{{"const", "traitnet.sameweek.v1"}}},
                   {"weeks", array_of(object({{"week", string_type()},
                                              {"n_participants", integer()},
                                              {"mean_same_week_pct", number()}},
                                             json::array({"week", "n_participants"})))},
                   {"weighted_average_pct", number()},
                   {"n_participants_included", integer()},
                   {"n_skipped", integer()}},
                  json::array({"schema", "weeks", "weighted_average_pct"}));
}

json representativeness_schema() {
    return object({{"schema", json{{"const", "traitnet.representativeness.v1"}}},
                   {"histogram", array_of(integer())},
                   {"n_scored", integer()},
                   {"mean", number()},
                   {"fraction_at_least_5_pct", number()}},
                  json::array({"schema", "histogram", "n_scored", "mean", "fraction_at_least_5_pct"}));
}

json describe_schema() {
    return object({{"schema", json{{"const", "traitnet.describe.v1"}}},
                   {"run_id", string_type()},
                   {"layer", string_type()},
                   {"n_participants", integer()},
                   {"n_edges", integer()},
                   {"ingest", json{{"type", "object"}}},
                   {"cross_tabs", array_of(crosstab_schema())},
                   {"popularity", array_of(popularity_schema())},
                   {"same_week", json{{"type", std::vector<std::string>{"object", "null"}}}},
                   {"representativeness", json{{"type", std::vector<std::string>{"object", "null"}}}}},
                  json::array({"schema", "layer", "n_participants", "n_edges", "cross_tabs",
                               "popularity"}));
}

json homophily_schema() {
    return object({{"schema", json{{"const", "traitnet.homophily.v1"}}},
                   {"run_id", string_type()},
                   {"attribute", string_type()},
                   {"rows", array_of(permtest_schema())}},
                  json::array({"schema", "attribute", "rows"}));
}

json transmission_schema() {
    return object({{"schema", json{{"const", "traitnet.transmission.v1"}}},
                   {"risk_attribute", string_type()},
                   {"category", string_type()},
                   {"observed_positive_pairs", integer()},
                   {"n_category_nodes", integer()},
                   {"n_category_edges", integer()},
                   {"n_sims", integer()},
                   {"null_whole_network", sims_summary_schema()},
                   {"null_within_category", sims_summary_schema()},
                   {"p_value", probability()},
                   {"p_vs_null_whole", probability()},
                   {"p_vs_null_within", probability()},
                   {"null_shift_p", probability()},
                   {"seed", integer()}},
                  json::array({"schema", "risk_attribute", "category", "observed_positive_pairs",
                               "n_sims", "null_whole_network", "null_within_category", "p_value",
                               "seed"}));
}

json ergm_schema() {
    json term = object({{"name", string_type()},
                        {"homophily_pct", json{{"type", std::vector<std::string>{"number", "null"}}}},
                        {"estimate", number()},
                        {"std_error", number()},
                        {"p_value", probability()}},
                       json::array({"name", "estimate", "std_error", "p_value"}));
    return object({{"schema", json{{"const", "traitnet.fit.ergm.v1"}}},
                   {"joint", boolean()},
                   {"terms", array_of(std::move(term))},
                   {"n_dyads", integer()},
                   {"n_dyads_excluded", integer()},
                   {"log_likelihood", number()},
                   {"iterations", integer()},
                   {"converged", boolean()}},
                  json::array({"schema", "joint", "terms", "n_dyads", "log_likelihood", "converged"}));
}

json autocorr_schema() {
    return object({{"schema", json{{"const", "traitnet.fit.autocorr.v1"}}},
                   {"trait", string_type()},
                   {"method", string_type()},
                   {"weight_mode", string_type()},
                   {"rows", array_of(estimate_row_schema())},
                   {"sigma2", number()},
                   {"n_used", integer()},
                   {"converged", boolean()},
                   {"notes", array_of(string_type())}},
                  json::array({"schema", "trait", "method", "weight_mode", "rows", "converged"}));
}

json logit_schema() {
    return object(
        {{"schema", json{{"const", "traitnet.fit.logit.v1"}}},
         {"trait", string_type()},
         {"rows", array_of(estimate_row_schema())},
         {"average_marginal_effect", number()},
         {"ame_ci95", array_of(number())},
         {"marginal_effect_at_mean", number()},
         {"curve", array_of(object({{"k", integer()},
                                    {"probability", probability()},
                                    {"n_carriers", integer()},
                                    {"n_non_carriers", integer()}},
                                   json::array({"k", "probability"})))},
         {"deviance", number()},
         {"converged", boolean()}},
        json::array({"schema", "trait", "rows", "average_marginal_effect", "curve", "converged"}));
}

json rr_schema() {
    return object({{"schema", json{{"const", "traitnet.fit.rr.v1"}}},
                   {"trait", string_type()},
                   {"attribute", string_type()},
                   {"exposure_definition", string_type()},
                   {"rows", array_of(object({{"label", string_type()},
                                             {"n", integer()},
                                             {"exposed_pct", number()},
                                             {"relative_risk", number()},
                                             {"ci_low", number()},
                                             {"ci_high", number()},
                                             {"p_value", probability()},
                                             {"is_reference", boolean()}},
                                            json::array({"label", "n", "relative_risk", "ci_low",
                                                         "ci_high", "is_reference"})))},
                   {"n_included", integer()}},
                  json::array({"schema", "trait", "attribute", "exposure_definition", "rows",
                               "n_included"}));
}

json config_schema() {
    return object({{"schema", json{{"const", "traitnet.config.v1"}}},
                   {"n", integer()},
                   {"nomination_cap", integer()},
                   {"mean_out_nominations", number()},
                   {"within_school_bias", number()},
                   {"prevalence_direct", probability()},
                   {"prevalence_enrichment", probability()},
                   {"seed", integer()}},
                  json::array({"schema", "n", "seed"}));
}

json generate_schema() {
    return object({{"schema", json{{"const", "traitnet.generate.v1"}}},
                   {"run_id", string_type()},
                   {"config", config_schema()},
                   {"outputs", object({{"cohort_csv", string_type()},
                                       {"nominations_csv", string_type()}},
                                      json::array({"cohort_csv", "nominations_csv"}))},
                   {"summary", object({{"n_participants", integer()},
                                       {"n_nominations", integer()},
                                       {"n_edges_overall", integer()}},
                                      json::array({"n_participants", "n_edges_overall"}))}},
                  json::array({"schema", "config", "outputs", "summary"}));
}

json manifest_schema() {
    return object({{"schema", json{{"const", "traitnet.manifest.v1"}}},
                   {"command", string_type()},
                   {"version", string_type()},
                   {"run_id", string_type()},
                   {"parameters", json{{"type", "object"}}},
                   {"inputs", array_of(object({{"path", string_type()}, {"digest", string_type()}},
                                              json::array({"path", "digest"})))},
                   {"seed", json{{"type", std::vector<std::string>{"integer", "null"}}}},
                   {"environment", object({{"threads", integer()}, {"timestamp", string_type()}},
                                          json::array({"threads", "timestamp"}))}},
                  json::array({"schema", "command", "version", "run_id", "parameters", "inputs",
                               "environment"}));
}

}  // namespace

const std::map<std::string, nlohmann::json>& schema_registry() {
    static const std::map<std::string, nlohmann::json> registry = {
        {"traitnet.permtest.v1", permtest_schema()},
        {"traitnet.homophily.v1", homophily_schema()},
        {"traitnet.transmission.v1", transmission_schema()},
        {"traitnet.crosstab.v1", crosstab_schema()},
        {"traitnet.popularity.v1", popularity_schema()},
        {"traitnet.sameweek.v1", sameweek_schema()},
        {"traitnet.representativeness.v1", representativeness_schema()},
        {"traitnet.describe.v1", describe_schema()},
        {"traitnet.fit.ergm.v1", ergm_schema()},
        {"traitnet.fit.autocorr.v1", autocorr_schema()},
        {"traitnet.fit.logit.v1", logit_schema()},
        {"traitnet.fit.rr.v1", rr_schema()},
        {"traitnet.config.v1", config_schema()},
        {"traitnet.generate.v1", generate_schema()},
        {"traitnet.manifest.v1", manifest_schema()},
    };
    return registry;
}

void validate_output(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("schema") || !doc.at("schema").is_string()) {
        throw ConfigError("output document lacks a schema tag");
    }
    const std::string name = doc.at("schema").get<std::string>();
    const auto& registry = schema_registry();
    auto it = registry.find(name);
    if (it == registry.end()) throw ConfigError("unknown output schema '" + name + "'");
    validate_against_schema(doc, it->second);
}

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

Json RunManifest::to_json() const {
    Json doc;
    doc["schema"] = "traitnet.manifest.v1";
    doc["command"] = command;
    doc["version"] = std::string(kVersion);
    doc["run_id"] = run_id;
    doc["parameters"] = parameters;
    Json input_docs = Json::array();
    for (const auto& [path, digest] : inputs) {
        input_docs.push_back(Json{{"path", path}, {"digest", digest}});
    }
    doc["inputs"] = std::move(input_docs);
    if (seed_recorded) {
        doc["seed"] = seed;
    } else {
        doc["seed"] = nullptr;
    }
    // Environment facts are recorded but excluded from the run identity.
    doc["environment"] = Json{{"threads", threads}, {"timestamp", iso_timestamp()}};
    return doc;
}

RunManifest make_manifest(const std::string& command, Json parameters,
                          const std::vector<std::string>& input_paths, std::uint64_t seed,
                          bool seed_recorded, int threads) {
    RunManifest manifest;
    manifest.command = command;
    manifest.parameters = std::move(parameters);
    for (const auto& path : input_paths) manifest.inputs.emplace_back(path, digest_file(path));
    manifest.seed = seed;
    manifest.seed_recorded = seed_recorded;
    manifest.threads = threads;

    std::string identity = command + "\n" + nlohmann::json(manifest.parameters).dump() + "\n";
    for (const auto& [path, digest] : manifest.inputs) identity += digest + "\n";
    if (seed_recorded) identity += std::to_string(seed);
    manifest.run_id = fnv1a64_hex(identity);
    return manifest;
}

}  // namespace traitnet
