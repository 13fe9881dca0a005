#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "traitnet/commands.hpp"

namespace {

using namespace traitnet;

std::vector<Layer> parse_layers(const std::string& token) {
    if (token == "all") return all_layers();
    std::vector<Layer> layers;
    std::string current;
    for (char c : token + ",") {
        if (c == ',') {
            if (!current.empty()) layers.push_back(layer_from_name(current));
            current.clear();
        } else {
            current += c;
        }
    }
    return layers;
}

std::vector<Attribute> parse_attributes(const std::string& token) {
    std::vector<Attribute> attrs;
    std::string current;
    for (char c : token + ",") {
        if (c == ',') {
            if (!current.empty()) attrs.push_back(attribute_from_name(current));
            current.clear();
        } else {
            current += c;
        }
    }
    return attrs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"traitnet: contagion statistics for layered contact networks"};
    app.set_version_flag("--version", std::string(traitnet::kVersion));
    app.require_subcommand(1);

    std::string cohort_path, nominations_path, out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd, bool needs_inputs = true) {
        if (needs_inputs) {
            cmd->add_option("--cohort", cohort_path, "cohort CSV/JSON file")->required();
            cmd->add_option("--noms", nominations_path, "nominations CSV/JSON file")->required();
        }
        cmd->add_option("--out", out_dir, "output directory")->required();
        cmd->add_option("--threads", threads, "worker threads (default: TRAITNET_THREADS or 1)");
    };

    // describe
    auto* describe = app.add_subcommand("describe", "survey-style summary tables");
    std::string layer_token = "overall";
    add_common(describe);
    describe->add_option("--layer", layer_token, "network layer");

    // homophily
    auto* homophily = app.add_subcommand("homophily", "attribute-randomization permutation tests");
    std::string attr_token = "carriage_direct";
    std::string layers_token = "all";
    std::string mode_token = "marginal_shuffle";
    std::string restrict_token, category_attr_token, category_token;
    std::uint32_t n_sims = 1000;
    add_common(homophily);
    homophily->add_option("--attr", attr_token, "attribute under test");
    homophily->add_option("--layer", layers_token, "layer list or 'all'");
    homophily->add_option("--sims", n_sims, "replicates");
    homophily->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });
    homophily->add_option("--mode", mode_token, "marginal_shuffle | probability_draw");
    homophily->add_option("--restrict", restrict_token, "count only this category");
    homophily->add_option("--category-attr", category_attr_token,
                          "host factor for the category-conditional transmission test");
    homophily->add_option("--category", category_token, "category label for the transmission test");

    // fit
    auto* fit = app.add_subcommand("fit", "model fits (ergm | autocorr | logit | rr)");
    std::string model, trait_token = "direct", attrs_token, weight_token = "raw_adjacency";
    std::string method_token = "lag_covariate_least_squares", exposure_token = "any_positive_friend";
    std::string fit_layer_token = "overall";
    bool separate = false;
    add_common(fit);
    fit->add_option("--model", model, "ergm | autocorr | logit | rr")->required();
    fit->add_option("--trait", trait_token, "direct | enrichment");
    fit->add_option("--attrs", attrs_token, "comma-separated attribute list");
    fit->add_flag("--separate", separate, "one ERGM per attribute instead of a joint fit");
    fit->add_option("--weight-mode", weight_token, "raw_adjacency | row_normalized");
    fit->add_option("--method", method_token, "lag_covariate_least_squares | profile_ml");
    fit->add_option("--exposure", exposure_token,
                    "any_positive_friend | above_median_positive_friends");
    fit->add_option("--layer", fit_layer_token, "network layer");

    // export
    auto* export_cmd = app.add_subcommand("export", "graph file export");
    std::string format_token = "edge-list", color_token, export_layer_token = "overall";
    std::string carriers_only_token;
    add_common(export_cmd);
    export_cmd->add_option("--format", format_token, "edge-list | graphml | dot");
    export_cmd->add_option("--color-by", color_token, "attribute for the same_<attr> edge flag");
    export_cmd->add_option("--layer", export_layer_token, "network layer");
    export_cmd->add_option("--carriers-only", carriers_only_token,
                           "restrict to carriers of this phenotype (direct | enrichment)");

    // generate
    auto* generate = app.add_subcommand("generate", "synthetic cohort generator");
    std::string config_path;
    bool survey_shaped = false, calibrate = false;
    add_common(generate, /*needs_inputs=*/false);
    generate->add_option("--config", config_path, "generator config JSON");
    generate->add_flag("--survey-shaped", survey_shaped, "use the built-in survey-shaped config");
    generate->add_flag("--calibrate", calibrate, "tune within-school bias to 87.85% homophily");
    generate->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });

    // schema
    auto* schema = app.add_subcommand("schema", "write the versioned output schemas");
    schema->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : traitnet::kExitUsage;
    }

    try {
        if (describe->parsed()) {
            DescribeOptions options;
            options.cohort_path = cohort_path;
            options.nominations_path = nominations_path;
            options.layer = layer_from_name(layer_token);
            options.out_dir = out_dir;
            options.threads = threads;
            return cmd_describe(options);
        }
        if (homophily->parsed()) {
            HomophilyOptions options;
            options.cohort_path = cohort_path;
            options.nominations_path = nominations_path;
            options.attribute = attribute_from_name(attr_token);
            options.layers = parse_layers(layers_token);
            options.n_sims = n_sims;
            if (seed_set) options.seed = seed;
            options.mode = null_mode_from_name(mode_token);
            if (!restrict_token.empty()) options.restrict_label = restrict_token;
            if (!category_attr_token.empty()) {
                options.category_attribute = attribute_from_name(category_attr_token);
            }
            if (!category_token.empty()) options.category = category_token;
            options.out_dir = out_dir;
            options.threads = threads;
            return cmd_homophily(options);
        }
        if (fit->parsed()) {
            FitOptions options;
            options.cohort_path = cohort_path;
            options.nominations_path = nominations_path;
            options.model = model;
            options.layer = layer_from_name(fit_layer_token);
            options.trait = trait_from_name(trait_token);
            if (!attrs_token.empty()) options.attributes = parse_attributes(attrs_token);
            options.joint = !separate;
            options.weight_mode = weight_mode_from_name(weight_token);
            options.method = autocorr_method_from_name(method_token);
            options.exposure = exposure_definition_from_name(exposure_token);
            options.out_dir = out_dir;
            options.threads = threads;
            return cmd_fit(options);
        }
        if (export_cmd->parsed()) {
            ExportOptions options;
            options.cohort_path = cohort_path;
            options.nominations_path = nominations_path;
            options.format = format_token;
            options.layer = layer_from_name(export_layer_token);
            if (!color_token.empty()) options.color_by = attribute_from_name(color_token);
            if (!carriers_only_token.empty()) {
                options.carriers_only = trait_from_name(carriers_only_token);
            }
            options.out_dir = out_dir;
            options.threads = threads;
            return cmd_export(options);
        }
        if (generate->parsed()) {
            GenerateOptions options;
            if (!config_path.empty()) options.config_path = config_path;
            options.survey_shaped = survey_shaped;
            options.calibrate = calibrate;
            if (seed_set) options.seed = seed;
            options.out_dir = out_dir;
            options.threads = threads;
            return cmd_generate(options);
        }
        if (schema->parsed()) {
            return cmd_schema(out_dir);
        }
    } catch (const Error& e) {
        std::cerr << "traitnet: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "traitnet: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
