#include "traitnet/commands.hpp"

#include <random>
#include <sstream>

#include "traitnet/parallel.hpp"
#include "traitnet/text_tables.hpp"

namespace traitnet {

int exit_code_for(const Error& error) {
    switch (error.kind()) {
        case Error::Kind::config:
        case Error::Kind::unsupported:
            return kExitUsage;
        case Error::Kind::parse:
        case Error::Kind::lookup:
            return kExitData;
        case Error::Kind::numeric:
        case Error::Kind::degenerate:
        case Error::Kind::size:
            return kExitNumeric;
    }
    return kExitInternal;
}

namespace {

struct LoadedInputs {
    Cohort cohort;
    std::vector<Nomination> nominations;
    IngestReport report;
};

LoadedInputs load_inputs(const std::string& cohort_path, const std::string& nominations_path) {
    LoadedInputs loaded;
    loaded.cohort = load_cohort(cohort_path, loaded.report);
    loaded.nominations = load_nominations(nominations_path, loaded.cohort, loaded.report);
    return loaded;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

void write_result(const std::string& out_dir, const std::string& name, Json doc,
                  const RunManifest& manifest) {
    doc["run_id"] = manifest.run_id;
    validate_output(doc);
    write_text_file(out_dir + "/" + name, canonical_dump(doc));
}

void write_manifest(const std::string& out_dir, const RunManifest& manifest) {
    Json doc = manifest.to_json();
    validate_output(doc);
    write_text_file(out_dir + "/manifest.json", canonical_dump(doc));
}

// Attributes shown in the survey-style summary tables.
const std::vector<Attribute> kDescribeAttributes = {
    Attribute::sex,          Attribute::study_program,     Attribute::smoking,
    Attribute::snuff,        Attribute::bmi_category,      Attribute::physical_activity,
    Attribute::alcohol,      Attribute::contraceptive,
};

}  // namespace

int cmd_describe(const DescribeOptions& options) {
    LoadedInputs inputs = load_inputs(options.cohort_path, options.nominations_path);
    const ContactNetwork network = build_network(inputs.cohort, inputs.nominations, options.layer);

    Json doc;
    doc["schema"] = "traitnet.describe.v1";
    doc["layer"] = layer_name(options.layer);
    doc["n_participants"] = inputs.cohort.size();
    doc["n_edges"] = network.edge_count();
    doc["ingest"] = to_json(inputs.report);

    TextTable prevalence_table;
    prevalence_table.set_header({"Variable", "Category", "Positive", "Negative", "Prevalence",
                                 "Test", "P-value"});

    Json cross_tabs = Json::array();
    for (TraitPhenotype trait : {TraitPhenotype::direct, TraitPhenotype::enrichment}) {
        for (Attribute attr : kDescribeAttributes) {
            CrossTab tab;
            try {
                tab = cross_tab(inputs.cohort, attr, trait_attribute(trait));
            } catch (const DegenerateError&) {
                continue;  // attribute unused in this cohort
            }
            cross_tabs.push_back(to_json(tab));
            for (std::size_t r = 0; r < tab.row_labels.size(); ++r) {
                prevalence_table.add_row(
                    {r == 0 ? std::string(attribute_name(attr)) + " (" +
                                  std::string(trait_name(trait)) + ")"
                            : "",
                     tab.row_labels[r],
                     std::to_string(tab.counts(static_cast<Eigen::Index>(r), 1)),
                     std::to_string(tab.counts(static_cast<Eigen::Index>(r), 0)),
                     TextTable::format(tab.prevalence_pct.empty() ? 0.0 : tab.prevalence_pct[r], 1) + " %",
                     r == 0 ? std::string(test_kind_name(tab.test)) : "",
                     r == 0 ? TextTable::format_p(tab.p_value) : ""});
            }
            prevalence_table.add_separator();
        }
    }
    doc["cross_tabs"] = std::move(cross_tabs);

    Json popularity_docs = Json::array();
    TextTable popularity_table;
    popularity_table.set_header({"Variable", "Category", "N", "Avg popularity", "Isolation %",
                                 "Frequency %", "P-value"});
    std::vector<Attribute> popularity_attrs = kDescribeAttributes;
    popularity_attrs.push_back(Attribute::carriage_direct);
    popularity_attrs.push_back(Attribute::carriage_enrichment);
    for (Attribute attr : popularity_attrs) {
        PopularityByCategory table;
        try {
            table = popularity_by_category(inputs.cohort, inputs.nominations, attr, options.layer);
        } catch (const DegenerateError&) {
            continue;
        }
        popularity_docs.push_back(to_json(table));
        bool first = true;
        for (const CategoryPopularity& c : table.categories) {
            popularity_table.add_row({first ? std::string(attribute_name(attr)) : "", c.label,
                                      std::to_string(c.n), TextTable::format(c.mean_popularity, 2),
                                      TextTable::format(c.isolation_share_pct, 2),
                                      TextTable::format(c.frequency_pct, 2),
                                      first ? TextTable::format_p(table.p_value) : ""});
            first = false;
        }
        popularity_table.add_separator();
    }
    doc["popularity"] = std::move(popularity_docs);

    double popularity_sum = 0.0;
    for (auto count : popularity_counts(inputs.cohort, inputs.nominations, options.layer)) {
        popularity_sum += count;
    }
    const double mean_popularity =
        inputs.cohort.size() ? popularity_sum / static_cast<double>(inputs.cohort.size()) : 0.0;

    std::ostringstream text;
    text << "Cohort: " << inputs.cohort.size() << " participants, layer "
         << layer_name(options.layer) << " with " << network.edge_count() << " relationships\n\n";
    text << "Carriage by host factor\n" << prevalence_table.render() << '\n';
    text << "Average popularity (overall mean " << TextTable::format(mean_popularity, 2) << ")\n"
         << popularity_table.render() << '\n';

    try {
        const SameWeekReport same_week = same_week_friend_proportion(inputs.cohort, inputs.nominations);
        doc["same_week"] = to_json(same_week);
        if (!same_week.weeks.empty()) {
            TextTable week_table;
            week_table.set_header({"Week", "Participants", "Friends same week (%)"});
            for (const SameWeekRow& row : same_week.weeks) {
                week_table.add_row({format_iso_week(row.week), std::to_string(row.n_participants),
                                    TextTable::format(row.mean_same_week_pct, 2)});
            }
            text << "Attendance weeks\n" << week_table.render();
        }
        text << "Same-week friend proportion: weighted average "
             << TextTable::format(same_week.weighted_average_pct, 2) << " % over "
             << same_week.n_participants_included << " participants\n";
    } catch (const DegenerateError&) {
        doc["same_week"] = nullptr;
    }
    try {
        const RepresentativenessSummary rep = representativeness_summary(inputs.cohort);
        doc["representativeness"] = to_json(rep);
        text << "Representativeness: mean " << TextTable::format(rep.mean, 2) << ", "
             << TextTable::format(rep.fraction_at_least_5_pct, 1) << " % scored 5 or above\n";
    } catch (const DegenerateError&) {
        doc["representativeness"] = nullptr;
    }

    Json parameters{{"cohort", options.cohort_path},
                    {"nominations", options.nominations_path},
                    {"layer", layer_name(options.layer)}};
    const RunManifest manifest =
        make_manifest("describe", parameters, {options.cohort_path, options.nominations_path}, 0,
                      false, resolve_thread_count(options.threads));
    write_result(options.out_dir, "describe.json", std::move(doc), manifest);
    write_text_file(options.out_dir + "/describe.txt", text.str());
    write_manifest(options.out_dir, manifest);
    return kExitOk;
}

int cmd_homophily(const HomophilyOptions& options) {
    LoadedInputs inputs = load_inputs(options.cohort_path, options.nominations_path);
    const std::uint64_t seed = resolve_seed(options.seed);
    const int threads = resolve_thread_count(options.threads);

    if (options.category_attribute || options.category) {
        if (!options.category_attribute || !options.category) {
            throw ConfigError("transmission test needs both --category-attr and --category");
        }
        if (options.attribute != Attribute::carriage_direct &&
            options.attribute != Attribute::carriage_enrichment) {
            throw ConfigError("transmission test runs on a carriage attribute (--attr)");
        }
        const TraitPhenotype trait = options.attribute == Attribute::carriage_direct
                                         ? TraitPhenotype::direct
                                         : TraitPhenotype::enrichment;
        const ContactNetwork network =
            build_network(inputs.cohort, inputs.nominations,
                          options.layers.empty() ? Layer::overall : options.layers.front());
        const CategoricalView view = categorical_view(inputs.cohort, *options.category_attribute);
        const std::int32_t code = view.code_of(*options.category);
        if (code < 0) {
            throw ConfigError("category '" + *options.category + "' not found for attribute '" +
                              std::string(attribute_name(*options.category_attribute)) + "'");
        }
        const CategoryTransmissionResult result = category_transmission_test(
            network, trait_vector(inputs.cohort, trait), view, code, options.n_sims, seed, threads);

        Json parameters{{"cohort", options.cohort_path},
                        {"nominations", options.nominations_path},
                        {"attribute", attribute_name(options.attribute)},
                        {"category_attribute", attribute_name(*options.category_attribute)},
                        {"category", *options.category},
                        {"layer", layer_name(network.layer())},
                        {"n_sims", options.n_sims},
                        {"mode", "marginal_shuffle"}};
        const RunManifest manifest =
            make_manifest("homophily", parameters, {options.cohort_path, options.nominations_path},
                          seed, true, threads);
        write_result(options.out_dir, "transmission.json", to_json(result), manifest);
        std::ostringstream text;
        text << "Category-conditional transmission test\n"
             << "attribute " << attribute_name(*options.category_attribute) << " = "
             << *options.category << ", trait " << trait_name(trait) << "\n"
             << "observed positive-positive pairs: " << result.observed << "\n"
             << "p (vs within-category null): " << TextTable::format_p(result.p_value) << "\n"
             << "p (vs whole-network null):   " << TextTable::format_p(result.p_vs_null_whole)
             << "\n";
        write_text_file(options.out_dir + "/transmission.txt", text.str());
        write_manifest(options.out_dir, manifest);
        return kExitOk;
    }

    const std::vector<Layer>& layers = options.layers.empty() ? all_layers() : options.layers;
    const CategoricalView view = categorical_view(inputs.cohort, options.attribute);
    std::optional<std::int32_t> restrict_code;
    if (options.restrict_label) {
        restrict_code = view.code_of(*options.restrict_label);
        if (*restrict_code < 0) {
            throw ConfigError("restrict value '" + *options.restrict_label + "' not found");
        }
    }

    Json rows = Json::array();
    TextTable table;
    table.set_header({"Network", "Total", "Equal", "MIN", "Q1", "Median", "Q3", "MAX", "SD",
                      "P-value"});
    for (Layer layer : layers) {
        const ContactNetwork network = build_network(inputs.cohort, inputs.nominations, layer);
        PermutationTestResult result;
        try {
            result = homophily_permutation_test(network, view, options.n_sims, seed, options.mode,
                                                threads, restrict_code);
        } catch (const DegenerateError&) {
            table.add_row({std::string(layer_name(layer)), std::to_string(network.edge_count()),
                           "-", "-", "-", "-", "-", "-", "-", "no eligible edges"});
            continue;
        }
        rows.push_back(to_json(result));
        table.add_row({std::string(layer_name(layer)), std::to_string(result.total_edges),
                       std::to_string(result.observed), TextTable::format(result.sims.min, 0),
                       TextTable::format(result.sims.q1, 1), TextTable::format(result.sims.median, 0),
                       TextTable::format(result.sims.q3, 1), TextTable::format(result.sims.max, 0),
                       TextTable::format(result.sims.sd, 1), TextTable::format_p(result.p_value)});
    }
    if (rows.empty()) {
        throw DegenerateError("homophily: no layer produced an eligible edge for '" +
                              std::string(attribute_name(options.attribute)) + "'");
    }

    Json doc;
    doc["schema"] = "traitnet.homophily.v1";
    doc["attribute"] = attribute_name(options.attribute);
    doc["rows"] = std::move(rows);

    Json parameters{{"cohort", options.cohort_path},
                    {"nominations", options.nominations_path},
                    {"attribute", attribute_name(options.attribute)},
                    {"n_sims", options.n_sims},
                    {"mode", null_mode_name(options.mode)}};
    if (options.restrict_label) parameters["restrict"] = *options.restrict_label;
    Json layer_names = Json::array();
    for (Layer layer : layers) layer_names.push_back(layer_name(layer));
    parameters["layers"] = std::move(layer_names);

    const RunManifest manifest = make_manifest(
        "homophily", parameters, {options.cohort_path, options.nominations_path}, seed, true, threads);
    write_result(options.out_dir, "homophily.json", std::move(doc), manifest);
    write_text_file(options.out_dir + "/homophily.txt",
                    "Same-attribute relationships against " + std::to_string(options.n_sims) +
                        " attribute randomizations (" + std::string(null_mode_name(options.mode)) +
                        ", attribute " + std::string(attribute_name(options.attribute)) + ")\n" +
                        table.render());
    write_manifest(options.out_dir, manifest);
    return kExitOk;
}

namespace {

const std::vector<Attribute> kErgmDefaultAttributes = {
    Attribute::sex,    Attribute::school, Attribute::bmi_category,
    Attribute::smoking, Attribute::snuff,  Attribute::alcohol,
    Attribute::physical_activity,
};

const std::vector<Attribute> kAutocorrDefaultCovariates = {
    Attribute::sex,     Attribute::study_program, Attribute::bmi_category, Attribute::smoking,
    Attribute::snuff,   Attribute::alcohol,       Attribute::physical_activity,
};

std::string render_ergm(const DyadicErgmFit& fit) {
    TextTable table;
    table.set_header({"Term", "Homophily (%)", "Estimate (logit)", "Std Error", "P-value"});
    for (const ErgmTerm& term : fit.terms) {
        table.add_row({term.name,
                       term.homophily_pct >= 0 ? TextTable::format(term.homophily_pct, 2) : "--",
                       TextTable::format(term.estimate, 2), TextTable::format(term.std_error, 2),
                       TextTable::format_p(term.p_value)});
    }
    std::ostringstream text;
    text << table.render() << "dyads: " << fit.n_dyads << " (" << fit.n_dyads_excluded
         << " excluded for missing values), log-likelihood "
         << TextTable::format(fit.log_likelihood, 2) << "\n";
    return text.str();
}

}  // namespace

int cmd_fit(const FitOptions& options) {
    LoadedInputs inputs = load_inputs(options.cohort_path, options.nominations_path);
    const ContactNetwork network = build_network(inputs.cohort, inputs.nominations, options.layer);
    const int threads = resolve_thread_count(options.threads);

    Json parameters{{"cohort", options.cohort_path},
                    {"nominations", options.nominations_path},
                    {"model", options.model},
                    {"layer", layer_name(options.layer)},
                    {"trait", trait_name(options.trait)}};
    const RunManifest manifest = make_manifest(
        "fit-" + options.model, parameters, {options.cohort_path, options.nominations_path}, 0,
        false, threads);

    if (options.model == "ergm") {
        const std::vector<Attribute>& attrs =
            options.attributes.empty() ? kErgmDefaultAttributes : options.attributes;
        if (options.joint) {
            const DyadicErgmFit fit = fit_dyadic_ergm(network, inputs.cohort, attrs);
            write_result(options.out_dir, "fit_ergm.json", to_json(fit, true), manifest);
            write_text_file(options.out_dir + "/fit_ergm.txt", render_ergm(fit));
        } else {
            const auto fits = fit_dyadic_ergm_separate(network, inputs.cohort, attrs);
            std::ostringstream text;
            for (std::size_t i = 0; i < fits.size(); ++i) {
                Json doc = to_json(fits[i], false);
                doc["run_id"] = manifest.run_id;
                validate_output(doc);
                write_text_file(options.out_dir + "/fit_ergm_" +
                                    std::string(attribute_name(attrs[i])) + ".json",
                                canonical_dump(doc));
                text << render_ergm(fits[i]) << '\n';
            }
            write_text_file(options.out_dir + "/fit_ergm.txt", text.str());
        }
    } else if (options.model == "autocorr") {
        const std::vector<Attribute>& covariates =
            options.attributes.empty() ? kAutocorrDefaultCovariates : options.attributes;
        const AutocorrFit fit = fit_autocorrelation(network, inputs.cohort, options.trait,
                                                    covariates, options.weight_mode, options.method);
        write_result(options.out_dir, "fit_autocorr.json", to_json(fit, options.trait), manifest);
        TextTable table;
        table.set_header({"", "Estimate", "Std Error", "P-value"});
        table.add_row({"rho", TextTable::format(fit.fit.rho, 3),
                       TextTable::format(fit.fit.rho_std_error, 3),
                       TextTable::format_p(fit.fit.rho_p_value)});
        for (Eigen::Index j = 0; j < fit.fit.beta.size(); ++j) {
            table.add_row({fit.fit.column_names[static_cast<std::size_t>(j)],
                           TextTable::format(fit.fit.beta(j), 3),
                           TextTable::format(fit.fit.beta_std_errors(j), 3),
                           TextTable::format_p(fit.fit.beta_p_values(j))});
        }
        std::ostringstream text;
        text << "Adapted linear autocorrelation model (" << autocorr_method_name(fit.fit.method)
             << ", " << weight_mode_name(fit.fit.weight_mode) << ", trait "
             << trait_name(options.trait) << ")\n"
             << table.render();
        for (const std::string& note : fit.notes) text << "note: " << note << '\n';
        write_text_file(options.out_dir + "/fit_autocorr.txt", text.str());
    } else if (options.model == "logit") {
        const FriendExposureFit fit = carrier_vs_positive_friends(network, inputs.cohort,
                                                                  options.trait);
        write_result(options.out_dir, "fit_logit.json", to_json(fit), manifest);
        TextTable table;
        table.set_header({"", "Estimate", "Std Error", "P-value"});
        table.add_row({"intercept", TextTable::format(fit.fit.coefficients(0), 2),
                       TextTable::format(fit.fit.std_errors(0), 2),
                       TextTable::format_p(fit.fit.wald_p_values(0))});
        table.add_row({"positive friends", TextTable::format(fit.fit.coefficients(1), 2),
                       TextTable::format(fit.fit.std_errors(1), 2),
                       TextTable::format_p(fit.fit.wald_p_values(1))});
        std::ostringstream text;
        text << "Carrier status vs number of positive friends (trait " << trait_name(options.trait)
             << ")\n"
             << table.render() << "probability increase per positive friend: "
             << TextTable::format(100.0 * fit.average_marginal_effect, 2) << " % (95% CI "
             << TextTable::format(100.0 * fit.ame_ci_low, 2) << " - "
             << TextTable::format(100.0 * fit.ame_ci_high, 2) << ")\n";
        write_text_file(options.out_dir + "/fit_logit.txt", text.str());
    } else if (options.model == "rr") {
        if (options.attributes.size() != 1) {
            throw ConfigError("fit --model rr needs exactly one --attrs entry");
        }
        const RelativeRiskTable table = category_relative_risk(network, inputs.cohort,
                                                               options.attributes.front(),
                                                               options.trait, options.exposure);
        write_result(options.out_dir, "fit_rr.json", to_json(table), manifest);
        TextTable text_table;
        text_table.set_header({"Category", "N", "Exposed %", "Relative Risk", "95% CI", "P-value"});
        for (const CategoryRiskRow& row : table.rows) {
            text_table.add_row({row.label, std::to_string(row.n),
                                TextTable::format(row.exposed_pct, 1),
                                row.is_reference ? "1" : TextTable::format(row.relative_risk, 3),
                                row.is_reference ? "" : TextTable::format(row.ci_low, 3) + " - " +
                                                            TextTable::format(row.ci_high, 3),
                                row.is_reference ? "" : TextTable::format_p(row.p_value)});
        }
        std::ostringstream text;
        text << "Relative risk of transmission exposure by "
             << attribute_name(table.attribute) << " (trait " << trait_name(options.trait)
             << ", exposure " << exposure_definition_name(table.exposure) << ")\n"
             << text_table.render();
        write_text_file(options.out_dir + "/fit_rr.txt", text.str());
    } else {
        throw ConfigError("unknown model '" + options.model + "' (expected ergm|autocorr|logit|rr)");
    }
    write_manifest(options.out_dir, manifest);
    return kExitOk;
}

namespace {

std::string xml_escape(const std::string& value) {
    std::string out;
    for (char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

int cmd_export(const ExportOptions& options) {
    LoadedInputs inputs = load_inputs(options.cohort_path, options.nominations_path);
    ContactNetwork network = build_network(inputs.cohort, inputs.nominations, options.layer);

    std::vector<std::uint8_t> keep(inputs.cohort.size(), 1);
    if (options.carriers_only) {
        keep = trait_vector(inputs.cohort, *options.carriers_only);
        network = induced_subgraph(network, keep);
    }

    std::optional<CategoricalView> view;
    std::string color_name = "none";
    if (options.color_by) {
        view = categorical_view(inputs.cohort, *options.color_by);
        color_name = attribute_name(*options.color_by);
    }
    auto same_flag = [&](std::uint32_t u, std::uint32_t v) {
        if (!view) return false;
        return view->codes[u] >= 0 && view->codes[u] == view->codes[v];
    };
    auto node_value = [&](std::uint32_t v) -> std::string {
        if (!view || view->codes[v] < 0) return "NA";
        return view->labels[static_cast<std::size_t>(view->codes[v])];
    };

    std::ostringstream out;
    std::string filename;
    if (options.format == "edge-list") {
        filename = "graph.edges.csv";
        out << "from,to";
        if (view) out << ",same_" << color_name;
        out << '\n';
        for (const auto& [u, v] : network.edges()) {
            out << inputs.cohort.participant(u).id << ',' << inputs.cohort.participant(v).id;
            if (view) out << ',' << (same_flag(u, v) ? "true" : "false");
            out << '\n';
        }
    } else if (options.format == "graphml") {
        filename = "graph.graphml";
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
        if (view) {
            out << "  <key id=\"d0\" for=\"node\" attr.name=\"" << color_name
                << "\" attr.type=\"string\"/>\n"
                << "  <key id=\"d1\" for=\"edge\" attr.name=\"same_" << color_name
                << "\" attr.type=\"boolean\"/>\n";
        }
        out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
        for (std::uint32_t vtx = 0; vtx < network.node_count(); ++vtx) {
            if (!keep[vtx]) continue;
            out << "    <node id=\"" << xml_escape(inputs.cohort.participant(vtx).id) << "\"";
            if (view) {
                out << ">\n      <data key=\"d0\">" << xml_escape(node_value(vtx))
                    << "</data>\n    </node>\n";
            } else {
                out << "/>\n";
            }
        }
        for (const auto& [u, v] : network.edges()) {
            out << "    <edge source=\"" << xml_escape(inputs.cohort.participant(u).id)
                << "\" target=\"" << xml_escape(inputs.cohort.participant(v).id) << "\"";
            if (view) {
                out << ">\n      <data key=\"d1\">" << (same_flag(u, v) ? "true" : "false")
                    << "</data>\n    </edge>\n";
            } else {
                out << "/>\n";
            }
        }
        out << "  </graph>\n</graphml>\n";
    } else if (options.format == "dot") {
        filename = "graph.dot";
        out << "graph contact_network {\n";
        for (std::uint32_t vtx = 0; vtx < network.node_count(); ++vtx) {
            if (!keep[vtx]) continue;
            out << "  \"" << inputs.cohort.participant(vtx).id << "\"";
            if (view) out << " [label=\"" << node_value(vtx) << "\"]";
            out << ";\n";
        }
        for (const auto& [u, v] : network.edges()) {
            out << "  \"" << inputs.cohort.participant(u).id << "\" -- \""
                << inputs.cohort.participant(v).id << "\"";
            if (view) out << " [color=" << (same_flag(u, v) ? "red" : "grey") << "]";
            out << ";\n";
        }
        out << "}\n";
    } else {
        throw ConfigError("unknown export format '" + options.format +
                          "' (expected edge-list|graphml|dot)");
    }

    Json parameters{{"cohort", options.cohort_path},
                    {"nominations", options.nominations_path},
                    {"format", options.format},
                    {"layer", layer_name(options.layer)},
                    {"color_by", color_name}};
    if (options.carriers_only) parameters["carriers_only"] = trait_name(*options.carriers_only);
    const RunManifest manifest =
        make_manifest("export", parameters, {options.cohort_path, options.nominations_path}, 0,
                      false, resolve_thread_count(options.threads));
    write_text_file(options.out_dir + "/" + filename, out.str());
    write_manifest(options.out_dir, manifest);
    return kExitOk;
}

int cmd_generate(const GenerateOptions& options) {
    const std::uint64_t seed = resolve_seed(options.seed);
    CohortConfig config;
    std::vector<std::string> input_paths;
    if (options.config_path) {
        Json doc;
        try {
            doc = Json::parse(read_text_file(*options.config_path));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("config JSON: ") + e.what());
        }
        config = cohort_config_from_json(doc);
        input_paths.push_back(*options.config_path);
    } else {
        config = survey_shaped_config(seed);
    }
    if (options.seed) config.seed = *options.seed;
    if (options.calibrate) config = calibrate_within_school_bias(config, 87.85);

    const GeneratedCohort generated = generate_cohort(config);
    const ContactNetwork network = build_network(generated.cohort, generated.nominations,
                                                 Layer::overall);

    std::ostringstream cohort_csv;
    write_cohort_csv(generated.cohort, cohort_csv);
    std::ostringstream nominations_csv;
    write_nominations_csv(generated.cohort, generated.nominations, nominations_csv);
    write_text_file(options.out_dir + "/cohort.csv", cohort_csv.str());
    write_text_file(options.out_dir + "/nominations.csv", nominations_csv.str());

    Json doc;
    doc["schema"] = "traitnet.generate.v1";
    doc["config"] = to_json(config);
    doc["outputs"] = Json{{"cohort_csv", "cohort.csv"}, {"nominations_csv", "nominations.csv"}};
    doc["summary"] = Json{{"n_participants", generated.cohort.size()},
                          {"n_nominations", generated.nominations.size()},
                          {"n_edges_overall", network.edge_count()}};

    Json parameters{{"survey_shaped", !options.config_path.has_value()},
                    {"calibrated", options.calibrate},
                    {"config", to_json(config)}};
    const RunManifest manifest = make_manifest("generate", parameters, input_paths, config.seed,
                                               true, resolve_thread_count(options.threads));
    write_result(options.out_dir, "generate.json", std::move(doc), manifest);
    write_manifest(options.out_dir, manifest);
    return kExitOk;
}

int cmd_schema(const std::string& out_dir) {
    for (const auto& [name, schema] : schema_registry()) {
        write_text_file(out_dir + "/" + name + ".schema.json",
                        schema.dump(2) + "\n");
    }
    return kExitOk;
}

}  // namespace traitnet
