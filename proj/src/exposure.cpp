#include "traitnet/exposure.hpp"

#include <algorithm>
#include <cmath>

#include "traitnet/special.hpp"

namespace traitnet {

namespace {

FriendExposureFit::CountSummary count_summary(std::vector<double> values) {
    FriendExposureFit::CountSummary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double h = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(h);
        if (lo + 1 >= values.size()) return values.back();
        return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
    };
    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    return s;
}

}  // namespace

FriendExposureFit carrier_vs_positive_friends(const ContactNetwork& network, const Cohort& cohort,
                                              TraitPhenotype trait) {
    const auto trait01 = trait_vector(cohort, trait);
    const auto friend_counts = positive_friend_counts(network, trait01);
    const auto n = static_cast<Eigen::Index>(cohort.size());

    const auto [min_it, max_it] = std::minmax_element(friend_counts.begin(), friend_counts.end());
    if (*min_it == *max_it) {
        throw DegenerateError("carrier_vs_positive_friends: positive-friend count is constant (" +
                              std::to_string(*min_it) + " for everyone)");
    }

    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = static_cast<double>(friend_counts[static_cast<std::size_t>(i)]);
        y(i) = trait01[static_cast<std::size_t>(i)];
    }

    FriendExposureFit out;
    out.trait = trait;
    out.fit = fit_logistic(y, X, {"intercept", "positive_friends"});

    const double b0 = out.fit.coefficients(0);
    const double b1 = out.fit.coefficients(1);

    // Average marginal effect with a delta-method interval: gradient of
    // mean_i [p(k_i+1) - p(k_i)] in (b0, b1).
    double ame = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
    double effect_at_mean = 0.0;
    double mean_k = 0.0;
    for (auto k : friend_counts) mean_k += k;
    mean_k /= static_cast<double>(friend_counts.size());
    for (auto k : friend_counts) {
        const double eta0 = b0 + b1 * static_cast<double>(k);
        const double eta1 = b0 + b1 * static_cast<double>(k + 1);
        const double p0 = logistic(eta0);
        const double p1 = logistic(eta1);
        ame += p1 - p0;
        const double d0 = p0 * (1.0 - p0);
        const double d1 = p1 * (1.0 - p1);
        gradient(0) += d1 - d0;
        gradient(1) += d1 * static_cast<double>(k + 1) - d0 * static_cast<double>(k);
    }
    ame /= static_cast<double>(friend_counts.size());
    gradient /= static_cast<double>(friend_counts.size());
    const double ame_var = gradient.transpose() * out.fit.covariance * gradient;
    out.average_marginal_effect = ame;
    out.ame_ci_low = ame - 1.96 * std::sqrt(std::max(0.0, ame_var));
    out.ame_ci_high = ame + 1.96 * std::sqrt(std::max(0.0, ame_var));
    {
        const double p_at_mean = logistic(b0 + b1 * mean_k);
        effect_at_mean = p_at_mean * (1.0 - p_at_mean) * b1;
    }
    out.marginal_effect_at_mean = effect_at_mean;

    const auto max_k = static_cast<int>(*max_it);
    std::vector<std::size_t> carriers_at(max_k + 1, 0), non_carriers_at(max_k + 1, 0);
    std::vector<double> carrier_counts, non_carrier_counts;
    for (std::size_t i = 0; i < friend_counts.size(); ++i) {
        const auto k = friend_counts[i];
        if (trait01[i]) {
            ++carriers_at[k];
            carrier_counts.push_back(static_cast<double>(k));
        } else {
            ++non_carriers_at[k];
            non_carrier_counts.push_back(static_cast<double>(k));
        }
    }
    for (int k = 0; k <= max_k; ++k) {
        out.curve.push_back({k, logistic(b0 + b1 * k), carriers_at[static_cast<std::size_t>(k)],
                             non_carriers_at[static_cast<std::size_t>(k)]});
    }
    out.carriers = count_summary(std::move(carrier_counts));
    out.non_carriers = count_summary(std::move(non_carrier_counts));
    return out;
}

std::string_view exposure_definition_name(ExposureDefinition def) {
    return def == ExposureDefinition::any_positive_friend ? "any_positive_friend"
                                                          : "above_median_positive_friends";
}

ExposureDefinition exposure_definition_from_name(std::string_view name) {
    if (name == "any_positive_friend") return ExposureDefinition::any_positive_friend;
    if (name == "above_median_positive_friends") return ExposureDefinition::above_median_positive_friends;
    throw ConfigError("unknown exposure definition '" + std::string(name) + "'");
}

RelativeRiskTable category_relative_risk(const ContactNetwork& network, const Cohort& cohort,
                                         Attribute risk_attribute, TraitPhenotype trait,
                                         ExposureDefinition exposure) {
    const auto trait01 = trait_vector(cohort, trait);
    const auto friend_counts = positive_friend_counts(network, trait01);
    const CategoricalView view = categorical_view(cohort, risk_attribute);

    std::uint32_t threshold = 0;
    if (exposure == ExposureDefinition::above_median_positive_friends) {
        std::vector<std::uint32_t> sorted(friend_counts);
        std::sort(sorted.begin(), sorted.end());
        threshold = sorted[sorted.size() / 2];
    }
    auto exposed = [&](std::size_t i) {
        return exposure == ExposureDefinition::any_positive_friend ? friend_counts[i] >= 1
                                                                   : friend_counts[i] > threshold;
    };

    RelativeRiskTable table;
    table.attribute = risk_attribute;
    table.trait = trait;
    table.exposure = exposure;

    // Categories with members, reference first in the dummy coding.
    const auto sizes = view.category_sizes();
    std::vector<std::int32_t> present;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (sizes[c] > 0) {
            present.push_back(static_cast<std::int32_t>(c));
        } else {
            table.warnings.push_back("category '" + view.labels[c] + "' has no members, excluded");
        }
    }
    if (present.size() < 2) {
        throw DegenerateError("category_relative_risk: fewer than two observed categories");
    }
    std::int32_t reference = view.reference;
    if (std::find(present.begin(), present.end(), reference) == present.end()) {
        reference = present.front();
        table.warnings.push_back("reference category empty, using '" +
                                 view.labels[static_cast<std::size_t>(reference)] + "'");
    }

    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        if (view.codes[i] >= 0) rows.push_back(i);
    }
    table.n_included = rows.size();

    std::vector<std::int32_t> dummy_code_of(view.category_count(), -1);
    std::vector<std::string> names{"intercept"};
    Eigen::Index next_column = 1;
    for (auto c : present) {
        if (c == reference) continue;
        dummy_code_of[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(next_column++);
        names.push_back(std::string(attribute_name(risk_attribute)) + "=" +
                        view.labels[static_cast<std::size_t>(c)]);
    }
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), next_column);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        X(static_cast<Eigen::Index>(r), 0) = 1.0;
        const auto code = view.codes[rows[r]];
        const auto column = dummy_code_of[static_cast<std::size_t>(code)];
        if (column >= 0) X(static_cast<Eigen::Index>(r), column) = 1.0;
        y(static_cast<Eigen::Index>(r)) = exposed(rows[r]) ? 1.0 : 0.0;
    }

    const LogisticFit fit = fit_logistic(y, X, names);

    // Fitted exposure probability per category and the delta-method interval
    // for RR = p(category) / p(reference). The model is saturated, so the
    // fitted probabilities equal the category proportions.
    const double eta_ref = fit.coefficients(0);
    const double p_ref = logistic(eta_ref);
    for (auto c : present) {
        CategoryRiskRow row;
        row.label = view.labels[static_cast<std::size_t>(c)];
        std::size_t members = 0, members_exposed = 0;
        for (auto i : rows) {
            if (view.codes[i] == c) {
                ++members;
                members_exposed += exposed(i) ? 1 : 0;
            }
        }
        row.n = members;
        row.exposed_pct = 100.0 * static_cast<double>(members_exposed) / static_cast<double>(members);
        if (c == reference) {
            row.is_reference = true;
            row.relative_risk = 1.0;
            row.ci_low = row.ci_high = 1.0;
            row.p_value = 1.0;
        } else {
            const auto column = dummy_code_of[static_cast<std::size_t>(c)];
            const double eta_c = eta_ref + fit.coefficients(column);
            const double p_c = logistic(eta_c);
            row.relative_risk = p_c / p_ref;
            // d log p / d eta = 1 - p; gradient over (intercept, this dummy).
            Eigen::VectorXd gradient = Eigen::VectorXd::Zero(fit.coefficients.size());
            gradient(0) = (1.0 - p_c) - (1.0 - p_ref);
            gradient(column) = 1.0 - p_c;
            const double var_log_rr = gradient.transpose() * fit.covariance * gradient;
            const double half_width = 1.96 * std::sqrt(std::max(0.0, var_log_rr));
            row.ci_low = row.relative_risk * std::exp(-half_width);
            row.ci_high = row.relative_risk * std::exp(half_width);
            row.p_value = fit.wald_p_values(column);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace traitnet
