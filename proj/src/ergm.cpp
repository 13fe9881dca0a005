#include "traitnet/ergm.hpp"

#include <algorithm>

namespace traitnet {

DyadDesign enumerate_dyads(const ContactNetwork& network, const Cohort& cohort,
                           const std::vector<Attribute>& attributes) {
    const std::uint64_t n = network.node_count();
    if (n < 2) throw ConfigError("enumerate_dyads: need at least two nodes");
    if (cohort.size() != n) throw ConfigError("enumerate_dyads: cohort/network size mismatch");

    DyadDesign design;
    design.attributes = attributes;
    design.term_names.push_back("edges");
    std::vector<CategoricalView> views;
    views.reserve(attributes.size());
    for (Attribute attr : attributes) {
        views.push_back(categorical_view(cohort, attr));
        design.term_names.push_back("match(" + std::string(attribute_name(attr)) + ")");
    }

    design.n_dyads = n * (n - 1) / 2;
    design.response = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(design.n_dyads));
    design.match.setZero(static_cast<Eigen::Index>(design.n_dyads),
                         static_cast<Eigen::Index>(attributes.size()));
    design.missing.setZero(static_cast<Eigen::Index>(design.n_dyads),
                           static_cast<Eigen::Index>(attributes.size()));

    // Row order: (0,1), (0,2), ..., (0,n-1), (1,2), ...
    Eigen::Index row = 0;
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v, ++row) {
            for (std::size_t a = 0; a < views.size(); ++a) {
                const auto cu = views[a].codes[u];
                const auto cv = views[a].codes[v];
                if (cu < 0 || cv < 0) {
                    design.missing(row, static_cast<Eigen::Index>(a)) = 1;
                } else if (cu == cv) {
                    design.match(row, static_cast<Eigen::Index>(a)) = 1.0;
                }
            }
        }
    }
    for (const auto& [u, v] : network.edges()) {
        const std::uint64_t base = static_cast<std::uint64_t>(u) * (2 * n - u - 1) / 2;
        design.response(static_cast<Eigen::Index>(base + (v - u - 1))) = 1.0;
    }
    return design;
}

namespace {

DyadicErgmFit fit_from_design(const ContactNetwork& network, const Cohort& cohort,
                              const DyadDesign& design, const LogisticOptions& options) {
    const Eigen::Index total = design.response.size();
    const Eigen::Index n_attrs = design.match.cols();

    std::vector<Eigen::Index> kept;
    kept.reserve(static_cast<std::size_t>(total));
    for (Eigen::Index i = 0; i < total; ++i) {
        bool complete = true;
        for (Eigen::Index a = 0; a < n_attrs; ++a) {
            if (design.missing(i, a)) {
                complete = false;
                break;
            }
        }
        if (complete) kept.push_back(i);
    }
    if (kept.empty()) throw DegenerateError("fit_dyadic_ergm: every dyad has a missing attribute");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(kept.size()), 1 + n_attrs);
    Eigen::VectorXd y(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const Eigen::Index row = kept[i];
        X(static_cast<Eigen::Index>(i), 0) = 1.0;
        for (Eigen::Index a = 0; a < n_attrs; ++a) {
            X(static_cast<Eigen::Index>(i), 1 + a) = design.match(row, a);
        }
        y(static_cast<Eigen::Index>(i)) = design.response(row);
    }

    const LogisticFit logit = fit_logistic(y, X, design.term_names, options);

    DyadicErgmFit fit;
    fit.n_dyads = kept.size();
    fit.n_dyads_excluded = design.n_dyads - kept.size();
    fit.log_likelihood = logit.log_likelihood;
    fit.iterations = logit.iterations;
    fit.converged = logit.converged;
    for (Eigen::Index j = 0; j < logit.coefficients.size(); ++j) {
        ErgmTerm term;
        term.name = design.term_names[static_cast<std::size_t>(j)];
        term.estimate = logit.coefficients(j);
        term.std_error = logit.std_errors(j);
        term.p_value = logit.wald_p_values(j);
        if (j > 0) {
            term.homophily_pct =
                homophily_fraction(network, categorical_view(cohort, design.attributes[j - 1]));
        }
        fit.terms.push_back(std::move(term));
    }
    return fit;
}

}  // namespace

DyadicErgmFit fit_dyadic_ergm(const ContactNetwork& network, const Cohort& cohort,
                              const std::vector<Attribute>& attributes,
                              const LogisticOptions& options) {
    if (network.edge_count() == 0) throw DegenerateError("fit_dyadic_ergm: network has no edges");
    return fit_from_design(network, cohort, enumerate_dyads(network, cohort, attributes), options);
}

std::vector<DyadicErgmFit> fit_dyadic_ergm_separate(const ContactNetwork& network,
                                                    const Cohort& cohort,
                                                    const std::vector<Attribute>& attributes,
                                                    const LogisticOptions& options) {
    std::vector<DyadicErgmFit> fits;
    fits.reserve(attributes.size());
    for (Attribute attr : attributes) {
        fits.push_back(fit_dyadic_ergm(network, cohort, {attr}, options));
    }
    return fits;
}

}  // namespace traitnet
