#include "traitnet/design.hpp"

namespace traitnet {

DesignMatrix dummy_design(const Cohort& cohort, const std::vector<Attribute>& attributes,
                          bool intercept) {
    const auto n = static_cast<Eigen::Index>(cohort.size());
    std::vector<CategoricalView> views;
    views.reserve(attributes.size());
    Eigen::Index columns = intercept ? 1 : 0;
    for (Attribute attr : attributes) {
        views.push_back(categorical_view(cohort, attr));
        if (views.back().category_count() < 2) {
            throw DegenerateError("dummy_design: attribute '" +
                                  std::string(attribute_name(attr)) +
                                  "' has fewer than two observed categories");
        }
        columns += static_cast<Eigen::Index>(views.back().category_count()) - 1;
    }

    DesignMatrix design;
    design.X = Eigen::MatrixXd::Zero(n, columns);
    design.complete.assign(cohort.size(), 1);
    if (intercept) {
        design.X.col(0).setOnes();
        design.column_names.push_back("intercept");
    }

    Eigen::Index column = intercept ? 1 : 0;
    for (const CategoricalView& view : views) {
        std::vector<Eigen::Index> column_of_code(view.category_count(), -1);
        for (std::size_t c = 0; c < view.category_count(); ++c) {
            if (static_cast<std::int32_t>(c) == view.reference) continue;
            column_of_code[c] = column;
            design.column_names.push_back(std::string(attribute_name(view.attribute)) + "=" +
                                          view.labels[c]);
            ++column;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto code = view.codes[static_cast<std::size_t>(i)];
            if (code < 0) {
                design.complete[static_cast<std::size_t>(i)] = 0;
            } else if (column_of_code[static_cast<std::size_t>(code)] >= 0) {
                design.X(i, column_of_code[static_cast<std::size_t>(code)]) = 1.0;
            }
        }
    }
    for (auto flag : design.complete) design.n_complete += flag;
    return design;
}

}  // namespace traitnet
