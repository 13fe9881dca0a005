#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "traitnet/cohort.hpp"

namespace traitnet {

// Dummy coding against the survey reference categories. Rows cover every
// participant; `complete` marks rows with no missing covariate (incomplete
// rows carry zeros and are expected to be filtered by the caller).
struct DesignMatrix {
    Eigen::MatrixXd X;
    std::vector<std::string> column_names;
    std::vector<std::uint8_t> complete;
    std::size_t n_complete = 0;
};

DesignMatrix dummy_design(const Cohort& cohort, const std::vector<Attribute>& attributes,
                          bool intercept = true);

}  // namespace traitnet
