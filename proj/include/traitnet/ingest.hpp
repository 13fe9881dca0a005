#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "traitnet/cohort.hpp"
#include "traitnet/network.hpp"

namespace traitnet {

struct IngestWarning {
    std::size_t row = 0;  // 1-based data row, 0 when not row-specific
    std::string message;
};

struct IngestReport {
    std::size_t n_participants = 0;
    std::size_t n_nominations_raw = 0;
    std::size_t n_nominations_kept = 0;
    std::size_t n_nominations_dropped_external = 0;  // target not in the cohort file
    std::size_t n_nominations_dropped_self = 0;
    std::size_t n_nominations_dropped_unknown_nominator = 0;
    std::size_t n_duplicate_nominations = 0;  // merged into an earlier (from, to)
    std::size_t n_flagless_nominations = 0;   // all five context flags false
    std::vector<IngestWarning> warnings;

    void add_warning(std::size_t row, std::string message) {
        warnings.push_back({row, std::move(message)});
    }
};

// Comma-delimited with a header row. Required columns: id, sex,
// carriage_direct, carriage_enrichment. Every other attribute column is
// optional; "NA" or an empty field marks a missing value. A `bmi` column with
// raw kg/m^2 values is accepted in place of bmi_category.
Cohort parse_cohort_csv(std::istream& in, IngestReport& report);

// Columns: from, to, physical, school, sports, home, other. Flag tokens:
// yes/no/1/0/true/false, case-insensitive.
std::vector<Nomination> parse_nominations_csv(std::istream& in, const Cohort& cohort,
                                              IngestReport& report);

// JSON mirrors of the same schemas (array of objects, same field names).
Cohort parse_cohort_json(std::istream& in, IngestReport& report);
std::vector<Nomination> parse_nominations_json(std::istream& in, const Cohort& cohort,
                                               IngestReport& report);

// Dispatch on a ".json" suffix, otherwise CSV.
Cohort load_cohort(const std::string& path, IngestReport& report);
std::vector<Nomination> load_nominations(const std::string& path, const Cohort& cohort,
                                         IngestReport& report);

void write_cohort_csv(const Cohort& cohort, std::ostream& out);
void write_nominations_csv(const Cohort& cohort, const std::vector<Nomination>& nominations,
                           std::ostream& out);

}  // namespace traitnet
