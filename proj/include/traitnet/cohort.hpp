#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "traitnet/error.hpp"

namespace traitnet {

enum class Sex { female, male };
enum class StudyProgram { general, sports, vocational };
enum class BmiCategory { underweight, healthy, overweight, obese };
enum class UseFrequency { daily, sometimes, never };  // smoking and snuff
enum class AlcoholUse { never, at_most_monthly, twice_monthly_or_more };
enum class ActivityLevel { none, light, medium, hard };
enum class Contraceptive { non_user, progestin_only, low_estrogen, high_estrogen };
enum class Carriage { negative, positive };

// BMI category cutpoints at 18.5 / 25.0 / 30.0 kg/m^2.
BmiCategory bmi_category_from_value(double bmi);

struct IsoWeek {
    int year = 0;
    int week = 0;

    friend bool operator==(const IsoWeek&, const IsoWeek&) = default;
    friend auto operator<=>(const IsoWeek&, const IsoWeek&) = default;
};

// "2010-W38" style.
IsoWeek parse_iso_week(std::string_view token);
std::string format_iso_week(const IsoWeek& week);

struct Participant {
    std::string id;
    Sex sex = Sex::female;
    std::optional<double> age;
    std::optional<std::string> school;
    std::optional<StudyProgram> study_program;
    std::optional<BmiCategory> bmi_category;
    std::optional<UseFrequency> smoking;
    std::optional<UseFrequency> snuff;
    std::optional<AlcoholUse> alcohol;
    std::optional<ActivityLevel> physical_activity;
    std::optional<Contraceptive> contraceptive;  // women only
    Carriage carriage_direct = Carriage::negative;
    Carriage carriage_enrichment = Carriage::negative;
    std::optional<std::string> spa_type;
    std::optional<int> representativeness;  // 0..10
    std::optional<IsoWeek> attendance_week;
};

class Cohort {
public:
    Cohort() = default;

    // Validates id uniqueness, the contraceptive/sex restriction and the
    // representativeness range; throws ParseError naming the offending entry.
    static Cohort from_participants(std::vector<Participant> participants);

    std::size_t size() const noexcept { return participants_.size(); }
    const Participant& participant(std::size_t i) const { return participants_[i]; }
    const std::vector<Participant>& participants() const noexcept { return participants_; }

    std::optional<std::uint32_t> index_of(std::string_view id) const;
    std::uint32_t require_index(std::string_view id) const;

private:
    std::vector<Participant> participants_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

// Categorical attribute selectors usable in homophily / cross-tab machinery.
enum class Attribute {
    sex,
    school,
    study_program,
    bmi_category,
    smoking,
    snuff,
    alcohol,
    physical_activity,
    contraceptive,
    carriage_direct,
    carriage_enrichment,
    spa_type,
};

constexpr int kAttributeCount = 12;

std::string_view attribute_name(Attribute attr);
Attribute attribute_from_name(std::string_view name);

// Codes per participant against a label table; -1 marks a missing value.
// `reference` is the dummy-coding baseline (survey reference categories).
struct CategoricalView {
    Attribute attribute;
    std::vector<std::string> labels;
    std::vector<std::int32_t> codes;
    std::int32_t reference = 0;

    std::size_t category_count() const noexcept { return labels.size(); }
    std::size_t missing_count() const;
    std::vector<std::size_t> category_sizes() const;
    std::int32_t code_of(std::string_view label) const;  // -1 when unknown
};

CategoricalView categorical_view(const Cohort& cohort, Attribute attr);

enum class TraitPhenotype { direct, enrichment };

std::string_view trait_name(TraitPhenotype trait);
TraitPhenotype trait_from_name(std::string_view name);
Attribute trait_attribute(TraitPhenotype trait);

// 0/1 per participant; carriage fields are required, so never missing.
std::vector<std::uint8_t> trait_vector(const Cohort& cohort, TraitPhenotype trait);

}  // namespace traitnet
