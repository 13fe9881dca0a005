#include "traitnet/cohort.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <set>

namespace traitnet {

BmiCategory bmi_category_from_value(double bmi) {
    if (bmi < 18.5) return BmiCategory::underweight;
    if (bmi < 25.0) return BmiCategory::healthy;
    if (bmi < 30.0) return BmiCategory::overweight;
    return BmiCategory::obese;
}

IsoWeek parse_iso_week(std::string_view token) {
    // YYYY-Www
    const auto dash = token.find("-W");
    if (dash == std::string_view::npos) throw ParseError("bad ISO week '" + std::string(token) + "'");
    IsoWeek out;
    const auto year_part = token.substr(0, dash);
    const auto week_part = token.substr(dash + 2);
    auto r1 = std::from_chars(year_part.data(), year_part.data() + year_part.size(), out.year);
    auto r2 = std::from_chars(week_part.data(), week_part.data() + week_part.size(), out.week);
    if (r1.ec != std::errc() || r2.ec != std::errc() || out.week < 1 || out.week > 53) {
        throw ParseError("bad ISO week '" + std::string(token) + "'");
    }
    return out;
}

std::string format_iso_week(const IsoWeek& week) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-W%02d", week.year, week.week);
    return buf;
}

Cohort Cohort::from_participants(std::vector<Participant> participants) {
    Cohort cohort;
    cohort.participants_ = std::move(participants);
    cohort.index_.reserve(cohort.participants_.size());
    for (std::uint32_t i = 0; i < cohort.participants_.size(); ++i) {
        const Participant& p = cohort.participants_[i];
        if (p.id.empty()) throw ParseError("participant with empty id", i + 1);
        if (!cohort.index_.emplace(p.id, i).second) {
            throw ParseError("duplicate participant id '" + p.id + "'", i + 1);
        }
        if (p.contraceptive && p.sex != Sex::female) {
            throw ParseError("contraceptive use recorded for non-female participant '" + p.id + "'", i + 1);
        }
        if (p.representativeness && (*p.representativeness < 0 || *p.representativeness > 10)) {
            throw ParseError("representativeness outside 0..10 for '" + p.id + "'", i + 1);
        }
    }
    return cohort;
}

std::optional<std::uint32_t> Cohort::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t Cohort::require_index(std::string_view id) const {
    auto idx = index_of(id);
    if (!idx) throw LookupError("unknown participant id '" + std::string(id) + "'");
    return *idx;
}

namespace {

constexpr std::array<std::string_view, kAttributeCount> kAttributeNames = {
    "sex",       "school", "study_program",     "bmi_category",  "smoking",           "snuff",
    "alcohol",   "physical_activity", "contraceptive", "carriage_direct", "carriage_enrichment", "spa_type",
};

}  // namespace

std::string_view attribute_name(Attribute attr) {
    return kAttributeNames[static_cast<int>(attr)];
}

Attribute attribute_from_name(std::string_view name) {
    for (int i = 0; i < kAttributeCount; ++i) {
        if (kAttributeNames[i] == name) return static_cast<Attribute>(i);
    }
    throw ConfigError("unknown attribute '" + std::string(name) + "'");
}

std::size_t CategoricalView::missing_count() const {
    return static_cast<std::size_t>(std::count(codes.begin(), codes.end(), -1));
}

std::vector<std::size_t> CategoricalView::category_sizes() const {
    std::vector<std::size_t> sizes(labels.size(), 0);
    for (auto c : codes) {
        if (c >= 0) ++sizes[static_cast<std::size_t>(c)];
    }
    return sizes;
}

std::int32_t CategoricalView::code_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<std::int32_t>(i);
    }
    return -1;
}

namespace {

template <typename Enum, std::size_t N>
CategoricalView fixed_view(const Cohort& cohort, Attribute attr,
                           const std::array<std::string_view, N>& labels,
                           std::int32_t reference,
                           std::optional<Enum> (*getter)(const Participant&)) {
    CategoricalView view;
    view.attribute = attr;
    view.labels.assign(labels.begin(), labels.end());
    view.reference = reference;
    view.codes.reserve(cohort.size());
    for (const Participant& p : cohort.participants()) {
        auto v = getter(p);
        view.codes.push_back(v ? static_cast<std::int32_t>(*v) : -1);
    }
    return view;
}

CategoricalView string_view_attr(const Cohort& cohort, Attribute attr,
                                 const std::optional<std::string> Participant::*field) {
    CategoricalView view;
    view.attribute = attr;
    std::set<std::string> distinct;
    for (const Participant& p : cohort.participants()) {
        if (p.*field) distinct.insert(*(p.*field));
    }
    view.labels.assign(distinct.begin(), distinct.end());
    std::map<std::string, std::int32_t> code;
    for (std::size_t i = 0; i < view.labels.size(); ++i) code[view.labels[i]] = static_cast<std::int32_t>(i);
    view.codes.reserve(cohort.size());
    for (const Participant& p : cohort.participants()) {
        view.codes.push_back(p.*field ? code[*(p.*field)] : -1);
    }
    view.reference = 0;
    return view;
}

}  // namespace

CategoricalView categorical_view(const Cohort& cohort, Attribute attr) {
    using std::optional;
    switch (attr) {
        case Attribute::sex:
            return fixed_view<Sex, 2>(cohort, attr, {"female", "male"}, 0,
                                      +[](const Participant& p) { return optional<Sex>(p.sex); });
        case Attribute::school:
            return string_view_attr(cohort, attr, &Participant::school);
        case Attribute::study_program:
            return fixed_view<StudyProgram, 3>(cohort, attr, {"general", "sports", "vocational"}, 2,
                                               +[](const Participant& p) { return p.study_program; });
        case Attribute::bmi_category:
            return fixed_view<BmiCategory, 4>(cohort, attr,
                                              {"underweight", "healthy", "overweight", "obese"}, 1,
                                              +[](const Participant& p) { return p.bmi_category; });
        case Attribute::smoking:
            return fixed_view<UseFrequency, 3>(cohort, attr, {"daily", "sometimes", "never"}, 0,
                                               +[](const Participant& p) { return p.smoking; });
        case Attribute::snuff:
            return fixed_view<UseFrequency, 3>(cohort, attr, {"daily", "sometimes", "never"}, 0,
                                               +[](const Participant& p) { return p.snuff; });
        case Attribute::alcohol:
            return fixed_view<AlcoholUse, 3>(cohort, attr,
                                             {"never", "at_most_monthly", "twice_monthly_or_more"}, 2,
                                             +[](const Participant& p) { return p.alcohol; });
        case Attribute::physical_activity:
            return fixed_view<ActivityLevel, 4>(cohort, attr, {"none", "light", "medium", "hard"}, 1,
                                                +[](const Participant& p) { return p.physical_activity; });
        case Attribute::contraceptive:
            return fixed_view<Contraceptive, 4>(
                cohort, attr, {"non_user", "progestin_only", "low_estrogen", "high_estrogen"}, 0,
                +[](const Participant& p) { return p.contraceptive; });
        case Attribute::carriage_direct:
            return fixed_view<Carriage, 2>(cohort, attr, {"negative", "positive"}, 0,
                                           +[](const Participant& p) { return optional<Carriage>(p.carriage_direct); });
        case Attribute::carriage_enrichment:
            return fixed_view<Carriage, 2>(cohort, attr, {"negative", "positive"}, 0,
                                           +[](const Participant& p) { return optional<Carriage>(p.carriage_enrichment); });
        case Attribute::spa_type:
            return string_view_attr(cohort, attr, &Participant::spa_type);
    }
    throw ConfigError("unhandled attribute selector");
}

std::string_view trait_name(TraitPhenotype trait) {
    return trait == TraitPhenotype::direct ? "direct" : "enrichment";
}

TraitPhenotype trait_from_name(std::string_view name) {
    if (name == "direct") return TraitPhenotype::direct;
    if (name == "enrichment") return TraitPhenotype::enrichment;
    throw ConfigError("unknown trait phenotype '" + std::string(name) + "' (expected direct|enrichment)");
}

Attribute trait_attribute(TraitPhenotype trait) {
    return trait == TraitPhenotype::direct ? Attribute::carriage_direct : Attribute::carriage_enrichment;
}

std::vector<std::uint8_t> trait_vector(const Cohort& cohort, TraitPhenotype trait) {
    std::vector<std::uint8_t> out;
    out.reserve(cohort.size());
    for (const Participant& p : cohort.participants()) {
        const Carriage c = trait == TraitPhenotype::direct ? p.carriage_direct : p.carriage_enrichment;
        out.push_back(c == Carriage::positive ? 1 : 0);
    }
    return out;
}

}  // namespace traitnet
