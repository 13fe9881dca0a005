#include "traitnet/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace traitnet {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool is_missing_token(const std::string& token) {
    return token.empty() || lower(token) == "na";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

// Token tables for the categorical columns.
template <typename Enum>
struct TokenTable {
    std::vector<std::pair<std::string, Enum>> entries;

    std::optional<Enum> find(const std::string& token) const {
        const std::string t = lower(token);
        for (const auto& [name, value] : entries) {
            if (name == t) return value;
        }
        return std::nullopt;
    }
};

const TokenTable<Sex> kSexTokens{{{"female", Sex::female}, {"male", Sex::male}}};
const TokenTable<StudyProgram> kProgramTokens{{{"general", StudyProgram::general},
                                               {"sports", StudyProgram::sports},
                                               {"vocational", StudyProgram::vocational}}};
const TokenTable<BmiCategory> kBmiTokens{{{"underweight", BmiCategory::underweight},
                                          {"healthy", BmiCategory::healthy},
                                          {"overweight", BmiCategory::overweight},
                                          {"obese", BmiCategory::obese}}};
const TokenTable<UseFrequency> kFrequencyTokens{{{"daily", UseFrequency::daily},
                                                 {"sometimes", UseFrequency::sometimes},
                                                 {"never", UseFrequency::never}}};
const TokenTable<AlcoholUse> kAlcoholTokens{{{"never", AlcoholUse::never},
                                             {"at_most_monthly", AlcoholUse::at_most_monthly},
                                             {"twice_monthly_or_more", AlcoholUse::twice_monthly_or_more}}};
const TokenTable<ActivityLevel> kActivityTokens{{{"none", ActivityLevel::none},
                                                 {"light", ActivityLevel::light},
                                                 {"medium", ActivityLevel::medium},
                                                 {"hard", ActivityLevel::hard}}};
const TokenTable<Contraceptive> kContraceptiveTokens{{{"non_user", Contraceptive::non_user},
                                                      {"progestin_only", Contraceptive::progestin_only},
                                                      {"low_estrogen", Contraceptive::low_estrogen},
                                                      {"high_estrogen", Contraceptive::high_estrogen}}};
const TokenTable<Carriage> kCarriageTokens{{{"positive", Carriage::positive},
                                            {"negative", Carriage::negative}}};

std::optional<bool> parse_flag(const std::string& token) {
    const std::string t = lower(token);
    if (t == "yes" || t == "1" || t == "true") return true;
    if (t == "no" || t == "0" || t == "false") return false;
    return std::nullopt;
}

// Field accessor indirection so CSV and JSON rows share one row parser.
struct Row {
    std::size_t number = 0;  // 1-based data row
    std::map<std::string, std::string> fields;

    std::optional<std::string> get(const std::string& column) const {
        auto it = fields.find(column);
        if (it == fields.end() || is_missing_token(it->second)) return std::nullopt;
        return it->second;
    }
};

template <typename Enum>
std::optional<Enum> parse_optional_enum(const Row& row, const std::string& column,
                                        const TokenTable<Enum>& table, IngestReport& report) {
    auto raw = row.get(column);
    if (!raw) return std::nullopt;
    auto value = table.find(*raw);
    if (!value) {
        report.add_warning(row.number, "unknown " + column + " token '" + *raw + "', treated as missing");
        return std::nullopt;
    }
    return value;
}

Participant parse_participant_row(const Row& row, IngestReport& report) {
    Participant p;
    auto id = row.get("id");
    if (!id) throw ParseError("missing id", row.number);
    p.id = *id;

    auto sex_raw = row.get("sex");
    if (!sex_raw) throw ParseError("missing required field sex", row.number);
    auto sex = kSexTokens.find(*sex_raw);
    if (!sex) throw ParseError("unknown sex token '" + *sex_raw + "'", row.number);
    p.sex = *sex;

    for (auto&& [column, member] :
         {std::pair{"carriage_direct", &Participant::carriage_direct},
          std::pair{"carriage_enrichment", &Participant::carriage_enrichment}}) {
        auto raw = row.get(column);
        if (!raw) throw ParseError(std::string("missing required field ") + column, row.number);
        auto value = kCarriageTokens.find(*raw);
        if (!value) throw ParseError(std::string("unknown ") + column + " token '" + *raw + "'", row.number);
        p.*member = *value;
    }

    if (auto raw = row.get("age")) {
        try {
            p.age = std::stod(*raw);
        } catch (const std::exception&) {
            report.add_warning(row.number, "unparsable age '" + *raw + "', treated as missing");
        }
    }
    if (auto raw = row.get("school")) p.school = *raw;
    p.study_program = parse_optional_enum(row, "study_program", kProgramTokens, report);
    p.smoking = parse_optional_enum(row, "smoking", kFrequencyTokens, report);
    p.snuff = parse_optional_enum(row, "snuff", kFrequencyTokens, report);
    p.alcohol = parse_optional_enum(row, "alcohol", kAlcoholTokens, report);
    p.physical_activity = parse_optional_enum(row, "physical_activity", kActivityTokens, report);
    p.contraceptive = parse_optional_enum(row, "contraceptive", kContraceptiveTokens, report);

    p.bmi_category = parse_optional_enum(row, "bmi_category", kBmiTokens, report);
    if (!p.bmi_category) {
        if (auto raw = row.get("bmi")) {
            try {
                p.bmi_category = bmi_category_from_value(std::stod(*raw));
            } catch (const std::exception&) {
                report.add_warning(row.number, "unparsable bmi '" + *raw + "', treated as missing");
            }
        }
    }

    if (auto raw = row.get("spa_type")) p.spa_type = *raw;
    if (auto raw = row.get("representativeness")) {
        int score = 0;
        auto res = std::from_chars(raw->data(), raw->data() + raw->size(), score);
        if (res.ec != std::errc() || res.ptr != raw->data() + raw->size() || score < 0 || score > 10) {
            report.add_warning(row.number,
                               "representativeness '" + *raw + "' outside 0..10, treated as missing");
        } else {
            p.representativeness = score;
        }
    }
    if (auto raw = row.get("attendance_week")) {
        try {
            p.attendance_week = parse_iso_week(*raw);
        } catch (const ParseError&) {
            report.add_warning(row.number, "unparsable attendance_week '" + *raw + "', treated as missing");
        }
    }

    if (p.contraceptive && p.sex != Sex::female) {
        throw ParseError("contraceptive use recorded for non-female participant '" + p.id + "'",
                         row.number);
    }
    return p;
}

Cohort cohort_from_rows(const std::vector<Row>& rows, IngestReport& report) {
    std::vector<Participant> participants;
    participants.reserve(rows.size());
    for (const Row& row : rows) participants.push_back(parse_participant_row(row, report));
    // Re-check duplicates here so the error carries the input row number.
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto [it, inserted] = seen.emplace(participants[i].id, rows[i].number);
        if (!inserted) {
            throw ParseError("duplicate participant id '" + participants[i].id + "' (first at row " +
                                 std::to_string(it->second) + ")",
                             rows[i].number);
        }
    }
    Cohort cohort = Cohort::from_participants(std::move(participants));
    report.n_participants = cohort.size();
    return cohort;
}

constexpr std::array<std::string_view, 5> kContextColumns = {"physical", "school", "sports", "home",
                                                             "other"};

std::vector<Nomination> nominations_from_rows(const std::vector<Row>& rows, const Cohort& cohort,
                                              IngestReport& report) {
    std::vector<Nomination> nominations;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> by_pair;
    std::vector<std::size_t> distinct_targets(cohort.size(), 0);

    for (const Row& row : rows) {
        ++report.n_nominations_raw;
        auto from_raw = row.get("from");
        auto to_raw = row.get("to");
        if (!from_raw || !to_raw) throw ParseError("missing from/to id", row.number);

        ContextSet contexts;
        for (std::size_t c = 0; c < kContextColumns.size(); ++c) {
            auto raw = row.get(std::string(kContextColumns[c]));
            if (!raw) continue;  // absent flag reads as "no"
            auto flag = parse_flag(*raw);
            if (!flag) {
                throw ParseError("malformed " + std::string(kContextColumns[c]) + " flag '" + *raw + "'",
                                 row.number);
            }
            if (*flag) contexts.set(static_cast<Layer>(c + 1));
        }

        if (*from_raw == *to_raw) {
            ++report.n_nominations_dropped_self;
            report.add_warning(row.number, "self-nomination by '" + *from_raw + "' dropped");
            continue;
        }
        auto from = cohort.index_of(*from_raw);
        if (!from) {
            ++report.n_nominations_dropped_unknown_nominator;
            report.add_warning(row.number, "nominator '" + *from_raw + "' not in cohort, dropped");
            continue;
        }
        auto to = cohort.index_of(*to_raw);
        if (!to) {
            ++report.n_nominations_dropped_external;
            continue;
        }

        const std::pair<std::uint32_t, std::uint32_t> key{*from, *to};
        if (auto it = by_pair.find(key); it != by_pair.end()) {
            nominations[it->second].contexts |= contexts;
            ++report.n_duplicate_nominations;
            continue;
        }
        if (++distinct_targets[*from] > 5) {
            throw ParseError("nominator '" + *from_raw + "' names more than 5 distinct targets",
                             row.number);
        }
        by_pair.emplace(key, nominations.size());
        nominations.push_back({*from, *to, contexts});
    }

    for (const Nomination& nom : nominations) {
        if (nom.contexts.empty()) {
            ++report.n_flagless_nominations;
            report.add_warning(0, "nomination " + cohort.participant(nom.from).id + " -> " +
                                      cohort.participant(nom.to).id +
                                      " has no context flags; it only reaches the overall layer");
        }
    }
    report.n_nominations_kept += nominations.size();
    return nominations;
}

std::vector<Row> read_csv_rows(std::istream& in, const std::vector<std::string>& required_columns,
                               const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(std::string("empty ") + what + " file");
    std::vector<std::string> header;
    for (auto& name : split_csv_line(line)) header.push_back(lower(name));
    for (const auto& column : required_columns) {
        if (std::find(header.begin(), header.end(), column) == header.end()) {
            throw ParseError(std::string(what) + " file is missing required column '" + column + "'");
        }
    }
    std::vector<Row> rows;
    std::size_t row_number = 0;
    while (std::getline(in, line)) {
        ++row_number;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             row_number);
        }
        Row row;
        row.number = row_number;
        for (std::size_t i = 0; i < header.size(); ++i) row.fields[header[i]] = fields[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Row> read_json_rows(std::istream& in, const char* what) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(what) + " JSON: " + e.what());
    }
    if (!doc.is_array()) throw ParseError(std::string(what) + " JSON must be an array of objects");
    std::vector<Row> rows;
    std::size_t row_number = 0;
    for (const auto& item : doc) {
        ++row_number;
        if (!item.is_object()) throw ParseError("entry is not an object", row_number);
        Row row;
        row.number = row_number;
        for (const auto& [key, value] : item.items()) {
            if (value.is_null()) continue;
            row.fields[lower(key)] =
                value.is_string() ? value.get<std::string>() : value.dump();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_field(const std::optional<std::string>& value) { return value ? *value : "NA"; }

template <typename Enum, typename Table>
std::string enum_token(const Table& table, Enum value) {
    for (const auto& [name, v] : table.entries) {
        if (v == value) return name;
    }
    return "NA";
}

template <typename Enum, typename Table>
std::string csv_enum_field(const Table& table, const std::optional<Enum>& value) {
    return value ? enum_token(table, *value) : "NA";
}

}  // namespace

Cohort parse_cohort_csv(std::istream& in, IngestReport& report) {
    const std::vector<std::string> required = {"id", "sex", "carriage_direct", "carriage_enrichment"};
    return cohort_from_rows(read_csv_rows(in, required, "cohort"), report);
}

std::vector<Nomination> parse_nominations_csv(std::istream& in, const Cohort& cohort,
                                              IngestReport& report) {
    const std::vector<std::string> required = {"from", "to"};
    return nominations_from_rows(read_csv_rows(in, required, "nominations"), cohort, report);
}

Cohort parse_cohort_json(std::istream& in, IngestReport& report) {
    return cohort_from_rows(read_json_rows(in, "cohort"), report);
}

std::vector<Nomination> parse_nominations_json(std::istream& in, const Cohort& cohort,
                                               IngestReport& report) {
    return nominations_from_rows(read_json_rows(in, "nominations"), cohort, report);
}

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

bool has_json_suffix(const std::string& path) {
    return path.size() >= 5 && path.substr(path.size() - 5) == ".json";
}

}  // namespace

Cohort load_cohort(const std::string& path, IngestReport& report) {
    auto in = open_input(path);
    return has_json_suffix(path) ? parse_cohort_json(in, report) : parse_cohort_csv(in, report);
}

std::vector<Nomination> load_nominations(const std::string& path, const Cohort& cohort,
                                         IngestReport& report) {
    auto in = open_input(path);
    return has_json_suffix(path) ? parse_nominations_json(in, cohort, report)
                                 : parse_nominations_csv(in, cohort, report);
}

void write_cohort_csv(const Cohort& cohort, std::ostream& out) {
    out << "id,sex,age,school,study_program,bmi_category,smoking,snuff,alcohol,physical_activity,"
           "contraceptive,carriage_direct,carriage_enrichment,spa_type,representativeness,"
           "attendance_week\n";
    for (const Participant& p : cohort.participants()) {
        out << p.id << ',' << enum_token(kSexTokens, p.sex) << ',';
        if (p.age) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6g", *p.age);
            out << buf;
        } else {
            out << "NA";
        }
        out << ',' << csv_field(p.school) << ',' << csv_enum_field(kProgramTokens, p.study_program)
            << ',' << csv_enum_field(kBmiTokens, p.bmi_category) << ','
            << csv_enum_field(kFrequencyTokens, p.smoking) << ','
            << csv_enum_field(kFrequencyTokens, p.snuff) << ','
            << csv_enum_field(kAlcoholTokens, p.alcohol) << ','
            << csv_enum_field(kActivityTokens, p.physical_activity) << ','
            << csv_enum_field(kContraceptiveTokens, p.contraceptive) << ','
            << enum_token(kCarriageTokens, p.carriage_direct) << ','
            << enum_token(kCarriageTokens, p.carriage_enrichment) << ',' << csv_field(p.spa_type)
            << ',' << (p.representativeness ? std::to_string(*p.representativeness) : "NA") << ','
            << (p.attendance_week ? format_iso_week(*p.attendance_week) : "NA") << '\n';
    }
}

void write_nominations_csv(const Cohort& cohort, const std::vector<Nomination>& nominations,
                           std::ostream& out) {
    out << "from,to,physical,school,sports,home,other\n";
    for (const Nomination& nom : nominations) {
        out << cohort.participant(nom.from).id << ',' << cohort.participant(nom.to).id;
        for (int c = 0; c < kContextCount; ++c) {
            out << ',' << (nom.contexts.contains(static_cast<Layer>(c + 1)) ? "yes" : "no");
        }
        out << '\n';
    }
}

}  // namespace traitnet
