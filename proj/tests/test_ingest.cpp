#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "traitnet/ingest.hpp"

using namespace traitnet;

namespace {

Cohort parse_cohort_text(const std::string& text, IngestReport& report) {
    std::istringstream in(text);
    return parse_cohort_csv(in, report);
}

std::vector<Nomination> parse_noms_text(const std::string& text, const Cohort& cohort,
                                        IngestReport& report) {
    std::istringstream in(text);
    return parse_nominations_csv(in, cohort, report);
}

const std::string kSmallCohort =
    "id,sex,carriage_direct,carriage_enrichment,school,smoking\n"
    "P1,Female,positive,POSITIVE,H1,never\n"
    "P2,male,negative,negative,H1,sometimes\n"
    "P3,female,negative,positive,H2,\n";

}  // namespace

TEST_CASE("cohort rows parse with case-insensitive tokens and NA missing") {
    IngestReport report;
    const Cohort cohort = parse_cohort_text(kSmallCohort, report);
    CHECK(report.n_participants == 3);
    CHECK(cohort.participant(0).sex == Sex::female);
    CHECK(cohort.participant(0).carriage_direct == Carriage::positive);
    CHECK(cohort.participant(0).carriage_enrichment == Carriage::positive);
    CHECK(cohort.participant(2).smoking == std::nullopt);
    CHECK(cohort.participant(1).school == "H1");
    CHECK(report.warnings.empty());
}

TEST_CASE("unknown token in an optional column warns; in a required column fails") {
    IngestReport report;
    const Cohort cohort = parse_cohort_text(
        "id,sex,carriage_direct,carriage_enrichment,smoking\n"
        "P1,female,positive,negative,vaping\n",
        report);
    CHECK(cohort.participant(0).smoking == std::nullopt);
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].row == 1);

    IngestReport report2;
    CHECK_THROWS_AS(parse_cohort_text("id,sex,carriage_direct,carriage_enrichment\n"
                                      "P1,female,maybe,negative\n",
                                      report2),
                    ParseError);
}

TEST_CASE("missing required column and duplicate ids are hard errors") {
    IngestReport report;
    CHECK_THROWS_AS(parse_cohort_text("id,sex,carriage_direct\nP1,female,positive\n", report),
                    ParseError);
    CHECK_THROWS_WITH_AS(parse_cohort_text("id,sex,carriage_direct,carriage_enrichment\n"
                                           "P1,female,positive,negative\n"
                                           "P1,male,negative,negative\n",
                                           report),
                         doctest::Contains("duplicate participant id"), ParseError);
}

TEST_CASE("contraceptive use on a male row is a validation error") {
    IngestReport report;
    CHECK_THROWS_AS(parse_cohort_text("id,sex,carriage_direct,carriage_enrichment,contraceptive\n"
                                      "P1,male,negative,negative,progestin_only\n",
                                      report),
                    ParseError);
}

TEST_CASE("bmi_category derives from a raw bmi column at the published cutpoints") {
    IngestReport report;
    const Cohort cohort = parse_cohort_text(
        "id,sex,carriage_direct,carriage_enrichment,bmi\n"
        "P1,female,negative,negative,18.4\n"
        "P2,female,negative,negative,18.5\n"
        "P3,female,negative,negative,24.99\n"
        "P4,female,negative,negative,25.0\n"
        "P5,female,negative,negative,30.0\n",
        report);
    CHECK(cohort.participant(0).bmi_category == BmiCategory::underweight);
    CHECK(cohort.participant(1).bmi_category == BmiCategory::healthy);
    CHECK(cohort.participant(2).bmi_category == BmiCategory::healthy);
    CHECK(cohort.participant(3).bmi_category == BmiCategory::overweight);
    CHECK(cohort.participant(4).bmi_category == BmiCategory::obese);
}

TEST_CASE("nominations merge duplicates by OR-ing contexts") {
    IngestReport cohort_report;
    const Cohort cohort = parse_cohort_text(kSmallCohort, cohort_report);
    IngestReport report;
    const auto noms = parse_noms_text(
        "from,to,physical,school,sports,home,other\n"
        "P1,P2,yes,yes,no,no,no\n"
        "P1,P2,no,no,no,yes,no\n"
        "P2,P3,1,0,0,0,0\n"
        "P1,P1,no,no,no,no,yes\n"      // self-nomination dropped
        "P1,P9,yes,no,no,no,no\n"      // external target dropped
        "P3,P1,no,no,no,no,no\n",      // flagless, reaches overall only
        cohort, report);
    REQUIRE(noms.size() == 3);
    CHECK(noms[0].contexts.contains(Layer::physical));
    CHECK(noms[0].contexts.contains(Layer::school));
    CHECK(noms[0].contexts.contains(Layer::home));
    CHECK_FALSE(noms[0].contexts.contains(Layer::sports));
    CHECK(report.n_nominations_raw == 6);
    CHECK(report.n_duplicate_nominations == 1);
    CHECK(report.n_nominations_dropped_self == 1);
    CHECK(report.n_nominations_dropped_external == 1);
    CHECK(report.n_flagless_nominations == 1);
    // Counter identity: raw = kept + merged + self + external + unknown-from.
    CHECK(report.n_nominations_raw ==
          report.n_nominations_kept + report.n_duplicate_nominations +
              report.n_nominations_dropped_self + report.n_nominations_dropped_external +
              report.n_nominations_dropped_unknown_nominator);

    const ContactNetwork overall = build_network(cohort, noms, Layer::overall);
    CHECK(overall.edge_count() == 3);  // P1-P2, P2-P3, P3-P1
    const ContactNetwork school = build_network(cohort, noms, Layer::school);
    CHECK(school.edge_count() == 1);
}

TEST_CASE("malformed flag tokens and six distinct targets are row errors") {
    IngestReport cohort_report;
    const Cohort cohort = parse_cohort_text(
        "id,sex,carriage_direct,carriage_enrichment\n"
        "P1,female,negative,negative\n"
        "P2,male,negative,negative\n"
        "P3,male,negative,negative\n"
        "P4,male,negative,negative\n"
        "P5,male,negative,negative\n"
        "P6,male,negative,negative\n"
        "P7,male,negative,negative\n",
        cohort_report);
    IngestReport report;
    CHECK_THROWS_WITH_AS(parse_noms_text("from,to,physical,school,sports,home,other\n"
                                         "P1,P2,yep,no,no,no,no\n",
                                         cohort, report),
                         doctest::Contains("row 1"), ParseError);
    IngestReport report2;
    CHECK_THROWS_WITH_AS(parse_noms_text("from,to,physical\n"
                                         "P1,P2,yes\nP1,P3,yes\nP1,P4,yes\nP1,P5,yes\nP1,P6,yes\n"
                                         "P1,P7,yes\n",
                                         cohort, report2),
                         doctest::Contains("more than 5"), ParseError);
}

TEST_CASE("cohort CSV round-trips exactly") {
    IngestReport report;
    const std::string csv =
        "id,sex,carriage_direct,carriage_enrichment,school,study_program,bmi_category,smoking,"
        "snuff,alcohol,physical_activity,contraceptive,spa_type,representativeness,"
        "attendance_week,age\n"
        "P1,female,positive,negative,H1,general,healthy,never,daily,never,light,low_estrogen,"
        "t084,7,2010-W38,17.25\n"
        "P2,male,negative,positive,H2,sports,obese,daily,never,at_most_monthly,hard,NA,NA,NA,NA,"
        "NA\n";
    const Cohort cohort = parse_cohort_text(csv, report);
    std::ostringstream out;
    write_cohort_csv(cohort, out);
    IngestReport report2;
    const Cohort again = parse_cohort_text(out.str(), report2);
    REQUIRE(again.size() == cohort.size());
    std::ostringstream out2;
    write_cohort_csv(again, out2);
    CHECK(out.str() == out2.str());
    CHECK(again.participant(0).spa_type == "t084");
    CHECK(again.participant(0).attendance_week == IsoWeek{2010, 38});
    CHECK(again.participant(1).contraceptive == std::nullopt);
}

TEST_CASE("JSON mirror parses to the same cohort as CSV") {
    IngestReport csv_report;
    const Cohort csv_cohort = parse_cohort_text(kSmallCohort, csv_report);
    const std::string json_text = R"([
        {"id": "P1", "sex": "Female", "carriage_direct": "positive",
         "carriage_enrichment": "POSITIVE", "school": "H1", "smoking": "never"},
        {"id": "P2", "sex": "male", "carriage_direct": "negative",
         "carriage_enrichment": "negative", "school": "H1", "smoking": "sometimes"},
        {"id": "P3", "sex": "female", "carriage_direct": "negative",
         "carriage_enrichment": "positive", "school": "H2", "smoking": null}
    ])";
    IngestReport json_report;
    std::istringstream in(json_text);
    const Cohort json_cohort = parse_cohort_json(in, json_report);
    REQUIRE(json_cohort.size() == csv_cohort.size());
    std::ostringstream a, b;
    write_cohort_csv(csv_cohort, a);
    write_cohort_csv(json_cohort, b);
    CHECK(a.str() == b.str());
}

TEST_CASE("nomination endpoints always land inside the cohort") {
    IngestReport cohort_report;
    const Cohort cohort = parse_cohort_text(kSmallCohort, cohort_report);
    IngestReport report;
    const auto noms = parse_noms_text(
        "from,to,physical,school,sports,home,other\n"
        "P1,P2,yes,no,no,no,no\n"
        "PX,P1,yes,no,no,no,no\n"
        "P2,PY,yes,no,no,no,no\n",
        cohort, report);
    for (const Nomination& n : noms) {
        CHECK(n.from < cohort.size());
        CHECK(n.to < cohort.size());
    }
    CHECK(report.n_nominations_dropped_unknown_nominator == 1);
    CHECK(report.n_nominations_dropped_external == 1);
}

TEST_CASE("mangled inputs raise parse errors instead of crashing") {
    const std::vector<std::string> bad_cohorts = {
        "",                                                  // no header
        "id,sex\nP1,female\n",                               // missing required columns
        "id,sex,carriage_direct,carriage_enrichment\nP1\n",  // short row
        "id,sex,carriage_direct,carriage_enrichment\nP1,female,positive,negative,extra\n",
        "id,sex,carriage_direct,carriage_enrichment\n,female,positive,negative\n",  // empty id
    };
    for (const std::string& text : bad_cohorts) {
        IngestReport report;
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_cohort_csv(in, report), ParseError);
    }
    IngestReport cohort_report;
    std::istringstream cohort_in(kSmallCohort);
    const Cohort cohort = parse_cohort_csv(cohort_in, cohort_report);
    const std::vector<std::string> bad_noms = {
        "",
        "from\nP1\n",
        "from,to\nP1\n",
        "from,to,physical\nP1,P2,maybe\n",
    };
    for (const std::string& text : bad_noms) {
        IngestReport report;
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_nominations_csv(in, cohort, report), ParseError);
    }
    // Junk JSON is a parse error too, not a crash.
    IngestReport report;
    std::istringstream in("{not json");
    CHECK_THROWS_AS(parse_cohort_json(in, report), ParseError);
    std::istringstream in2("[1, 2]");
    CHECK_THROWS_AS(parse_cohort_json(in2, report), ParseError);
}
