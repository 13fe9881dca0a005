#include "traitnet/descriptive.hpp"

#include <algorithm>
#include <map>

namespace traitnet {

PopularityByCategory popularity_by_category(const Cohort& cohort,
                                            const std::vector<Nomination>& nominations,
                                            Attribute attr, Layer layer, bool welch) {
    const CategoricalView view = categorical_view(cohort, attr);
    const std::vector<std::uint32_t> counts = popularity_counts(cohort, nominations, layer);

    PopularityByCategory out;
    out.attribute = attr;
    out.layer = layer;

    std::vector<std::vector<double>> groups(view.category_count());
    std::vector<std::size_t> never_nominated(view.category_count(), 0);
    std::size_t n_valued = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        if (counts[i] == 0) ++out.n_never_nominated;
        const auto code = view.codes[i];
        if (code < 0) continue;
        groups[code].push_back(static_cast<double>(counts[i]));
        if (counts[i] == 0) ++never_nominated[code];
        total += counts[i];
        ++n_valued;
    }
    // Cohort-wide mean, reported once next to the per-category rows.
    double cohort_total = 0.0;
    for (auto c : counts) cohort_total += c;
    out.overall_mean = cohort.size() ? cohort_total / static_cast<double>(cohort.size()) : 0.0;

    std::size_t never_nominated_valued = 0;
    for (auto v : never_nominated) never_nominated_valued += v;

    std::vector<std::vector<double>> test_groups;
    for (std::size_t c = 0; c < view.category_count(); ++c) {
        if (groups[c].empty()) {
            out.warnings.push_back("category '" + view.labels[c] + "' has no members, excluded");
            continue;
        }
        CategoryPopularity row;
        row.label = view.labels[c];
        row.n = groups[c].size();
        double sum = 0.0;
        for (double v : groups[c]) sum += v;
        row.mean_popularity = sum / static_cast<double>(groups[c].size());
        row.isolation_share_pct =
            never_nominated_valued
                ? 100.0 * static_cast<double>(never_nominated[c]) / static_cast<double>(never_nominated_valued)
                : 0.0;
        row.frequency_pct = 100.0 * static_cast<double>(groups[c].size()) / static_cast<double>(n_valued);
        out.categories.push_back(std::move(row));
        test_groups.push_back(std::move(groups[c]));
    }
    if (test_groups.size() < 2) throw DegenerateError("popularity_by_category: fewer than two categories");

    TestResult result;
    if (test_groups.size() == 2) {
        result = welch ? welch_t_test(test_groups[0], test_groups[1])
                       : pooled_t_test(test_groups[0], test_groups[1]);
    } else {
        result = one_way_anova(test_groups);
    }
    out.test = result.kind;
    out.statistic = result.statistic;
    out.df1 = result.df1;
    out.df2 = result.df2;
    out.p_value = result.p_value;
    return out;
}

SameWeekReport same_week_friend_proportion(const Cohort& cohort,
                                           const std::vector<Nomination>& nominations) {
    std::vector<std::vector<std::uint32_t>> named(cohort.size());
    for (const Nomination& nom : nominations) named[nom.from].push_back(nom.to);

    SameWeekReport out;
    std::map<IsoWeek, std::pair<std::size_t, double>> per_week;  // count, sum of fractions
    double fraction_sum = 0.0;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const Participant& p = cohort.participant(i);
        if (!p.attendance_week) {
            ++out.n_skipped;
            out.warnings.push_back("participant '" + p.id + "' lacks attendance_week, skipped");
            continue;
        }
        std::size_t dated_friends = 0;
        std::size_t same_week = 0;
        for (std::uint32_t friend_index : named[i]) {
            const auto& week = cohort.participant(friend_index).attendance_week;
            if (!week) continue;
            ++dated_friends;
            if (*week == *p.attendance_week) ++same_week;
        }
        if (dated_friends == 0) {
            ++out.n_skipped;
            out.warnings.push_back("participant '" + p.id + "' has no dated friends, skipped");
            continue;
        }
        const double fraction = 100.0 * static_cast<double>(same_week) / static_cast<double>(dated_friends);
        auto& [count, sum] = per_week[*p.attendance_week];
        ++count;
        sum += fraction;
        fraction_sum += fraction;
        ++out.n_participants_included;
    }
    for (const auto& [week, acc] : per_week) {
        out.weeks.push_back({week, acc.first, acc.second / static_cast<double>(acc.first)});
    }
    out.weighted_average_pct =
        out.n_participants_included ? fraction_sum / static_cast<double>(out.n_participants_included) : 0.0;
    return out;
}

RepresentativenessSummary representativeness_summary(const Cohort& cohort) {
    RepresentativenessSummary out;
    double sum = 0.0;
    std::size_t at_least_5 = 0;
    for (const Participant& p : cohort.participants()) {
        if (!p.representativeness) continue;
        ++out.histogram[static_cast<std::size_t>(*p.representativeness)];
        sum += *p.representativeness;
        if (*p.representativeness >= 5) ++at_least_5;
        ++out.n_scored;
    }
    if (out.n_scored == 0) {
        throw DegenerateError("representativeness_summary: no participant has a score");
    }
    out.mean = sum / static_cast<double>(out.n_scored);
    out.fraction_at_least_5_pct = 100.0 * static_cast<double>(at_least_5) / static_cast<double>(out.n_scored);
    return out;
}

}  // namespace traitnet
