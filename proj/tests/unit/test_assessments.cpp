#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "dix/assessments.hpp"
#include "dix/errors.hpp"

using namespace dix;

namespace {

std::vector<ReviewRow> parse(const std::string& body, ReviewReport* report = nullptr) {
    std::istringstream in("paper_id\tstars\ttags\n" + body);
    return parse_reviews(in, "reviews", report);
}

}  // namespace

TEST_CASE("review rows parse stars and tag lists") {
    auto rows = parse("P1\t3\tnew-finding;hypothesis\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].paper == "P1");
    CHECK(rows[0].stars == 3);
    CHECK(rows[0].tags == std::vector<std::string>{"hypothesis", "new-finding"});
}

TEST_CASE("excluded tags are dropped with a count, stars still kept") {
    ReviewReport report;
    auto rows = parse("P1\t2\tclinical-trial\n", &report);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].stars == 2);
    CHECK(rows[0].tags.empty());
    CHECK(report.dropped_excluded_tags == 1);
}

TEST_CASE("stars outside 1..3 are row errors") {
    CHECK_THROWS_AS(parse("P1\t5\t\n"), ValidationError);
    CHECK_THROWS_AS(parse("P1\t0\t\n"), ValidationError);
    CHECK_THROWS_AS(parse("P1\tx\t\n"), ValidationError);
}

TEST_CASE("unknown tags are parse errors with line numbers") {
    try {
        parse("P1\t2\tshiny-new-tag\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("empty tag list and trailing separators are fine") {
    auto rows = parse("P1\t1\t\nP2\t2\tconfirmation;\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].tags.empty());
    CHECK(rows[1].tags == std::vector<std::string>{"confirmation"});
}

TEST_CASE("aggregation sums stars and counts assigning reviewers per tag") {
    auto rows = parse(
        "P1\t2\tnew-finding\n"
        "P1\t3\tnew-finding;controversial\n");
    auto records = aggregate_assessments(rows);
    REQUIRE(records.size() == 1);
    const auto& r = records[0];
    CHECK(r.resc_sum == doctest::Approx(5.0));
    CHECK(r.resc_avg == doctest::Approx(2.5));
    CHECK(r.review_count == 2);
    CHECK(r.tag_counts[static_cast<std::size_t>(tag_column("new-finding"))] == 2);
    CHECK(r.tag_counts[static_cast<std::size_t>(tag_column("controversial"))] == 1);
    CHECK(r.tag_counts[static_cast<std::size_t>(tag_column("refutation"))] == 0);
}

TEST_CASE("single review aggregates trivially") {
    auto records = aggregate_assessments(parse("P9\t1\t\n"));
    REQUIRE(records.size() == 1);
    CHECK(records[0].resc_sum == doctest::Approx(1.0));
    CHECK(records[0].resc_avg == doctest::Approx(1.0));
    for (auto c : records[0].tag_counts) CHECK(c == 0);
}

TEST_CASE("aggregation is permutation invariant and conserves tag assignments") {
    auto rows = parse(
        "P1\t2\tnew-finding\n"
        "P2\t1\thypothesis;refutation\n"
        "P1\t3\tcontroversial\n"
        "P3\t2\t\n"
        "P2\t2\thypothesis\n");
    std::size_t assignments = 0;
    for (const auto& r : rows) assignments += r.tags.size();

    auto base = aggregate_assessments(rows);
    std::mt19937 shuffle_rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(rows.begin(), rows.end(), shuffle_rng);
        auto again = aggregate_assessments(rows);
        REQUIRE(again.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(again[i].paper == base[i].paper);
            CHECK(again[i].resc_sum == doctest::Approx(base[i].resc_sum));
            CHECK(again[i].resc_avg == doctest::Approx(base[i].resc_avg));
            CHECK(again[i].tag_counts == base[i].tag_counts);
        }
    }

    std::size_t counted = 0;
    for (const auto& r : base) {
        for (auto c : r.tag_counts) counted += c;
    }
    CHECK(counted == assignments);

    // ReSc invariants: avg within [1,3], sum = avg * review count.
    for (const auto& r : base) {
        CHECK(r.resc_avg >= 1.0);
        CHECK(r.resc_avg <= 3.0);
        CHECK(r.resc_sum == doctest::Approx(r.resc_avg * static_cast<double>(r.review_count)));
        CHECK(r.resc_sum >= 1.0);
    }
}

TEST_CASE("tag classification defaults mirror the newness split") {
    auto c = TagClassification::defaults();
    CHECK(c.class_of("new-finding") == TagClass::Newness);
    CHECK(c.class_of("hypothesis") == TagClass::Newness);
    CHECK(c.class_of("novel-drug-target") == TagClass::Newness);
    CHECK(c.class_of("technical-advance") == TagClass::Newness);
    CHECK(c.class_of("confirmation") == TagClass::NonNewness);
    CHECK(c.class_of("good-for-teaching") == TagClass::NonNewness);
    CHECK(c.class_of("negative-null") == TagClass::NonNewness);
    CHECK(c.class_of("refutation") == TagClass::NonNewness);
    CHECK(c.class_of("controversial") == TagClass::Unclassified);
    CHECK(c.expected_sign("new-finding") == 1);
    CHECK(c.expected_sign("refutation") == -1);
    CHECK(c.expected_sign("controversial") == 0);
}
