#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "dix/graph.hpp"

namespace dix {

// The nine reviewer tags kept for analysis, in canonical column order.
inline constexpr std::array<const char*, 9> kTagVocabulary = {
    "confirmation",  "controversial",    "good-for-teaching",
    "hypothesis",    "negative-null",    "new-finding",
    "novel-drug-target", "refutation",   "technical-advance",
};

// Tags present in raw exports but not analyzed; dropped with a count.
inline constexpr std::array<const char*, 3> kExcludedTags = {
    "clinical-trial",
    "systematic-review",
    "review-commentary",
};

enum class TagClass { Newness, NonNewness, Unclassified };

// tag -> expectation class; shipped as data (data/tag_classes.tsv mirrors
// defaults()) and overridable per run.
class TagClassification {
public:
    static TagClassification defaults();
    static TagClassification load(const std::string& path);

    TagClass class_of(const std::string& tag) const;
    // +1 for newness tags, -1 for non-newness, 0 for unclassified.
    int expected_sign(const std::string& tag) const;

private:
    std::map<std::string, TagClass> classes_;
};

struct ReviewRow {
    PaperId paper;
    int stars = 0;  // 1..3
    std::vector<std::string> tags;  // retained tags only, deduplicated per review
};

struct ReviewReport {
    std::size_t rows = 0;
    std::size_t dropped_excluded_tags = 0;
    std::size_t duplicate_tags = 0;  // same tag listed twice on one review
};

// Parses reviews.tsv: paper_id, stars, semicolon-joined tag list (may be
// empty). Unknown tags and stars outside {1,2,3} are row errors with line
// numbers.
std::vector<ReviewRow> load_reviews(const std::string& path, ReviewReport* report = nullptr);
std::vector<ReviewRow> parse_reviews(std::istream& in, const std::string& name, ReviewReport* report = nullptr);

struct AssessmentRecord {
    PaperId paper;
    std::size_t review_count = 0;
    double resc_sum = 0.0;
    double resc_avg = 0.0;
    std::array<std::size_t, 9> tag_counts{};  // kTagVocabulary order
};

// Aggregates reviews per paper: summed and averaged stars, per-tag counts of
// assigning reviewers. Output sorted by paper id; permutation invariant.
std::vector<AssessmentRecord> aggregate_assessments(const std::vector<ReviewRow>& rows);

int tag_column(const std::string& tag);  // index into kTagVocabulary, -1 if unknown

}  // namespace dix
