#include "dix/assessments.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "dix/errors.hpp"
#include "dix/tsv.hpp"

namespace dix {

TagClassification TagClassification::defaults() {
    TagClassification c;
    c.classes_ = {
        {"hypothesis", TagClass::Newness},
        {"new-finding", TagClass::Newness},
        {"novel-drug-target", TagClass::Newness},
        {"technical-advance", TagClass::Newness},
        {"confirmation", TagClass::NonNewness},
        {"good-for-teaching", TagClass::NonNewness},
        {"negative-null", TagClass::NonNewness},
        {"refutation", TagClass::NonNewness},
        {"controversial", TagClass::Unclassified},
    };
    return c;
}

TagClassification TagClassification::load(const std::string& path) {
    TagClassification c;
    read_tsv(path, {"tag", "class"}, [&](const std::vector<std::string_view>& f, std::size_t line) {
        const std::string tag(f[0]);
        if (tag_column(tag) < 0) throw ParseError(path, line, "unknown tag '" + tag + "'");
        TagClass cls;
        if (f[1] == "newness") {
            cls = TagClass::Newness;
        } else if (f[1] == "non-newness") {
            cls = TagClass::NonNewness;
        } else if (f[1] == "unclassified") {
            cls = TagClass::Unclassified;
        } else {
            throw ParseError(path, line, "unknown class '" + std::string(f[1]) + "'");
        }
        c.classes_[tag] = cls;
    });
    for (const char* tag : kTagVocabulary) {
        if (!c.classes_.count(tag)) {
            throw ValidationError(path + ": missing classification for tag '" + std::string(tag) + "'");
        }
    }
    return c;
}

TagClass TagClassification::class_of(const std::string& tag) const {
    auto it = classes_.find(tag);
    if (it == classes_.end()) throw ValidationError("unclassified tag '" + tag + "'");
    return it->second;
}

int TagClassification::expected_sign(const std::string& tag) const {
    switch (class_of(tag)) {
        case TagClass::Newness: return 1;
        case TagClass::NonNewness: return -1;
        case TagClass::Unclassified: return 0;
    }
    return 0;
}

int tag_column(const std::string& tag) {
    for (std::size_t i = 0; i < kTagVocabulary.size(); ++i) {
        if (tag == kTagVocabulary[i]) return static_cast<int>(i);
    }
    return -1;
}

namespace {

bool is_excluded_tag(std::string_view tag) {
    return std::find(kExcludedTags.begin(), kExcludedTags.end(), tag) != kExcludedTags.end();
}

std::vector<ReviewRow> parse_rows(std::istream& in, const std::string& name, ReviewReport& rep) {
    std::vector<ReviewRow> rows;
    read_tsv_stream(in, name, {"paper_id", "stars", "tags"},
                    [&](const std::vector<std::string_view>& f, std::size_t line) {
                        if (f[0].empty()) throw ParseError(name, line, "empty paper_id");
                        auto stars = parse_int(f[1]);
                        if (!stars || *stars < 1 || *stars > 3) {
                            throw ValidationError(name + ":" + std::to_string(line) + ": stars must be 1, 2 or 3, got '" +
                                                  std::string(f[1]) + "'");
                        }
                        ReviewRow row;
                        row.paper = std::string(f[0]);
                        row.stars = static_cast<int>(*stars);
                        std::string_view tags = f[2];
                        std::size_t start = 0;
                        while (start <= tags.size() && !tags.empty()) {
                            std::size_t sep = tags.find(';', start);
                            std::string_view tok = sep == std::string_view::npos ? tags.substr(start)
                                                                                 : tags.substr(start, sep - start);
                            if (!tok.empty()) {
                                if (is_excluded_tag(tok)) {
                                    ++rep.dropped_excluded_tags;
                                } else if (tag_column(std::string(tok)) < 0) {
                                    throw ParseError(name, line, "unknown tag '" + std::string(tok) + "'");
                                } else if (std::find(row.tags.begin(), row.tags.end(), tok) != row.tags.end()) {
                                    ++rep.duplicate_tags;
                                } else {
                                    row.tags.emplace_back(tok);
                                }
                            }
                            if (sep == std::string_view::npos) break;
                            start = sep + 1;
                        }
                        std::sort(row.tags.begin(), row.tags.end());
                        rows.push_back(std::move(row));
                        ++rep.rows;
                    });
    return rows;
}

}  // namespace

std::vector<ReviewRow> load_reviews(const std::string& path, ReviewReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return parse_reviews(in, path, report);
}

std::vector<ReviewRow> parse_reviews(std::istream& in, const std::string& name, ReviewReport* report) {
    ReviewReport local;
    return parse_rows(in, name, report ? *report : local);
}

std::vector<AssessmentRecord> aggregate_assessments(const std::vector<ReviewRow>& rows) {
    std::map<PaperId, AssessmentRecord> by_paper;
    for (const auto& row : rows) {
        auto& rec = by_paper[row.paper];
        rec.paper = row.paper;
        ++rec.review_count;
        rec.resc_sum += row.stars;
        for (const auto& tag : row.tags) {
            int col = tag_column(tag);
            if (col >= 0) ++rec.tag_counts[static_cast<std::size_t>(col)];
        }
    }
    std::vector<AssessmentRecord> out;
    out.reserve(by_paper.size());
    for (auto& [paper, rec] : by_paper) {
        rec.resc_avg = rec.resc_sum / static_cast<double>(rec.review_count);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace dix
