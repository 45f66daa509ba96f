#include "dix/analysis_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "dix/errors.hpp"
#include "dix/tsv.hpp"

namespace dix {

AnalysisMatrix::AnalysisMatrix(std::vector<std::string> column_names, std::vector<PaperId> papers)
    : names_(std::move(column_names)), papers_(std::move(papers)) {
    for (const auto& name : names_) columns_[name].assign(papers_.size(), kNA);
}

bool AnalysisMatrix::has_column(const std::string& name) const { return columns_.count(name) > 0; }

const std::vector<double>& AnalysisMatrix::column(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw ValidationError("no such column '" + name + "'");
    return it->second;
}

std::vector<double>& AnalysisMatrix::column(const std::string& name) {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw ValidationError("no such column '" + name + "'");
    return it->second;
}

std::string AnalysisMatrix::to_tsv() const {
    std::string out = "paper_id";
    for (const auto& name : names_) {
        out += '\t';
        out += name;
    }
    out += '\n';
    for (std::size_t r = 0; r < rows(); ++r) {
        out += papers_[r];
        for (const auto& name : names_) {
            out += '\t';
            out += format_real(columns_.at(name)[r]);
        }
        out += '\n';
    }
    return out;
}

namespace {

const std::vector<std::string>& matrix_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c = {
            "citer_count", "n_i", "n_j_l1", "n_j_l5", "n_k",
            "di_1", "di_5", "di_1_nok", "di_5_nok", "dein", "bu_ratio",
            "citations", "percentile", "resc_sum", "resc_avg",
        };
        for (const char* tag : kTagVocabulary) c.push_back(std::string("tag_") + tag);
        c.push_back("exposure_years");
        return c;
    }();
    return cols;
}

template <typename T>
std::map<PaperId, const T*> index_unique(const std::vector<T>& rows, const PaperId& (*key)(const T&),
                                         const char* what) {
    std::map<PaperId, const T*> out;
    for (const auto& row : rows) {
        if (!out.emplace(key(row), &row).second) {
            throw ValidationError(std::string("duplicate paper id '") + key(row) + "' in " + what);
        }
    }
    return out;
}

}  // namespace

std::string JoinReport::summary() const {
    std::string s;
    s += "joined=" + std::to_string(joined);
    s += " missing_percentile=" + std::to_string(missing_percentile);
    s += " missing_metadata=" + std::to_string(missing_metadata);
    s += " missing_assessment=" + std::to_string(missing_assessment);
    s += " na_indicators_dropped=" + std::to_string(na_indicators_dropped);
    s += " nonpositive_exposure_dropped=" + std::to_string(nonpositive_exposure_dropped);
    return s;
}

AnalysisMatrix build_matrix(const std::vector<DisruptionScores>& scores,
                            const std::vector<PercentileScore>& percentile_scores,
                            const std::vector<PaperMetadata>& metadata,
                            const std::vector<AssessmentRecord>& assessments,
                            std::int32_t reference_year, JoinReport* report) {
    JoinReport local;
    JoinReport& rep = report ? *report : local;

    auto pct_by_id = index_unique<PercentileScore>(
        percentile_scores, [](const PercentileScore& p) -> const PaperId& { return p.paper; }, "percentiles");
    auto meta_by_id = index_unique<PaperMetadata>(
        metadata, [](const PaperMetadata& m) -> const PaperId& { return m.paper; }, "metadata");
    auto assess_by_id = index_unique<AssessmentRecord>(
        assessments, [](const AssessmentRecord& a) -> const PaperId& { return a.paper; }, "assessments");

    {
        std::map<PaperId, bool> seen;
        for (const auto& s : scores) {
            if (!seen.emplace(s.focal, true).second) {
                throw ValidationError("duplicate paper id '" + s.focal + "' in scores");
            }
        }
    }

    struct Joined {
        const DisruptionScores* s;
        const PercentileScore* p;
        const PaperMetadata* m;
        const AssessmentRecord* a;
        double exposure;
    };
    std::vector<Joined> keep;
    for (const auto& s : scores) {
        auto p = pct_by_id.find(s.focal);
        if (p == pct_by_id.end()) {
            ++rep.missing_percentile;
            continue;
        }
        auto m = meta_by_id.find(s.focal);
        if (m == meta_by_id.end()) {
            ++rep.missing_metadata;
            continue;
        }
        auto a = assess_by_id.find(s.focal);
        if (a == assess_by_id.end()) {
            ++rep.missing_assessment;
            continue;
        }
        bool na = is_na(s.dein) || is_na(s.bu_ratio);
        for (const auto& [key, v] : s.di) na = na || is_na(v);
        if (na) {
            ++rep.na_indicators_dropped;
            continue;
        }
        if (m->second->year == kNoYear) {
            ++rep.missing_metadata;
            continue;
        }
        const double exposure = static_cast<double>(reference_year - m->second->year);
        if (exposure < 1.0) {
            ++rep.nonpositive_exposure_dropped;
            continue;
        }
        keep.push_back({&s, p->second, m->second, a->second, exposure});
    }

    std::sort(keep.begin(), keep.end(), [](const Joined& x, const Joined& y) { return x.s->focal < y.s->focal; });

    std::vector<PaperId> papers;
    papers.reserve(keep.size());
    for (const auto& j : keep) papers.push_back(j.s->focal);

    AnalysisMatrix matrix(matrix_columns(), std::move(papers));
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const auto& j = keep[r];
        matrix.column("citer_count")[r] = static_cast<double>(j.s->citer_count);
        matrix.column("n_i")[r] = static_cast<double>(j.s->n_i);
        matrix.column("n_j_l1")[r] = static_cast<double>(j.s->n_j_by_l.at(1));
        matrix.column("n_j_l5")[r] = static_cast<double>(j.s->n_j_by_l.at(5));
        matrix.column("n_k")[r] = static_cast<double>(j.s->n_k);
        matrix.column("di_1")[r] = j.s->di_value(1, true);
        matrix.column("di_5")[r] = j.s->di_value(5, true);
        matrix.column("di_1_nok")[r] = j.s->di_value(1, false);
        matrix.column("di_5_nok")[r] = j.s->di_value(5, false);
        matrix.column("dein")[r] = j.s->dein;
        matrix.column("bu_ratio")[r] = j.s->bu_ratio;
        matrix.column("citations")[r] = static_cast<double>(j.m->citations);
        matrix.column("percentile")[r] = j.p->percentile;
        matrix.column("resc_sum")[r] = j.a->resc_sum;
        matrix.column("resc_avg")[r] = j.a->resc_avg;
        for (std::size_t t = 0; t < kTagVocabulary.size(); ++t) {
            matrix.column(std::string("tag_") + kTagVocabulary[t])[r] = static_cast<double>(j.a->tag_counts[t]);
        }
        matrix.column("exposure_years")[r] = j.exposure;
    }
    rep.joined = keep.size();
    return matrix;
}

AnalysisMatrix load_matrix(const std::string& path) {
    const std::string content = read_file(path);
    std::size_t eol = content.find('\n');
    if (eol == std::string::npos) throw ParseError(path, 1, "missing header row");
    auto header = split_tsv(std::string_view(content).substr(0, eol));
    if (header.empty() || header[0] != "paper_id") throw ParseError(path, 1, "first column must be paper_id");

    std::vector<std::string> names;
    for (std::size_t i = 1; i < header.size(); ++i) names.emplace_back(header[i]);

    std::vector<PaperId> papers;
    std::vector<std::vector<double>> data(names.size());
    std::size_t line_no = 1;
    std::size_t pos = eol + 1;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        std::string_view line(content.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_tsv(line);
        if (fields.size() != header.size()) {
            throw ParseError(path, line_no, "row has " + std::to_string(fields.size()) + " columns, expected " +
                                                std::to_string(header.size()));
        }
        papers.emplace_back(fields[0]);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i] == "NA") {
                data[i - 1].push_back(kNA);
                continue;
            }
            auto v = parse_real(fields[i]);
            if (!v) throw ParseError(path, line_no, "malformed real '" + std::string(fields[i]) + "'");
            data[i - 1].push_back(*v);
        }
    }

    AnalysisMatrix matrix(names, papers);
    for (std::size_t i = 0; i < names.size(); ++i) matrix.column(names[i]) = std::move(data[i]);
    return matrix;
}

}  // namespace dix
