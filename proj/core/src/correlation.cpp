#include "dix/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dix/analysis_matrix.hpp"
#include "dix/errors.hpp"
#include "dix/normalize.hpp"
#include "dix/tsv.hpp"

namespace dix {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");

    // Pairwise NA removal.
    std::vector<double> xs, ys;
    xs.reserve(x.size());
    ys.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) continue;
        xs.push_back(x[i]);
        ys.push_back(y[i]);
    }
    if (xs.size() < 3) return std::nullopt;

    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);

    const std::size_t n = rx.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;  // rank variance zero
    return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix correlation_matrix(const AnalysisMatrix& matrix, const std::vector<std::string>& variables,
                                     bool transform, std::size_t* shifted) {
    std::vector<std::vector<double>> cols;
    cols.reserve(variables.size());
    for (const auto& name : variables) {
        const auto& raw = matrix.column(name);  // throws if missing
        if (transform) {
            cols.push_back(log1p_transform_shifted(raw, 1e-9, shifted));
        } else {
            cols.push_back(raw);
        }
    }

    const auto p = static_cast<Eigen::Index>(variables.size());
    CorrelationMatrix out;
    out.variables = variables;
    out.values = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = a + 1; b < p; ++b) {
            auto rho = spearman(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
            const double v = rho ? *rho : std::numeric_limits<double>::quiet_NaN();
            out.values(a, b) = v;
            out.values(b, a) = v;
        }
    }
    return out;
}

std::string CorrelationMatrix::to_tsv() const {
    std::string out = "variable";
    for (const auto& v : variables) {
        out += '\t';
        out += v;
    }
    out += '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        out += variables[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            out += '\t';
            out += format_fixed(values(r, c), 4);
        }
        out += '\n';
    }
    return out;
}

CorrelationMatrix load_correlation_tsv(const std::string& path) {
    CorrelationMatrix m;
    std::vector<std::vector<double>> rows;
    const std::string content = read_file(path);
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        std::string_view line(content.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_tsv(line);
        if (line_no == 1) {
            if (fields.empty() || fields[0] != "variable") throw ParseError(path, 1, "expected 'variable' header");
            for (std::size_t i = 1; i < fields.size(); ++i) m.variables.emplace_back(fields[i]);
            continue;
        }
        if (fields.size() != m.variables.size() + 1) throw ParseError(path, line_no, "column count mismatch");
        std::vector<double> row;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i] == "NA") {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            auto v = parse_real(fields[i]);
            if (!v) throw ParseError(path, line_no, "malformed real '" + std::string(fields[i]) + "'");
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() != m.variables.size()) throw ParseError(path, line_no, "matrix is not square");
    const auto p = static_cast<Eigen::Index>(rows.size());
    m.values.resize(p, p);
    for (Eigen::Index r = 0; r < p; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) {
            m.values(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    return m;
}

}  // namespace dix
