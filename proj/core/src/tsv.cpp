#include "dix/tsv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dix/errors.hpp"

namespace dix {

std::vector<std::string_view> split_tsv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

namespace {

std::string join_header(const std::vector<std::string>& header) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += '\t';
        out += header[i];
    }
    return out;
}

}  // namespace

void read_tsv_stream(std::istream& in, const std::string& name,
                     const std::vector<std::string>& header,
                     const std::function<void(const std::vector<std::string_view>&, std::size_t)>& row_fn) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(name, 1, "missing header row (expected '" + join_header(header) + "')");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_tsv(line);
    if (fields.size() != header.size()) {
        throw ParseError(name, 1, "header has " + std::to_string(fields.size()) + " columns, expected " +
                                      std::to_string(header.size()) + " ('" + join_header(header) + "')");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (fields[i] != header[i]) {
            throw ParseError(name, 1, "header column " + std::to_string(i + 1) + " is '" +
                                          std::string(fields[i]) + "', expected '" + header[i] + "'");
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fields = split_tsv(line);
        if (fields.size() != header.size()) {
            throw ParseError(name, line_no, "row has " + std::to_string(fields.size()) + " columns, expected " +
                                                std::to_string(header.size()));
        }
        row_fn(fields, line_no);
    }
}

void read_tsv(const std::string& path, const std::vector<std::string>& header,
              const std::function<void(const std::vector<std::string_view>&, std::size_t)>& row_fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    read_tsv_stream(in, path, header, row_fn);
}

std::string format_real(double value, int significant) {
    if (std::isnan(value)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, value);
    return buf;
}

std::string format_fixed(double value, int decimals) {
    if (std::isnan(value)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::optional<long long> parse_int(std::string_view token) {
    if (token.empty()) return std::nullopt;
    std::size_t pos = 0;
    bool neg = false;
    if (token[0] == '+' || token[0] == '-') {
        neg = token[0] == '-';
        pos = 1;
        if (token.size() == 1) return std::nullopt;
    }
    long long v = 0;
    for (; pos < token.size(); ++pos) {
        char c = token[pos];
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
        if (v < 0) return std::nullopt;  // overflow
    }
    return neg ? -v : v;
}

std::optional<double> parse_real(std::string_view token) {
    if (token.empty()) return std::nullopt;
    std::string buf(token);
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) return std::nullopt;
    return v;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    return fnv1a64(read_file(path));
}

std::string to_hex(std::uint64_t digest) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, std::string_view content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

}  // namespace dix
