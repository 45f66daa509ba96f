#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dix {

// All files are UTF-8, LF line endings, tab separated, one header row.
// Ids are treated as opaque bytes.

// Splits one line on tabs. Keeps empty fields.
std::vector<std::string_view> split_tsv(std::string_view line);

// Streams a TSV file: validates the header (exact match), then calls
// row_fn(fields, line_number) per data row. Throws IoError if the file
// cannot be opened and ParseError on a column-count mismatch.
void read_tsv(const std::string& path, const std::vector<std::string>& header,
              const std::function<void(const std::vector<std::string_view>&, std::size_t)>& row_fn);

// Same but reads from an already open stream (stream name used in errors).
void read_tsv_stream(std::istream& in, const std::string& name,
                     const std::vector<std::string>& header,
                     const std::function<void(const std::vector<std::string_view>&, std::size_t)>& row_fn);

// Real with `significant` significant digits, shortest form ("%.*g").
// Ties round half to even. NaN renders as "NA".
std::string format_real(double value, int significant = 6);

// Real with fixed decimal places ("%.*f"), half-even ties, NaN -> "NA".
std::string format_fixed(double value, int decimals = 4);

// Integer parse helpers returning nullopt on malformed input.
std::optional<long long> parse_int(std::string_view token);
std::optional<double> parse_real(std::string_view token);

// FNV-1a 64-bit digest over raw bytes; used for run-manifest input digests.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t digest);

// Reads a whole file (IoError if missing); writing goes through this helper
// so outputs are created atomically (temp file + rename).
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace dix
