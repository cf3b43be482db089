#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlfront {

// FNV-1a 64-bit hash, used for checkpoint checksums and config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex16(std::uint64_t v);

// Shortest-round-trip-ish decimal formatting used for all CSV output (printf %.12g).
std::string format_g(double v);
// Exact binary round trip (printf %a) used for checkpoints.
std::string format_hex(double v);

std::string timestamp_utc();

void ensure_dirs(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
// Write to a temp file in the same directory, then rename into place.
void write_file_atomic(const std::string& path, const std::string& content);

std::string trim(const std::string& s);
std::string to_lower(std::string s);
std::vector<std::string> split(const std::string& s, char sep);

// Two-column numeric text (x, y), '#' comments allowed; errors carry line numbers.
std::vector<std::pair<double, double>> read_two_column(const std::string& path);

}  // namespace nlfront
