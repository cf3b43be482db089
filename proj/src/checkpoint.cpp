#include "nlfront/checkpoint.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "nlfront/errors.hpp"
#include "nlfront/io.hpp"

namespace nlfront {

namespace {

constexpr const char* k_magic = "nlfront-checkpoint-v1";

[[noreturn]] void corrupt(const std::string& what) {
  fail(errc::corrupt_checkpoint, what);
}

double parse_hexfloat(const std::string& s) {
  const char* p = s.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(p, &end);
  if (end == p || *end != '\0' || errno == ERANGE) corrupt("bad float field \"" + s + "\"");
  return v;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16) corrupt("bad hex field \"" + s + "\"");
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(s.c_str(), &end, 16);
  if (*end != '\0' || errno == ERANGE) corrupt("bad hex field \"" + s + "\"");
  return static_cast<std::uint64_t>(v);
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno == ERANGE) corrupt("bad count field \"" + s + "\"");
  return static_cast<std::uint64_t>(v);
}

// "key value" -> value, insisting on the key.
std::string field(const std::string& line, const char* key) {
  auto sp = line.find(' ');
  if (sp == std::string::npos || line.substr(0, sp) != key)
    corrupt(std::string("expected field \"") + key + "\", got \"" + line + "\"");
  return line.substr(sp + 1);
}

}  // namespace

std::string encode_checkpoint(const checkpoint_data& cp) {
  const front_state& st = cp.state;
  std::string body;
  body.reserve(64 * (st.x.size() + 12));
  body += k_magic;
  body += '\n';
  body += "fingerprint " + hex16(cp.fingerprint) + "\n";
  body += "t " + format_hex(st.t) + "\n";
  body += "g " + format_hex(st.g) + "\n";
  body += "h " + format_hex(st.h) + "\n";
  body += "dx " + format_hex(st.dx) + "\n";
  body += "steps " + std::to_string(cp.steps) + "\n";
  body += "next_record " + format_hex(cp.next_record) + "\n";
  body += "aux " + format_hex(cp.aux_span) + "\n";
  body += "n " + std::to_string(st.x.size()) + "\n";
  for (std::size_t i = 0; i < st.x.size(); ++i)
    body += format_hex(st.x[i]) + " " + format_hex(st.u[i]) + "\n";
  body += "checksum " + hex16(fnv1a64(body)) + "\n";
  return body;
}

checkpoint_data decode_checkpoint(const std::string& bytes) {
  // Split into lines; the final line must be the checksum of everything
  // before it.
  auto last_nl = bytes.rfind('\n');
  if (last_nl == std::string::npos || last_nl + 1 != bytes.size())
    corrupt("missing trailing newline");
  auto prev_nl = bytes.rfind('\n', last_nl - 1);
  if (prev_nl == std::string::npos) corrupt("truncated file");
  std::string check_line = bytes.substr(prev_nl + 1, last_nl - prev_nl - 1);
  std::string prefix = bytes.substr(0, prev_nl + 1);

  std::istringstream in(prefix);
  std::string line;
  if (!std::getline(in, line)) corrupt("empty file");
  if (line != k_magic)
    fail(errc::version_mismatch, "unrecognized header \"" + line + "\"");

  std::uint64_t stored_sum = parse_hex64(field(check_line, "checksum"));
  if (stored_sum != fnv1a64(prefix)) corrupt("checksum mismatch");

  checkpoint_data cp;
  auto next = [&]() -> std::string {
    if (!std::getline(in, line)) corrupt("truncated file");
    return line;
  };
  cp.fingerprint = parse_hex64(field(next(), "fingerprint"));
  cp.state.t = parse_hexfloat(field(next(), "t"));
  cp.state.g = parse_hexfloat(field(next(), "g"));
  cp.state.h = parse_hexfloat(field(next(), "h"));
  cp.state.dx = parse_hexfloat(field(next(), "dx"));
  cp.steps = parse_u64(field(next(), "steps"));
  cp.next_record = parse_hexfloat(field(next(), "next_record"));
  cp.aux_span = parse_hexfloat(field(next(), "aux"));
  std::uint64_t n = parse_u64(field(next(), "n"));
  if (n < 3 || n > (1ull << 32)) corrupt("implausible node count");
  cp.state.x.resize(n);
  cp.state.u.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string row = next();
    auto sp = row.find(' ');
    if (sp == std::string::npos) corrupt("bad node row \"" + row + "\"");
    cp.state.x[i] = parse_hexfloat(row.substr(0, sp));
    cp.state.u[i] = parse_hexfloat(row.substr(sp + 1));
  }
  if (std::getline(in, line)) corrupt("trailing data after node rows");

  // Structural sanity so a damaged but checksum-consistent file cannot put
  // the solver into an impossible state.
  if (!(cp.state.x.front() == cp.state.g) || !(cp.state.x.back() == cp.state.h))
    corrupt("end nodes disagree with the fronts");
  for (std::uint64_t i = 1; i < n; ++i)
    if (!(cp.state.x[i] > cp.state.x[i - 1])) corrupt("nodes not increasing");
  if (cp.state.u.front() != 0.0 || cp.state.u.back() != 0.0)
    corrupt("front nodes must carry u = 0");
  for (double v : cp.state.u)
    if (!(v >= 0.0) || !std::isfinite(v)) corrupt("negative or non-finite density");
  return cp;
}

void save_checkpoint(const std::string& path, const checkpoint_data& cp) {
  write_file_atomic(path, encode_checkpoint(cp));
}

checkpoint_data load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace nlfront
