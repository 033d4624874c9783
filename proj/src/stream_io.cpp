#include "slidenorm/stream_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "slidenorm/errors.hpp"

namespace slidenorm {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return is;
}

void finish(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write failed for '" + path + "'");
}

uint64_t parse_u64(std::string_view v, const std::string& what) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw InputError("bad integer for " + what + ": '" + std::string(v) + "'");
  return out;
}

// key=value tokens of a "#..." header
std::vector<std::pair<std::string, std::string>> header_fields(const std::string& line) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(line.substr(1));
  std::string tok;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw InputError("malformed header token '" + tok + "'");
    out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return out;
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace

std::string format_stream(const StreamFile& s) {
  std::string out = "#n=" + std::to_string(s.n) + " m=" + std::to_string(s.items.size()) +
                    " seed=" + std::to_string(s.seed) + "\n";
  out.reserve(out.size() + s.items.size() * 7);
  for (uint64_t v : s.items) {
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

void write_stream(const std::string& path, const StreamFile& s) {
  auto os = open_out(path);
  os << format_stream(s);
  finish(os, path);
}

StreamFile read_stream(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw InputError(path + ": empty stream file");
  strip_cr(line);
  if (line.empty() || line[0] != '#') throw InputError(path + ": missing '#n=.. m=.. seed=..' header");
  StreamFile s;
  bool has_n = false, has_m = false;
  for (const auto& [k, v] : header_fields(line)) {
    if (k == "n") { s.n = parse_u64(v, "n"); has_n = true; }
    else if (k == "m") { s.m = parse_u64(v, "m"); has_m = true; }
    else if (k == "seed") s.seed = parse_u64(v, "seed");
  }
  if (!has_n || !has_m) throw InputError(path + ": header lacks n or m");
  s.items.reserve(s.m);
  uint64_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    uint64_t v;
    try {
      v = parse_u64(line, "update");
    } catch (const InputError& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (v < 1 || v > s.n) {
      throw InputError(path + ":" + std::to_string(lineno) + ": update " + std::to_string(v) + " outside [1, " +
                       std::to_string(s.n) + "]");
    }
    s.items.push_back(v);
  }
  if (s.items.size() != s.m) {
    throw InputError(path + ": header says m=" + std::to_string(s.m) + " but file has " +
                     std::to_string(s.items.size()) + " updates");
  }
  return s;
}

void write_rows(const std::string& path, const RowFile& f) {
  auto os = open_out(path);
  os << "#d=" << f.d << " response=" << (f.response ? 1 : 0) << "\n";
  os.precision(17);
  const Eigen::Index w = static_cast<Eigen::Index>(f.d + (f.response ? 1 : 0));
  for (const auto& r : f.rows) {
    if (r.size() != w) throw InputError("write_rows: row width mismatch");
    for (Eigen::Index k = 0; k < w; ++k) os << (k ? " " : "") << r(k);
    os << "\n";
  }
  finish(os, path);
}

RowFile read_rows(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw InputError(path + ": empty row file");
  strip_cr(line);
  if (line.empty() || line[0] != '#') throw InputError(path + ": missing '#d=<d> response=<0|1>' header");
  RowFile f;
  bool has_d = false;
  for (const auto& [k, v] : header_fields(line)) {
    if (k == "d") { f.d = parse_u64(v, "d"); has_d = true; }
    else if (k == "response") f.response = parse_u64(v, "response") != 0;
  }
  if (!has_d || f.d < 1) throw InputError(path + ": header lacks a positive d");
  const size_t w = f.d + (f.response ? 1 : 0);
  uint64_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> vals;
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
        throw InputError(path + ":" + std::to_string(lineno) + ": bad real '" + tok + "'");
      }
      vals.push_back(v);
    }
    if (vals.size() != w) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(w) + " values, got " +
                       std::to_string(vals.size()));
    }
    f.rows.push_back(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(w)));
  }
  return f;
}

void write_coreset_csv(const std::string& path, const std::vector<CoresetRow>& rows) {
  auto os = open_out(path);
  size_t w = rows.empty() ? 0 : static_cast<size_t>(rows.front().row.size());
  os << "index,p,weight";
  for (size_t k = 0; k < w; ++k) os << ",c" << (k + 1);
  os << "\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.index << "," << r.p << "," << r.weight;
    for (Eigen::Index k = 0; k < r.row.size(); ++k) os << "," << r.row(k);
    os << "\n";
  }
  finish(os, path);
}

}  // namespace slidenorm
