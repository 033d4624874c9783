#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slidenorm/orlicz.hpp"

namespace slidenorm {

struct StreamFile {
  uint64_t n = 0;
  uint64_t m = 0;
  uint64_t seed = 0;
  std::vector<uint64_t> items;
};

// Header "#n=<n> m=<m> seed=<seed>", then one update per line.
void write_stream(const std::string& path, const StreamFile& s);
std::string format_stream(const StreamFile& s);
// Throws IoError when unreadable, InputError on a malformed file.
StreamFile read_stream(const std::string& path);

struct RowFile {
  size_t d = 0;
  bool response = false;
  std::vector<Eigen::VectorXd> rows;  // width d, or d+1 with the response
};

// Header "#d=<d> response=<0|1>", then space-separated reals per line.
void write_rows(const std::string& path, const RowFile& f);
RowFile read_rows(const std::string& path);

// CSV: index,p,weight,a1..ad[,b]
void write_coreset_csv(const std::string& path, const std::vector<CoresetRow>& rows);

}  // namespace slidenorm
