#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bskm/types.hpp"

namespace bskm {

/// One solver run. Parameters that do not apply to a method are 0.
struct RunRecord {
  std::string method;
  Index m = 0;
  Index n = 0;
  Index beta = 0;
  Index eta = 0;
  Index beta_j = 0;
  std::uint64_t seed = 0;
  Index trial = 0;
  long iterations = 0;
  double cpu_time_s = 0.0;
  double final_res = 0.0;
  std::string termination;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline constexpr std::string_view kRunRecordHeader =
    "method,m,n,beta,eta,beta_j,seed,trial,iterations,cpu_time_s,final_res,termination";

/// Header line, then one line per record in order; floats carry 17
/// significant digits so they reparse exactly.
void write_csv(const std::vector<RunRecord>& records, std::ostream& out);
void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
/// Appends to `path`, writing the header first when the file is new or empty.
void append_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);

/// Inverse of write_csv. ParseError on a wrong header or a malformed row.
[[nodiscard]] std::vector<RunRecord> read_csv(std::istream& in);
[[nodiscard]] std::vector<RunRecord> read_csv(const std::filesystem::path& path);

}  // namespace bskm
