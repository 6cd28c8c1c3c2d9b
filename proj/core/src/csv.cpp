#include "bskm/csv.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bskm/errors.hpp"

namespace bskm {

namespace {

void write_row(const RunRecord& r, std::ostream& out) {
  out << r.method << ',' << r.m << ',' << r.n << ',' << r.beta << ',' << r.eta << ','
      << r.beta_j << ',' << r.seed << ',' << r.trial << ',' << r.iterations << ','
      << std::setprecision(17) << r.cpu_time_s << ',' << r.final_res << ',' << r.termination
      << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream tokens(line);
  while (std::getline(tokens, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_integer(const std::string& text, std::size_t line, const char* name) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("bad integer in column ") + name + ": '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& text, std::size_t line, const char* name) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double value = 0.0;
  char extra = 0;
  if (!(in >> value) || (in >> extra)) {
    throw ParseError(line, std::string("bad number in column ") + name + ": '" + text + "'");
  }
  return value;
}

}  // namespace

void write_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kRunRecordHeader << '\n';
  for (const auto& r : records) write_row(r, out);
}

void write_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(records, out);
  if (!out) throw IoError("write failed for " + path.string());
}

void append_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write " + path.string());
  if (fresh) out << kRunRecordHeader << '\n';
  for (const auto& r : records) write_row(r, out);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<RunRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRunRecordHeader) throw ParseError(1, "unexpected header: " + line);

  std::vector<RunRecord> records;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 12) {
      throw ParseError(number, "expected 12 fields, found " + std::to_string(f.size()));
    }
    RunRecord r;
    r.method = f[0];
    r.m = parse_integer<Index>(f[1], number, "m");
    r.n = parse_integer<Index>(f[2], number, "n");
    r.beta = parse_integer<Index>(f[3], number, "beta");
    r.eta = parse_integer<Index>(f[4], number, "eta");
    r.beta_j = parse_integer<Index>(f[5], number, "beta_j");
    r.seed = parse_integer<std::uint64_t>(f[6], number, "seed");
    r.trial = parse_integer<Index>(f[7], number, "trial");
    r.iterations = parse_integer<long>(f[8], number, "iterations");
    r.cpu_time_s = parse_double(f[9], number, "cpu_time_s");
    r.final_res = parse_double(f[10], number, "final_res");
    r.termination = f[11];
    if (r.method.empty() || r.termination.empty()) throw ParseError(number, "empty field");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<RunRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace bskm
