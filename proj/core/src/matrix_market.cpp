#include "bskm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bskm/errors.hpp"

namespace bskm {

namespace {

enum class Format { coordinate, array };
enum class Field { real, pattern };
enum class Symmetry { general, symmetric };

struct Banner {
  Format format = Format::coordinate;
  Field field = Field::real;
  Symmetry symmetry = Symmetry::general;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

Banner parse_banner(const std::string& line) {
  std::istringstream tokens(line);
  std::string magic, object, format, field, symmetry, extra;
  tokens >> magic >> object >> format >> field >> symmetry;
  if (magic != "%%MatrixMarket") throw ParseError(1, "missing %%MatrixMarket banner");
  if (symmetry.empty()) throw ParseError(1, "incomplete banner: " + line);
  if (tokens >> extra) throw ParseError(1, "unexpected token '" + extra + "' in banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);

  Banner banner;
  if (object != "matrix") throw ParseError(1, "unsupported object '" + object + "'");
  if (format == "coordinate") {
    banner.format = Format::coordinate;
  } else if (format == "array") {
    banner.format = Format::array;
  } else {
    throw ParseError(1, "unsupported format '" + format + "'");
  }
  if (field == "real" || field == "double") {
    banner.field = Field::real;
  } else if (field == "pattern") {
    banner.field = Field::pattern;
  } else {
    throw ParseError(1, "unsupported field '" + field + "' (real or pattern only)");
  }
  if (symmetry == "general") {
    banner.symmetry = Symmetry::general;
  } else if (symmetry == "symmetric") {
    banner.symmetry = Symmetry::symmetric;
  } else {
    throw ParseError(1, "unsupported symmetry '" + symmetry + "'");
  }
  if (banner.format == Format::array &&
      (banner.field == Field::pattern || banner.symmetry != Symmetry::general)) {
    throw ParseError(1, "array format supports 'real general' only");
  }
  return banner;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line that is neither blank nor a comment.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (is_blank(line) || line.front() == '%') continue;
      return true;
    }
    return false;
  }

  bool raw(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[nodiscard]] std::size_t number() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

template <typename T>
T read_token(std::istringstream& tokens, std::size_t line, const char* what) {
  T value{};
  if (!(tokens >> value)) throw ParseError(line, std::string("expected ") + what);
  return value;
}

void expect_end(std::istringstream& tokens, std::size_t line) {
  std::string extra;
  if (tokens >> extra) throw ParseError(line, "unexpected trailing token '" + extra + "'");
}

MatrixStore assemble_csr(Index rows, Index cols, std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  std::vector<Index> row_ptr(static_cast<std::size_t>(rows + 1), 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  Index last_row = -1;
  Index last_col = -1;
  for (const auto& e : entries) {
    if (e.row == last_row && e.col == last_col) {
      values.back() += e.value;
      continue;
    }
    col_idx.push_back(e.col);
    values.push_back(e.value);
    ++row_ptr[e.row + 1];
    last_row = e.row;
    last_col = e.col;
  }
  for (Index i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return MatrixStore::csr(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

}  // namespace

MatrixStore parse_matrix_market(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.raw(line)) throw ParseError(1, "empty input");
  const Banner banner = parse_banner(line);

  if (!reader.next(line)) throw ParseError(reader.number(), "missing size line");
  const std::size_t size_line = reader.number();
  std::istringstream size_tokens(line);
  const auto rows = read_token<long long>(size_tokens, size_line, "row count");
  const auto cols = read_token<long long>(size_tokens, size_line, "column count");
  long long declared = rows * cols;
  if (banner.format == Format::coordinate) {
    declared = read_token<long long>(size_tokens, size_line, "entry count");
  }
  expect_end(size_tokens, size_line);
  if (rows < 1 || cols < 1 || declared < 0) {
    throw ParseError(size_line, "dimensions must be positive and the entry count nonnegative");
  }
  if (banner.symmetry == Symmetry::symmetric && rows != cols) {
    throw ParseError(size_line, "symmetric matrix must be square");
  }

  if (banner.format == Format::array) {
    std::vector<double> values(static_cast<std::size_t>(rows * cols));
    long long seen = 0;
    while (reader.next(line)) {
      if (seen == declared) throw ParseError(reader.number(), "more values than rows*cols");
      std::istringstream tokens(line);
      const auto v = read_token<double>(tokens, reader.number(), "a value");
      expect_end(tokens, reader.number());
      // Column-major on disk.
      const long long i = seen % rows;
      const long long j = seen / rows;
      values[static_cast<std::size_t>(i * cols + j)] = v;
      ++seen;
    }
    if (seen != declared) {
      throw ParseError(reader.number(), "expected " + std::to_string(declared) + " values, found " +
                                            std::to_string(seen));
    }
    return MatrixStore::dense(rows, cols, std::move(values));
  }

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(
      std::min<long long>(declared, 50'000'000) * (banner.symmetry == Symmetry::symmetric ? 2 : 1)));
  long long seen = 0;
  while (reader.next(line)) {
    const std::size_t at = reader.number();
    if (seen == declared) {
      throw ParseError(at, "more entries than the declared " + std::to_string(declared));
    }
    std::istringstream tokens(line);
    const auto i = read_token<long long>(tokens, at, "row index");
    const auto j = read_token<long long>(tokens, at, "column index");
    double v = 1.0;
    if (banner.field == Field::real) v = read_token<double>(tokens, at, "a value");
    expect_end(tokens, at);
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw ParseError(at, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") outside declared " + std::to_string(rows) + "x" +
                               std::to_string(cols));
    }
    if (banner.symmetry == Symmetry::symmetric && j > i) {
      throw ParseError(at, "symmetric storage expects the lower triangle only");
    }
    entries.push_back({i - 1, j - 1, v});
    if (banner.symmetry == Symmetry::symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    ++seen;
  }
  if (seen != declared) {
    throw ParseError(reader.number(), "expected " + std::to_string(declared) +
                                          " entries, found " + std::to_string(seen));
  }
  return assemble_csr(rows, cols, std::move(entries));
}

MatrixStore parse_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_matrix_market(in);
}

void write_matrix_market(const MatrixStore& A, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.stored_entries() << '\n';
  out << std::setprecision(17);
  const auto values = A.values();
  if (A.layout() == Layout::csr) {
    const auto row_ptr = A.row_ptr();
    const auto col_idx = A.col_idx();
    for (Index i = 0; i < A.rows(); ++i) {
      for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
        out << i + 1 << ' ' << col_idx[p] + 1 << ' ' << values[p] << '\n';
      }
    }
    return;
  }
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      out << i + 1 << ' ' << j + 1 << ' ' << values[i * A.cols() + j] << '\n';
    }
  }
}

void write_matrix_market(const MatrixStore& A, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_matrix_market(A, out);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace bskm
