#pragma once

#include <filesystem>
#include <iosfwd>

#include "bskm/matrix_store.hpp"

namespace bskm {

/// Reads a Matrix Market file.
///
/// Accepted banners: `coordinate real|pattern general|symmetric` and
/// `array real general`. Coordinate input becomes CSR with 1-based indices
/// shifted to 0-based, duplicate entries summed, symmetric input mirrored
/// across the diagonal and pattern entries set to 1.0. Array input becomes a
/// dense store. Lines starting with '%' and blank lines are skipped.
///
/// Malformed banners, bad size lines, out-of-range indices and entry counts
/// that disagree with the size line raise ParseError with the offending line.
[[nodiscard]] MatrixStore parse_matrix_market(std::istream& in);
[[nodiscard]] MatrixStore parse_matrix_market(const std::filesystem::path& path);

/// Writes `coordinate real general` with 17 significant digits, one stored
/// entry per line in row-major order.
void write_matrix_market(const MatrixStore& A, std::ostream& out);
void write_matrix_market(const MatrixStore& A, const std::filesystem::path& path);

}  // namespace bskm
