#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "bskm/dense_kernels.hpp"
#include "bskm/matrix_store.hpp"
#include "bskm/types.hpp"

namespace bskm {

struct MatrixMarketSource {
  std::string path;
};

struct GaussianSource {
  Index m = 0;
  Index n = 0;
  std::uint64_t seed = 0;
};

using SystemSource = std::variant<MatrixMarketSource, GaussianSource>;

/// A consistent system Ax = b. `x_star_gen` is the vector b was built from;
/// `x_ref` = A⁺b, which differs from x_star_gen when A has dependent columns.
struct LinearSystem {
  MatrixStore A;
  Vector b;
  std::optional<Vector> x_ref;
  std::optional<Vector> x_star_gen;
  SystemSource source;
};

/// A and x⋆ with i.i.d. standard normal entries, b = A·x⋆. Bitwise
/// deterministic for a given seed on a given standard library.
[[nodiscard]] LinearSystem generate_gaussian(Index m, Index n, std::uint64_t seed);

/// Standard normal x⋆ drawn from `seed`, b = A·x⋆.
[[nodiscard]] LinearSystem system_from_matrix(MatrixStore A, std::uint64_t seed,
                                              SystemSource source);

/// Fills system.x_ref with A⁺b.
void prepare_reference(LinearSystem& system, const MinNormOptions& options = {});

/// ‖x − x_ref‖² / ‖x_ref‖². Throws UndefinedQuantity for x_ref = 0.
[[nodiscard]] double compute_res(const Vector& x, const Vector& x_ref);

}  // namespace bskm
