#include "bskm/problems.hpp"

#include <random>

#include "bskm/errors.hpp"
#include "bskm/sampling.hpp"

namespace bskm {

namespace {

Vector standard_normal_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Rng data_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x5eedda7aU};
  return Rng(seq);
}

}  // namespace

LinearSystem generate_gaussian(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ContractViolation("generate_gaussian: m and n must be positive");
  Rng rng = data_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(static_cast<std::size_t>(m * n));
  for (double& v : values) v = normal(rng);

  LinearSystem system;
  system.A = MatrixStore::dense(m, n, std::move(values));
  system.x_star_gen = standard_normal_vector(n, rng);
  system.b = system.A.multiply(*system.x_star_gen);
  system.source = GaussianSource{m, n, seed};
  return system;
}

LinearSystem system_from_matrix(MatrixStore A, std::uint64_t seed, SystemSource source) {
  Rng rng = data_rng(seed);
  LinearSystem system;
  system.x_star_gen = standard_normal_vector(A.cols(), rng);
  system.b = A.multiply(*system.x_star_gen);
  system.A = std::move(A);
  system.source = std::move(source);
  return system;
}

void prepare_reference(LinearSystem& system, const MinNormOptions& options) {
  system.x_ref = min_norm_solution(system.A, system.b, options);
}

double compute_res(const Vector& x, const Vector& x_ref) {
  if (x.size() != x_ref.size()) throw ContractViolation("compute_res: length mismatch");
  const double denom = x_ref.squaredNorm();
  if (denom == 0.0) throw UndefinedQuantity("compute_res: reference solution is zero");
  return (x - x_ref).squaredNorm() / denom;
}

}  // namespace bskm
