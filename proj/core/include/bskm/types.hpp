#pragma once

#include <Eigen/Core>
#include <vector>

namespace bskm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
/// Compact row buffer; rows gathered from a MatrixStore land here.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Row indices into a MatrixStore. Sets are kept sorted ascending.
using IndexSet = std::vector<Index>;

}  // namespace bskm
