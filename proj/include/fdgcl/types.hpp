#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace fdgcl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

}  // namespace fdgcl
