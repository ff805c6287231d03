#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dimred {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SpMatrix = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

}  // namespace dimred
