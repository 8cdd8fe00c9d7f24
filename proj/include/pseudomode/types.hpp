#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace pseudomode {

using Complex = std::complex<double>;
inline constexpr Complex kI{0.0, 1.0};

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Matrix2c = Eigen::Matrix2cd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using SparseMatrixCol = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<Complex>;

}  // namespace pseudomode
