#pragma once

#include <cstddef>
#include <vector>

namespace xpert {

/// Dense row-major square matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  static SquareMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  const std::vector<double>& data() const { return data_; }

  bool is_symmetric(double tol) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  SquareMatrix vectors;        // column i is the eigenvector of values[i]
  int sweeps = 0;
};

inline constexpr double kJacobiTolerance = 1e-10;
inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi eigensolver. Stops once the off-diagonal Frobenius norm drops
/// below kJacobiTolerance or after kJacobiMaxSweeps sweeps. Throws
/// std::invalid_argument when the input is not symmetric to 1e-12.
SymmetricEigen symmetric_eigen(const SquareMatrix& m);

}  // namespace xpert
