// Dense row-major matrix value type shared by solvers, metrics and I/O.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mvc {

using Index = Eigen::Index;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<EigenRowMajor>;
using ConstMatrixMap = Eigen::Map<const EigenRowMajor>;

// Owning dense matrix, 64-bit entries in row-major order.
class Matrix {
 public:
  Matrix() = default;

  Matrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
      throw DimensionError("matrix dimensions must be non-negative");
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
                 0.0);
  }

  static Matrix identity(Index n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  template <typename Derived>
  static Matrix from_eigen(const Eigen::MatrixBase<Derived>& e) {
    Matrix m(e.rows(), e.cols());
    m.map() = e;
    return m;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return rows_ * cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(Index r, Index c) { return data_[idx(r, c)]; }
  double operator()(Index r, Index c) const { return data_[idx(r, c)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  MatrixMap map() { return MatrixMap(data_.data(), rows_, cols_); }
  ConstMatrixMap map() const {
    return ConstMatrixMap(data_.data(), rows_, cols_);
  }

  // Contiguous view of row r (row-major storage).
  Eigen::Map<Eigen::VectorXd> row(Index r) {
    return Eigen::Map<Eigen::VectorXd>(data_.data() + r * cols_, cols_);
  }
  Eigen::Map<const Eigen::VectorXd> row(Index r) const {
    return Eigen::Map<const Eigen::VectorXd>(data_.data() + r * cols_, cols_);
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    t.map() = map().transpose();
    return t;
  }

  double frobenius_norm() const { return map().norm(); }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  // (row, col) of the first non-finite entry, or (-1, -1) if none.
  std::pair<Index, Index> first_non_finite() const {
    for (Index r = 0; r < rows_; ++r)
      for (Index c = 0; c < cols_; ++c)
        if (!std::isfinite((*this)(r, c))) return {r, c};
    return {-1, -1};
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t idx(Index r, Index c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner dimensions disagree (" +
                         std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + ")");
  Matrix c(a.rows(), b.cols());
  c.map().noalias() = a.map() * b.map();
  return c;
}

inline std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace mvc
