// Dense kernels behind the alternating solvers: thin SVD, the trace-maximizing
// orthonormal factor, and column orthonormalization.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvclust/matrix.hpp"
#include "mvclust/rng.hpp"

namespace mvc {

struct ThinSvd {
  Matrix u;               // p x r
  std::vector<double> s;  // r singular values, non-negative, non-increasing
  Matrix v;               // q x r
};

namespace detail {

// Fix signs so the largest-magnitude entry of each column of U is positive;
// repeated runs then produce identical factors.
inline void fix_svd_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (Index c = 0; c < u.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < u.rows(); ++r) {
      const double mag = std::abs(u(r, c));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (u(arg, c) < 0.0) {
      u.col(c) = -u.col(c);
      if (c < v.cols()) v.col(c) = -v.col(c);
    }
  }
}

}  // namespace detail

// Thin SVD A = U diag(S) V^T with r = min(p, q).
inline ThinSvd thin_svd(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1)
    throw DimensionError("thin_svd: empty matrix " + shape_str(a));
  if (!a.all_finite())
    throw NumericError("thin_svd: non-finite entries in " + shape_str(a) +
                       " input");

  const Eigen::MatrixXd dense = a.map();
  Eigen::MatrixXd u, v;
  Eigen::VectorXd sv;
  const Index mindim = std::min(a.rows(), a.cols());
  if (mindim >= 64) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
      throw NumericError("thin_svd: SVD failed to converge on " +
                         shape_str(a) + " matrix");
    u = svd.matrixU();
    v = svd.matrixV();
    sv = svd.singularValues();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
      throw NumericError("thin_svd: SVD failed to converge on " +
                         shape_str(a) + " matrix");
    u = svd.matrixU();
    v = svd.matrixV();
    sv = svd.singularValues();
  }
  detail::fix_svd_signs(u, v);

  ThinSvd out;
  out.u = Matrix::from_eigen(u);
  out.v = Matrix::from_eigen(v);
  out.s.assign(sv.data(), sv.data() + sv.size());
  return out;
}

// argmax_G Tr(G^T H) over column-orthonormal G, solved as U V^T from the
// thin SVD of H. When rows(H) < cols(H) the factor has rank rows(H) and
// G^T G is a projection rather than the identity.
inline Matrix procrustes_max_trace(const Matrix& h) {
  const ThinSvd svd = thin_svd(h);
  return matmul(svd.u, svd.v.transposed());
}

// Orthonormal basis with the column span of A (Householder QR). A zero input
// falls back to orthonormalizing a seeded Gaussian draw; `used_fallback`
// reports whether that happened.
inline Matrix orthonormal_columns(const Matrix& a, std::uint64_t seed,
                                  bool* used_fallback = nullptr) {
  if (a.cols() > a.rows())
    throw DimensionError("orthonormal_columns: need cols <= rows, got " +
                         shape_str(a));
  if (used_fallback) *used_fallback = false;

  Eigen::MatrixXd work = a.map();
  if (work.norm() == 0.0) {
    if (used_fallback) *used_fallback = true;
    Rng rng(seed);
    for (Index r = 0; r < work.rows(); ++r)
      for (Index c = 0; c < work.cols(); ++c) work(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(work);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  return Matrix::from_eigen(q);
}

// Random matrix with orthonormal columns, drawn from the given source.
inline Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  if (cols > rows)
    throw DimensionError("random_orthonormal: need cols <= rows, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  Eigen::MatrixXd g(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) g(r, c) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  return Matrix::from_eigen(q);
}

// ||Q^T Q - I||_F, the column-orthonormality defect.
inline double orthonormality_error(const Matrix& q) {
  const Eigen::MatrixXd gram = q.map().transpose() * q.map();
  return (gram - Eigen::MatrixXd::Identity(q.cols(), q.cols())).norm();
}

}  // namespace mvc
