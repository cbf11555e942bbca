#include "varmin/block_tridiagonal.hpp"

#include <Eigen/LU>

namespace varmin {

Mat BlockTridiagonal::dense() const {
  const std::size_t n = blocks();
  if (n == 0) return Mat();
  const auto d = diag.front().rows();
  Mat m = Mat::Zero(n * d, n * d);
  for (std::size_t j = 0; j < n; ++j) {
    m.block(j * d, j * d, d, d) = diag[j];
    if (j + 1 < n) {
      m.block(j * d, (j + 1) * d, d, d) = upper[j];
      m.block((j + 1) * d, j * d, d, d) = upper[j].transpose();
    }
  }
  return m;
}

Vec BlockTridiagonal::multiply(const Vec& v) const {
  const std::size_t n = blocks();
  const auto d = n ? diag.front().rows() : 0;
  Vec out = Vec::Zero(v.size());
  for (std::size_t j = 0; j < n; ++j) {
    out.segment(j * d, d) += diag[j] * v.segment(j * d, d);
    if (j + 1 < n) {
      out.segment(j * d, d) += upper[j] * v.segment((j + 1) * d, d);
      out.segment((j + 1) * d, d) += upper[j].transpose() * v.segment(j * d, d);
    }
  }
  return out;
}

std::optional<Vec> solve_block_tridiagonal(const BlockTridiagonal& a, const Vec& rhs) {
  const std::size_t n = a.blocks();
  if (n == 0) return Vec();
  const auto d = a.diag.front().rows();
  if (rhs.size() != static_cast<Eigen::Index>(n * d) || a.upper.size() + 1 != n) return std::nullopt;

  // Forward sweep: S_j = D_j - U_{j-1}^T S_{j-1}^{-1} U_{j-1}.
  std::vector<Eigen::PartialPivLU<Mat>> pivots;
  pivots.reserve(n);
  std::vector<Mat> coupling(n);  // S_j^{-1} U_j
  std::vector<Vec> reduced(n);   // S_j^{-1} (b_j - U_{j-1}^T reduced_{j-1})
  for (std::size_t j = 0; j < n; ++j) {
    Mat s = a.diag[j];
    Vec b = rhs.segment(j * d, d);
    if (j > 0) {
      s -= a.upper[j - 1].transpose() * coupling[j - 1];
      b -= a.upper[j - 1].transpose() * reduced[j - 1];
    }
    pivots.emplace_back(s);
    const double scale = s.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !(pivots.back().rcond() > 1e-14)) return std::nullopt;
    if (j + 1 < n) coupling[j] = pivots.back().solve(a.upper[j]);
    reduced[j] = pivots.back().solve(b);
  }

  Vec x(n * d);
  for (std::size_t j = n; j-- > 0;) {
    Vec xj = reduced[j];
    if (j + 1 < n) xj -= coupling[j] * x.segment((j + 1) * d, d);
    x.segment(j * d, d) = xj;
  }
  if (!x.allFinite()) return std::nullopt;
  return x;
}

}  // namespace varmin
