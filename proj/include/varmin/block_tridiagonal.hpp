#pragma once

#include "varmin/types.hpp"

#include <optional>
#include <vector>

namespace varmin {

/// Symmetric block-tridiagonal matrix with n diagonal blocks of size d x d.
/// upper[j] couples block j (rows) to block j + 1 (columns).
struct BlockTridiagonal {
  std::vector<Mat> diag;
  std::vector<Mat> upper;

  std::size_t blocks() const noexcept { return diag.size(); }
  Mat dense() const;
  Vec multiply(const Vec& v) const;
};

/// Block Thomas elimination. Returns nullopt when a pivot block is singular
/// or the result is not finite.
std::optional<Vec> solve_block_tridiagonal(const BlockTridiagonal& a, const Vec& rhs);

}  // namespace varmin
