#pragma once

#include "fintop/finite_space.hpp"

namespace fintop {

/// All labeled preorders (reflexive-transitive relations) on n points, for
/// 1 <= n <= 4. Candidates are scanned in increasing order of their
/// off-diagonal relation encoding (row-major), so the order is deterministic
/// and the discrete space comes first. Expected counts: 1, 4, 29, 355.
inline std::vector<FiniteSpace> enumerate_preorders(int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("enumerate_preorders: n must be in [1,4]");
  std::vector<std::pair<PointIndex, PointIndex>> slots;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y) slots.emplace_back(x, y);

  std::vector<FiniteSpace> out;
  const std::uint64_t total = std::uint64_t{1} << slots.size();
  std::vector<PointMask> up(static_cast<std::size_t>(n));
  for (std::uint64_t enc = 0; enc < total; ++enc) {
    for (int x = 0; x < n; ++x) up[static_cast<std::size_t>(x)] = point_bit(x);
    for (std::size_t k = 0; k < slots.size(); ++k)
      if ((enc >> k) & 1) up[static_cast<std::size_t>(slots[k].first)] |= point_bit(slots[k].second);
    bool transitive = true;
    for (int x = 0; x < n && transitive; ++x)
      for (PointMask t = up[static_cast<std::size_t>(x)]; t;) {
        int y = std::countr_zero(t);
        t &= t - 1;
        if (up[static_cast<std::size_t>(y)] & ~up[static_cast<std::size_t>(x)]) {
          transitive = false;
          break;
        }
      }
    if (transitive) out.push_back(FiniteSpace::from_up_masks(up));
  }
  return out;
}

/// Order isomorphism (= homeomorphism) test via brute-force permutation
/// search; only meant for the tiny spaces this library enumerates. Used by
/// the reporting-level deduplication option.
inline bool homeomorphic(const FiniteSpace& a, const FiniteSpace& b) {
  if (a.size() != b.size()) return false;
  const int n = a.size();
  std::vector<PointIndex> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  do {
    bool match = true;
    for (int x = 0; x < n && match; ++x)
      for (int y = 0; y < n && match; ++y)
        if (a.leq(x, y) != b.leq(perm[static_cast<std::size_t>(x)], perm[static_cast<std::size_t>(y)]))
          match = false;
    if (match) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace fintop
