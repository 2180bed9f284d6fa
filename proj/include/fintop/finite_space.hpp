#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fintop {

using PointIndex = int;

// A set of points of a finite space, one bit per point. Spaces are capped at
// kMaxPoints so that every subset fits in a single word; all sweeps in this
// library stay far below the cap.
using PointMask = std::uint64_t;

inline constexpr int kMaxPoints = 64;

constexpr PointMask point_bit(PointIndex i) { return PointMask{1} << i; }

constexpr bool mask_contains(PointMask s, PointIndex i) { return (s >> i) & PointMask{1}; }

constexpr PointMask full_mask(int n) {
  return n >= kMaxPoints ? ~PointMask{0} : (PointMask{1} << n) - 1;
}

inline int mask_size(PointMask s) { return std::popcount(s); }

inline std::vector<PointIndex> mask_points(PointMask s) {
  std::vector<PointIndex> out;
  out.reserve(static_cast<std::size_t>(std::popcount(s)));
  while (s) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

// k-th subset of an n-point set in canonical order: lexicographic on
// membership vectors, point 0 compared first. Enumerating k = 0 .. 2^n - 1
// therefore walks all subsets from the empty set to the full set.
inline PointMask canonical_subset(int n, std::uint64_t k) {
  PointMask m = 0;
  for (int i = 0; i < n; ++i)
    if ((k >> (n - 1 - i)) & 1) m |= point_bit(i);
  return m;
}

/// Finite topological space encoded by its specialization preorder.
///
/// leq(x, y) means x lies in the closure of {y}. Open sets are exactly the
/// up-closed sets, so the minimal open neighborhood of x is its up-set and
/// the closure of {x} is its down-set. The preorder must be reflexive and
/// transitive; constructors enforce (or establish) both.
class FiniteSpace {
 public:
  FiniteSpace() = default;

  static FiniteSpace discrete(int n) {
    std::vector<PointMask> up(static_cast<std::size_t>(check_count(n)));
    for (int x = 0; x < n; ++x) up[static_cast<std::size_t>(x)] = point_bit(x);
    return FiniteSpace(std::move(up));
  }

  static FiniteSpace indiscrete(int n) {
    std::vector<PointMask> up(static_cast<std::size_t>(check_count(n)), full_mask(n));
    return FiniteSpace(std::move(up));
  }

  /// Two points with 0 in the closure of {1}; the opens are {}, {1}, {0,1}.
  static FiniteSpace sierpinski() {
    return FiniteSpace({point_bit(0) | point_bit(1), point_bit(1)});
  }

  /// Builds a space from leq pairs. Reflexivity is implicit and the
  /// reflexive-transitive closure is applied. With strict=true, input whose
  /// closure adds a non-reflexive pair not listed is rejected.
  static FiniteSpace from_relation(int n, std::span<const std::pair<PointIndex, PointIndex>> rel,
                                   bool strict = false) {
    check_count(n);
    std::vector<PointMask> up(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) up[static_cast<std::size_t>(x)] = point_bit(x);
    for (const auto& [x, y] : rel) {
      if (x < 0 || x >= n || y < 0 || y >= n)
        throw std::out_of_range("relation pair (" + std::to_string(x) + "," + std::to_string(y) +
                                ") out of range for " + std::to_string(n) + " points");
      up[static_cast<std::size_t>(x)] |= point_bit(y);
    }
    std::vector<PointMask> given = up;
    transitive_close(up);
    if (strict && up != given) {
      for (int x = 0; x < n; ++x) {
        PointMask added = up[static_cast<std::size_t>(x)] & ~given[static_cast<std::size_t>(x)];
        if (added) {
          int y = std::countr_zero(added);
          throw std::invalid_argument("relation is not transitively closed: implied pair (" +
                                      std::to_string(x) + "," + std::to_string(y) +
                                      ") is missing");
        }
      }
    }
    return FiniteSpace(std::move(up));
  }

  /// up[x] must already be the reflexive-transitive up-set of x.
  static FiniteSpace from_up_masks(std::vector<PointMask> up) {
    const int n = check_count(static_cast<int>(up.size()));
    for (int x = 0; x < n; ++x) {
      PointMask ux = up[static_cast<std::size_t>(x)];
      if (ux & ~full_mask(n)) throw std::invalid_argument("up-set mask exceeds point range");
      if (!mask_contains(ux, x)) throw std::invalid_argument("relation is not reflexive");
    }
    for (int x = 0; x < n; ++x) {
      PointMask t = up[static_cast<std::size_t>(x)];
      while (t) {
        int y = std::countr_zero(t);
        t &= t - 1;
        if (up[static_cast<std::size_t>(y)] & ~up[static_cast<std::size_t>(x)])
          throw std::invalid_argument("relation is not transitive");
      }
    }
    return FiniteSpace(std::move(up));
  }

  int size() const { return n_; }
  PointMask full() const { return full_mask(n_); }

  /// x lies in the closure of {y}.
  bool leq(PointIndex x, PointIndex y) const {
    check_point(x);
    check_point(y);
    return mask_contains(up_[static_cast<std::size_t>(x)], y);
  }

  bool comparable(PointIndex x, PointIndex y) const { return leq(x, y) || leq(y, x); }

  /// Smallest open set containing x: its up-set.
  PointMask minimal_open(PointIndex x) const {
    check_point(x);
    return up_[static_cast<std::size_t>(x)];
  }

  /// Closure of the singleton {x}: its down-set.
  PointMask point_closure(PointIndex x) const {
    check_point(x);
    return down_[static_cast<std::size_t>(x)];
  }

  bool is_open(PointMask s) const {
    check_mask(s);
    for (PointMask t = s; t;) {
      int x = std::countr_zero(t);
      t &= t - 1;
      if (up_[static_cast<std::size_t>(x)] & ~s) return false;
    }
    return true;
  }

  bool is_closed(PointMask s) const {
    check_mask(s);
    for (PointMask t = s; t;) {
      int x = std::countr_zero(t);
      t &= t - 1;
      if (down_[static_cast<std::size_t>(x)] & ~s) return false;
    }
    return true;
  }

  /// Smallest closed superset of s.
  PointMask closure(PointMask s) const {
    check_mask(s);
    PointMask r = 0;
    while (s) {
      int x = std::countr_zero(s);
      s &= s - 1;
      r |= down_[static_cast<std::size_t>(x)];
    }
    return r;
  }

  /// All open sets, in canonical order (lexicographic on membership vectors).
  /// Intended for oracles and small spaces; refuses to enumerate past 2^20.
  std::vector<PointMask> all_opens() const {
    if (n_ > 20) throw std::length_error("all_opens: space too large to enumerate");
    std::vector<PointMask> out;
    const std::uint64_t total = std::uint64_t{1} << n_;
    for (std::uint64_t k = 0; k < total; ++k) {
      PointMask s = canonical_subset(n_, k);
      if (is_open(s)) out.push_back(s);
    }
    return out;
  }

  /// Fence-connectivity of s: the graph joining comparable points of s is
  /// connected. For finite spaces this coincides with topological
  /// path-connectedness; each comparability edge p leq q carries the explicit
  /// two-point path (see tests). The empty set counts as connected.
  bool is_path_connected(PointMask s) const {
    check_mask(s);
    if (s == 0) return true;
    PointMask reach = s & (~s + 1);
    for (;;) {
      PointMask grown = reach;
      for (PointMask t = reach; t;) {
        int x = std::countr_zero(t);
        t &= t - 1;
        grown |= (up_[static_cast<std::size_t>(x)] | down_[static_cast<std::size_t>(x)]) & s;
      }
      if (grown == reach) break;
      reach = grown;
    }
    return reach == s;
  }

  bool operator==(const FiniteSpace&) const = default;

 private:
  explicit FiniteSpace(std::vector<PointMask> up) : n_(static_cast<int>(up.size())), up_(std::move(up)) {
    down_.assign(static_cast<std::size_t>(n_), 0);
    for (int x = 0; x < n_; ++x)
      for (PointMask t = up_[static_cast<std::size_t>(x)]; t;) {
        int y = std::countr_zero(t);
        t &= t - 1;
        down_[static_cast<std::size_t>(y)] |= point_bit(x);
      }
  }

  static int check_count(int n) {
    if (n < 0 || n > kMaxPoints)
      throw std::invalid_argument("point count must be between 0 and " + std::to_string(kMaxPoints));
    return n;
  }

  void check_point(PointIndex x) const {
    if (x < 0 || x >= n_)
      throw std::out_of_range("point index " + std::to_string(x) + " out of range for " +
                              std::to_string(n_) + " points");
  }

  void check_mask(PointMask s) const {
    if (s & ~full()) throw std::out_of_range("point set extends past the space's points");
  }

  static void transitive_close(std::vector<PointMask>& up) {
    const int n = static_cast<int>(up.size());
    for (int k = 0; k < n; ++k)
      for (int x = 0; x < n; ++x)
        if (mask_contains(up[static_cast<std::size_t>(x)], k))
          up[static_cast<std::size_t>(x)] |= up[static_cast<std::size_t>(k)];
  }

  int n_ = 0;
  std::vector<PointMask> up_;
  std::vector<PointMask> down_;
};

/// Preorder preservation, which for finite spaces equals the definitional
/// "preimage of every open is open" (the equivalence is oracle-tested).
inline bool is_continuous(const FiniteSpace& dom, const FiniteSpace& cod,
                          std::span<const PointIndex> f) {
  if (static_cast<int>(f.size()) != dom.size())
    throw std::invalid_argument("map must be total on the domain's points");
  for (PointIndex v : f)
    if (v < 0 || v >= cod.size()) throw std::out_of_range("map value out of codomain range");
  for (int x = 0; x < dom.size(); ++x)
    for (int y = 0; y < dom.size(); ++y)
      if (dom.leq(x, y) && !cod.leq(f[static_cast<std::size_t>(x)], f[static_cast<std::size_t>(y)]))
        return false;
  return true;
}

/// A subset of a space with its induced topology (restriction of the
/// preorder), plus the index translation in both directions.
struct Subspace {
  FiniteSpace space;
  std::vector<PointIndex> points;    // subspace index -> ambient point
  std::vector<PointIndex> index_of;  // ambient point -> subspace index, -1 outside
};

inline Subspace subspace(const FiniteSpace& ambient, PointMask s) {
  if (s & ~ambient.full()) throw std::out_of_range("subspace set extends past the space's points");
  Subspace out;
  out.points = mask_points(s);
  out.index_of.assign(static_cast<std::size_t>(ambient.size()), -1);
  for (std::size_t i = 0; i < out.points.size(); ++i)
    out.index_of[static_cast<std::size_t>(out.points[i])] = static_cast<PointIndex>(i);
  std::vector<PointMask> up(out.points.size(), 0);
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    PointMask amb = ambient.minimal_open(out.points[i]) & s;
    while (amb) {
      int y = std::countr_zero(amb);
      amb &= amb - 1;
      up[i] |= point_bit(out.index_of[static_cast<std::size_t>(y)]);
    }
  }
  out.space = FiniteSpace::from_up_masks(std::move(up));
  return out;
}

}  // namespace fintop
