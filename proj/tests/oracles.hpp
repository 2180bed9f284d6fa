#pragma once

// Reference implementations used only by tests. Each one recomputes its
// answer from first principles (set families, open-set preimages, exhaustive
// box searches, union-find) instead of the library's shortcuts, so
// agreement is evidence rather than tautology. Shared ground is only the
// data encoding: spaces are given by their preorder (leq), subsets by bit
// masks.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "fintop/fintop.hpp"

namespace oracle {

using fintop::Chart;
using fintop::FiniteSpace;
using fintop::PointIndex;
using fintop::PointMask;
using fintop::ProductSpace;
using fintop::TwoSpace;

// A set is open iff no member's way up leads outside: for x in s and
// x leq y, y must be in s.
inline bool is_open(const FiniteSpace& s, PointMask m) {
  for (int x = 0; x < s.size(); ++x) {
    if (!fintop::mask_contains(m, x)) continue;
    for (int y = 0; y < s.size(); ++y)
      if (s.leq(x, y) && !fintop::mask_contains(m, y)) return false;
  }
  return true;
}

inline bool is_closed(const FiniteSpace& s, PointMask m) {
  return is_open(s, s.full() & ~m);
}

// Every open set, by filtering all subsets. Exponential; test scale only.
inline std::vector<PointMask> brute_opens(const FiniteSpace& s) {
  std::vector<PointMask> opens;
  const std::uint64_t total = std::uint64_t{1} << s.size();
  for (std::uint64_t m = 0; m < total; ++m)
    if (is_open(s, static_cast<PointMask>(m))) opens.push_back(static_cast<PointMask>(m));
  return opens;
}

// Smallest closed superset: intersect all closed sets containing m.
inline PointMask brute_closure(const FiniteSpace& s, PointMask m) {
  PointMask result = s.full();
  const std::uint64_t total = std::uint64_t{1} << s.size();
  for (std::uint64_t k = 0; k < total; ++k) {
    PointMask candidate = static_cast<PointMask>(k);
    if ((m & ~candidate) == 0 && is_closed(s, candidate)) result &= candidate;
  }
  return result;
}

// Continuity via open-set preimages rather than order preservation.
inline bool preimage_continuous(const FiniteSpace& dom, const FiniteSpace& cod,
                                std::span<const PointIndex> f) {
  for (PointMask v : brute_opens(cod)) {
    PointMask pre = 0;
    for (int x = 0; x < dom.size(); ++x)
      if (fintop::mask_contains(v, f[static_cast<std::size_t>(x)])) pre |= fintop::point_bit(x);
    if (!is_open(dom, pre)) return false;
  }
  return true;
}

// Union-find connectivity over the comparability graph restricted to m.
inline bool dsu_connected(const FiniteSpace& s, PointMask m) {
  std::vector<PointIndex> pts = fintop::mask_points(m);
  if (pts.size() <= 1) return true;
  std::vector<int> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (s.leq(pts[i], pts[j]) || s.leq(pts[j], pts[i]))
        parent[static_cast<std::size_t>(find(static_cast<int>(i)))] =
            find(static_cast<int>(j));
  int root = find(0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (find(static_cast<int>(i)) != root) return false;
  return true;
}

// All topologies on n labeled points as sorted open-set families: subsets of
// the proper nonempty subsets that, together with the empty and full sets,
// are closed under pairwise union and intersection.
inline std::vector<std::vector<PointMask>> closure_system_topologies(int n) {
  const PointMask full = (PointMask{1} << n) - 1;
  std::vector<PointMask> proper;
  for (PointMask s = 1; s < full; ++s) proper.push_back(s);
  std::vector<std::vector<PointMask>> out;
  const std::uint64_t limit = std::uint64_t{1} << proper.size();
  for (std::uint64_t pick = 0; pick < limit; ++pick) {
    std::vector<PointMask> family{0};
    for (std::size_t i = 0; i < proper.size(); ++i)
      if ((pick >> i) & 1) family.push_back(proper[i]);
    family.push_back(full);  // ascending by construction
    bool ok = true;
    for (std::size_t i = 0; i < family.size() && ok; ++i)
      for (std::size_t j = i + 1; j < family.size(); ++j) {
        if (!std::binary_search(family.begin(), family.end(), family[i] | family[j]) ||
            !std::binary_search(family.begin(), family.end(), family[i] & family[j])) {
          ok = false;
          break;
        }
      }
    if (ok) out.push_back(std::move(family));
  }
  return out;
}

// Specialization preorder of an open-set family: x leq y iff every open set
// containing x contains y (equivalently x lies in the closure of {y}).
inline FiniteSpace space_from_opens(int n, const std::vector<PointMask>& opens) {
  std::vector<PointMask> up(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    PointMask m = (PointMask{1} << n) - 1;
    for (PointMask o : opens)
      if (fintop::mask_contains(o, x)) m &= o;
    up[static_cast<std::size_t>(x)] = m;
  }
  return FiniteSpace::from_up_masks(std::move(up));
}

// Does ANY open box U x V around product point p trim c to a rectangle?
// Opens per factor may be precomputed by the caller (they repeat per pair).
inline bool exists_rectangle_box(const ProductSpace& ps, PointMask c, PointIndex p,
                                 const std::vector<PointMask>& opens_x,
                                 const std::vector<PointMask>& opens_y) {
  const int ny = ps.y().size();
  const PointIndex a = p / ny, b = p % ny;
  for (PointMask u : opens_x) {
    if (!fintop::mask_contains(u, a)) continue;
    for (PointMask v : opens_y) {
      if (!fintop::mask_contains(v, b)) continue;
      PointMask piece = 0;
      for (PointIndex i : fintop::mask_points(u))
        for (PointIndex j : fintop::mask_points(v))
          piece |= fintop::point_bit(i * ny + j) & c;
      PointMask is = 0, js = 0;
      for (PointIndex q : fintop::mask_points(piece)) {
        is |= fintop::point_bit(q / ny);
        js |= fintop::point_bit(q % ny);
      }
      bool rectangle = true;
      for (PointIndex i : fintop::mask_points(is))
        for (PointIndex j : fintop::mask_points(js))
          if (!fintop::mask_contains(piece, i * ny + j)) {
            rectangle = false;
            break;
          }
      if (rectangle) return true;
    }
  }
  return false;
}

inline bool exists_rectangle_box(const ProductSpace& ps, PointMask c, PointIndex p) {
  return exists_rectangle_box(ps, c, p, brute_opens(ps.x()), brute_opens(ps.y()));
}

// Splitting of a transition-like map on an arbitrary box: the U-output must
// not depend on the N coordinate and the V-output must not depend on the M
// coordinate.
inline bool splits_on_box(const std::vector<PointIndex>& ms, const std::vector<PointIndex>& ns,
                          int v2_size,
                          const std::vector<std::vector<PointIndex>>& image /* [mi][ni] flat */) {
  for (std::size_t mi = 0; mi < ms.size(); ++mi)
    for (std::size_t ni = 1; ni < ns.size(); ++ni)
      if (image[mi][ni] / v2_size != image[mi][0] / v2_size) return false;
  for (std::size_t ni = 0; ni < ns.size(); ++ni)
    for (std::size_t mi = 1; mi < ms.size(); ++mi)
      if (image[mi][ni] % v2_size != image[0][ni] % v2_size) return false;
  return true;
}

// Existential version of the chart-compatibility condition: some open box
// M x N inside U1 x V1 around phi1(c) whose preimage stays in chart j's
// domain and on which the transition splits.
inline bool exists_compat_box(const TwoSpace& w, int i, int j, PointIndex c) {
  const Chart& phi1 = w.charts[static_cast<std::size_t>(i)];
  const Chart& phi2 = w.charts[static_cast<std::size_t>(j)];
  auto [u0, v0] = phi1.unflat(phi1.forward[static_cast<std::size_t>(c)]);
  for (PointMask m : brute_opens(phi1.u_space)) {
    if (!fintop::mask_contains(m, u0)) continue;
    for (PointMask n : brute_opens(phi1.v_space)) {
      if (!fintop::mask_contains(n, v0)) continue;
      std::vector<PointIndex> ms = fintop::mask_points(m);
      std::vector<PointIndex> ns = fintop::mask_points(n);
      bool contained = true;
      std::vector<std::vector<PointIndex>> image(ms.size(),
                                                 std::vector<PointIndex>(ns.size(), -1));
      for (std::size_t mi = 0; mi < ms.size() && contained; ++mi)
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
          PointIndex base = phi1.inverse[static_cast<std::size_t>(phi1.flat(ms[mi], ns[ni]))];
          if (base < 0 || !fintop::mask_contains(phi2.domain, base)) {
            contained = false;
            break;
          }
          image[mi][ni] = phi2.forward[static_cast<std::size_t>(base)];
        }
      if (contained && splits_on_box(ms, ns, phi2.v_space.size(), image)) return true;
    }
  }
  return false;
}

// Existential version of the 2-map condition at (c, source chart i, target
// chart j): some open box around phi1(c) that h carries into chart j's
// domain with a split expression.
inline bool exists_two_map_box(const TwoSpace& src, const TwoSpace& dst,
                               std::span<const PointIndex> h, PointIndex c, int i, int j) {
  const Chart& phi1 = src.charts[static_cast<std::size_t>(i)];
  const Chart& phi2 = dst.charts[static_cast<std::size_t>(j)];
  auto [u0, v0] = phi1.unflat(phi1.forward[static_cast<std::size_t>(c)]);
  for (PointMask m : brute_opens(phi1.u_space)) {
    if (!fintop::mask_contains(m, u0)) continue;
    for (PointMask n : brute_opens(phi1.v_space)) {
      if (!fintop::mask_contains(n, v0)) continue;
      std::vector<PointIndex> ms = fintop::mask_points(m);
      std::vector<PointIndex> ns = fintop::mask_points(n);
      bool contained = true;
      std::vector<std::vector<PointIndex>> image(ms.size(),
                                                 std::vector<PointIndex>(ns.size(), -1));
      for (std::size_t mi = 0; mi < ms.size() && contained; ++mi)
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
          PointIndex base = phi1.inverse[static_cast<std::size_t>(phi1.flat(ms[mi], ns[ni]))];
          PointIndex mapped = base < 0 ? -1 : h[static_cast<std::size_t>(base)];
          if (mapped < 0 || !fintop::mask_contains(phi2.domain, mapped)) {
            contained = false;
            break;
          }
          image[mi][ni] = phi2.forward[static_cast<std::size_t>(mapped)];
        }
      if (contained && splits_on_box(ms, ns, phi2.v_space.size(), image)) return true;
    }
  }
  return false;
}

}  // namespace oracle
