#pragma once

#include <optional>
#include <sstream>
#include <utility>

#include "fintop/finite_space.hpp"

namespace fintop {

/// X x Y with the componentwise preorder. Points are indexed flat as
/// a * |Y| + b; the induced FiniteSpace view carries the product topology,
/// whose minimal opens are exactly the boxes U_a x V_b of factor minimal
/// opens (invariant-tested).
class ProductSpace {
 public:
  ProductSpace(FiniteSpace x, FiniteSpace y) : x_(std::move(x)), y_(std::move(y)) {
    nx_ = x_.size();
    ny_ = y_.size();
    if (nx_ > 0 && ny_ > kMaxPoints / nx_)
      throw std::length_error("product space exceeds " + std::to_string(kMaxPoints) + " points");
    const int n = nx_ * ny_;
    std::vector<PointMask> up(static_cast<std::size_t>(n));
    for (int a = 0; a < nx_; ++a)
      for (int b = 0; b < ny_; ++b)
        up[static_cast<std::size_t>(a * ny_ + b)] = box(x_.minimal_open(a), y_.minimal_open(b));
    space_ = FiniteSpace::from_up_masks(std::move(up));
    cols_.assign(static_cast<std::size_t>(ny_), 0);
    for (int b = 0; b < ny_; ++b)
      for (int a = 0; a < nx_; ++a) cols_[static_cast<std::size_t>(b)] |= point_bit(a * ny_ + b);
  }

  const FiniteSpace& x() const { return x_; }
  const FiniteSpace& y() const { return y_; }
  const FiniteSpace& space() const { return space_; }
  int size() const { return nx_ * ny_; }

  PointIndex flat(PointIndex a, PointIndex b) const {
    if (a < 0 || a >= nx_ || b < 0 || b >= ny_)
      throw std::out_of_range("product point (" + std::to_string(a) + "," + std::to_string(b) +
                              ") out of range");
    return a * ny_ + b;
  }

  std::pair<PointIndex, PointIndex> unflat(PointIndex p) const {
    if (p < 0 || p >= size()) throw std::out_of_range("flat product index out of range");
    return {p / ny_, p % ny_};
  }

  /// {(a,b) : a in as, b in bs} as a flat mask.
  PointMask box(PointMask as, PointMask bs) const {
    PointMask m = 0;
    while (as) {
      int a = std::countr_zero(as);
      as &= as - 1;
      m |= bs << (a * ny_);
    }
    return m;
  }

  PointMask project_x(PointMask c) const {
    PointMask a = 0;
    const PointMask row = full_mask(ny_);
    for (int i = 0; i < nx_; ++i)
      if (c & (row << (i * ny_))) a |= point_bit(i);
    return a;
  }

  PointMask project_y(PointMask c) const {
    PointMask b = 0;
    for (int j = 0; j < ny_; ++j)
      if (c & cols_[static_cast<std::size_t>(j)]) b |= point_bit(j);
    return b;
  }

  /// Minimal open box around a flat point: U_a x V_b.
  PointMask open_box_at(PointIndex p) const { return space_.minimal_open(p); }

 private:
  FiniteSpace x_, y_, space_;
  int nx_ = 0, ny_ = 0;
  std::vector<PointMask> cols_;
};

/// Validates a list of coordinate pairs against the product and packs them
/// into a flat mask.
inline PointMask make_subset(const ProductSpace& ps,
                             std::span<const std::pair<PointIndex, PointIndex>> pairs) {
  PointMask c = 0;
  for (const auto& [a, b] : pairs) c |= point_bit(ps.flat(a, b));
  return c;
}

/// c equals the box of its own projections. The empty set counts as the
/// empty rectangle.
inline bool is_rectangle(const ProductSpace& ps, PointMask c) {
  return mask_size(c) == mask_size(ps.project_x(c)) * mask_size(ps.project_y(c));
}

/// Fast hypothesis test: every minimal open box meets c in a rectangle.
/// Quantifies over all ambient points, members of c or not.
inline bool is_locally_product(const ProductSpace& ps, PointMask c) {
  for (int p = 0; p < ps.size(); ++p)
    if (!is_rectangle(ps, c & ps.open_box_at(p))) return false;
  return true;
}

struct BoxWitness {
  PointMask i_set = 0;  // projection of c within the box, X side
  PointMask j_set = 0;  // Y side
  bool rectangle = true;
};

/// Per-point record of the local-product check. The canonical witness box at
/// (a,b) is the minimal open box U_a x V_b; an arbitrary open witness box
/// exists iff the minimal one works, because minimal boxes sit inside every
/// open box around the point and rectangles stay rectangles under
/// intersection with open boxes. Both facts are oracle-tested.
struct LocalProductCertificate {
  bool ok = true;
  PointIndex failing_point = -1;  // first non-rectangle point in canonical order
  std::vector<BoxWitness> witnesses;
};

inline LocalProductCertificate local_product_certificate(const ProductSpace& ps, PointMask c) {
  LocalProductCertificate cert;
  cert.witnesses.resize(static_cast<std::size_t>(ps.size()));
  for (int p = 0; p < ps.size(); ++p) {
    PointMask piece = c & ps.open_box_at(p);
    BoxWitness& w = cert.witnesses[static_cast<std::size_t>(p)];
    w.i_set = ps.project_x(piece);
    w.j_set = ps.project_y(piece);
    w.rectangle = mask_size(piece) == mask_size(w.i_set) * mask_size(w.j_set);
    if (!w.rectangle && cert.ok) {
      cert.ok = false;
      cert.failing_point = p;
    }
  }
  return cert;
}

/// Projections of c and whether they reassemble it exactly. c is always
/// contained in the box of its projections, so exactness reduces to a size
/// comparison.
struct Decomposition {
  PointMask a_set = 0;
  PointMask b_set = 0;
  bool exact = true;
};

inline Decomposition decompose(const ProductSpace& ps, PointMask c) {
  Decomposition d;
  d.a_set = ps.project_x(c);
  d.b_set = ps.project_y(c);
  d.exact = mask_size(c) == mask_size(d.a_set) * mask_size(d.b_set);
  return d;
}

inline std::string describe_instance(const ProductSpace& ps, PointMask c) {
  std::ostringstream os;
  auto rel = [&os](const FiniteSpace& s) {
    os << "points=" << s.size() << " rel={";
    bool first = true;
    for (int i = 0; i < s.size(); ++i)
      for (int j = 0; j < s.size(); ++j)
        if (i != j && s.leq(i, j)) {
          os << (first ? "" : ",") << "(" << i << "," << j << ")";
          first = false;
        }
    os << "}";
  };
  os << "X: ";
  rel(ps.x());
  os << "; Y: ";
  rel(ps.y());
  os << "; C={";
  bool first = true;
  for (PointMask t = c; t;) {
    int p = std::countr_zero(t);
    t &= t - 1;
    auto [a, b] = ps.unflat(p);
    os << (first ? "" : ",") << "(" << a << "," << b << ")";
    first = false;
  }
  os << "}";
  return os.str();
}

/// Raised when a subset satisfies all three hypotheses yet fails to be the
/// box of its projections. Expected never to fire; a throw is either an
/// implementation bug or a genuine refutation and must stop the run.
class TheoremViolation : public std::runtime_error {
 public:
  explicit TheoremViolation(const std::string& instance)
      : std::runtime_error("theorem violation: hypotheses hold but C != A x B for " + instance) {}
};

/// Full evaluation of one subset: the three hypotheses, the certificate, the
/// decomposition, and the conclusion. All flags are always computed, so
/// counterexample searches can filter on arbitrary hypothesis masks.
struct TheoremVerdict {
  bool closed = false;
  bool path_connected = false;
  bool locally_product = false;
  bool conclusion_holds = false;
  Decomposition decomposition;
  LocalProductCertificate certificate;

  bool hypotheses_hold() const { return closed && path_connected && locally_product; }
};

inline TheoremVerdict evaluate_subset(const ProductSpace& ps, PointMask c) {
  TheoremVerdict v;
  v.closed = ps.space().is_closed(c);
  v.path_connected = ps.space().is_path_connected(c);
  v.certificate = local_product_certificate(ps, c);
  v.locally_product = v.certificate.ok;
  v.decomposition = decompose(ps, c);
  v.conclusion_holds = v.decomposition.exact;
  return v;
}

inline TheoremVerdict theorem_verdict(const ProductSpace& ps, PointMask c) {
  TheoremVerdict v = evaluate_subset(ps, c);
  if (v.hypotheses_hold() && !v.conclusion_holds)
    throw TheoremViolation(describe_instance(ps, c));
  return v;
}

/// Grid saturation along a fence: for a sequence of points of c with
/// consecutive members comparable in the product preorder, every mixed pair
/// (x-coordinate of one member, y-coordinate of another) must lie in c.
/// Throws if the sequence is not a fence inside c.
inline bool mixed_pair_property(const ProductSpace& ps, PointMask c,
                                std::span<const PointIndex> path) {
  for (std::size_t i = 0; i < path.size(); ++i) {
    PointIndex p = path[i];
    if (p < 0 || p >= ps.size()) throw std::invalid_argument("fence point out of range");
    if (!mask_contains(c, p)) throw std::invalid_argument("fence point lies outside C");
    if (i > 0 && !ps.space().comparable(path[i - 1], p))
      throw std::invalid_argument("consecutive fence points are incomparable");
  }
  for (PointIndex pi : path) {
    PointIndex a = ps.unflat(pi).first;
    for (PointIndex pj : path) {
      PointIndex b = ps.unflat(pj).second;
      if (!mask_contains(c, a * ps.y().size() + b)) return false;
    }
  }
  return true;
}

}  // namespace fintop
