#pragma once

#include <string>

#include "fintop/product.hpp"

namespace fintop {

/// A chart: a homeomorphism from an open subset of the base space onto the
/// full product u_space x v_space. The inverse is stored explicitly rather
/// than recomputed; validation cross-checks that the two directions agree.
struct Chart {
  PointMask domain = 0;
  FiniteSpace u_space;
  FiniteSpace v_space;
  std::vector<PointIndex> forward;  // base point -> u * |V| + v, -1 outside the domain
  std::vector<PointIndex> inverse;  // u * |V| + v -> base point, -1 when unset

  int flat_size() const { return u_space.size() * v_space.size(); }

  PointIndex flat(PointIndex u, PointIndex v) const { return u * v_space.size() + v; }

  std::pair<PointIndex, PointIndex> unflat(PointIndex p) const {
    return {p / v_space.size(), p % v_space.size()};
  }

  bool operator==(const Chart&) const = default;
};

/// A base space together with an atlas of charts onto products.
struct TwoSpace {
  FiniteSpace base;
  std::vector<Chart> charts;

  bool operator==(const TwoSpace&) const = default;
};

enum class ChartIssue { ok, not_open, not_bijective, not_continuous, inverse_not_continuous };

inline const char* to_string(ChartIssue issue) {
  switch (issue) {
    case ChartIssue::ok: return "ok";
    case ChartIssue::not_open: return "not-open";
    case ChartIssue::not_bijective: return "not-bijective";
    case ChartIssue::not_continuous: return "not-continuous";
    case ChartIssue::inverse_not_continuous: return "inverse-not-continuous";
  }
  return "?";
}

/// Verifies one chart against its base space: open domain, two-sided
/// bijection onto the full product, and continuity in both directions
/// (preorder preservation, componentwise on the product side).
inline ChartIssue check_chart(const FiniteSpace& base, const Chart& chart) {
  if (static_cast<int>(chart.forward.size()) != base.size() ||
      static_cast<int>(chart.inverse.size()) != chart.flat_size() ||
      (chart.domain & ~base.full()))
    throw std::invalid_argument("chart record shape does not match its base space");

  if (!base.is_open(chart.domain)) return ChartIssue::not_open;

  const int flat_n = chart.flat_size();
  if (mask_size(chart.domain) != flat_n) return ChartIssue::not_bijective;
  for (int w = 0; w < base.size(); ++w) {
    PointIndex img = chart.forward[static_cast<std::size_t>(w)];
    if (mask_contains(chart.domain, w)) {
      if (img < 0 || img >= flat_n) return ChartIssue::not_bijective;
      if (chart.inverse[static_cast<std::size_t>(img)] != w) return ChartIssue::not_bijective;
    } else if (img != -1) {
      return ChartIssue::not_bijective;
    }
  }
  for (int p = 0; p < flat_n; ++p) {
    PointIndex w = chart.inverse[static_cast<std::size_t>(p)];
    if (w < 0 || w >= base.size() || !mask_contains(chart.domain, w)) return ChartIssue::not_bijective;
    if (chart.forward[static_cast<std::size_t>(w)] != p) return ChartIssue::not_bijective;
  }

  auto prod_leq = [&chart](PointIndex p, PointIndex q) {
    auto [pu, pv] = chart.unflat(p);
    auto [qu, qv] = chart.unflat(q);
    return chart.u_space.leq(pu, qu) && chart.v_space.leq(pv, qv);
  };
  std::vector<PointIndex> dom = mask_points(chart.domain);
  for (PointIndex w1 : dom)
    for (PointIndex w2 : dom)
      if (base.leq(w1, w2) &&
          !prod_leq(chart.forward[static_cast<std::size_t>(w1)], chart.forward[static_cast<std::size_t>(w2)]))
        return ChartIssue::not_continuous;
  for (int p = 0; p < flat_n; ++p)
    for (int q = 0; q < flat_n; ++q)
      if (prod_leq(p, q) &&
          !base.leq(chart.inverse[static_cast<std::size_t>(p)], chart.inverse[static_cast<std::size_t>(q)]))
        return ChartIssue::inverse_not_continuous;
  return ChartIssue::ok;
}

/// Outcome of one minimal-box transition check. `contained` and `split` make
/// up the plain verdict; `split_continuous` is the strict extra that also
/// demands the split component maps be continuous.
struct SplitCheck {
  bool contained = true;
  bool split = true;
  bool split_continuous = true;

  bool ok() const { return contained && split; }
  bool strict_ok() const { return ok() && split_continuous; }
};

namespace detail {

// Shared minimal-box splitting check. Takes the source chart phi1, a target
// domain test, and the target-side image of a base point. Checks, on the
// minimal open box M x N around phi1(c) inside U1 x V1, that the box
// preimage lands inside the target domain and that the transition there
// factors as (f(u-coordinate), g(v-coordinate)).
//
// Minimal-box sufficiency: any open witness box contains the minimal box,
// the containment condition is monotone downward, and splittings restrict to
// sub-boxes; so the minimal box is a witness iff any box is. Oracle-tested
// against the existential search over all open boxes.
template <typename InDomain, typename Image>
SplitCheck split_on_minimal_box(const Chart& phi1, PointIndex c, const FiniteSpace& u2,
                                const FiniteSpace& v2, InDomain&& in_target_domain,
                                Image&& target_image) {
  SplitCheck result;
  auto [u0, v0] = phi1.unflat(phi1.forward[static_cast<std::size_t>(c)]);
  std::vector<PointIndex> ms = mask_points(phi1.u_space.minimal_open(u0));
  std::vector<PointIndex> ns = mask_points(phi1.v_space.minimal_open(v0));

  std::vector<PointIndex> f(ms.size(), -1), g(ns.size(), -1);
  for (std::size_t mi = 0; mi < ms.size(); ++mi) {
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      PointIndex w = phi1.inverse[static_cast<std::size_t>(phi1.flat(ms[mi], ns[ni]))];
      if (w < 0 || !in_target_domain(w)) {
        result.contained = false;
        return result;
      }
      auto [tu, tv] = std::pair<PointIndex, PointIndex>{target_image(w) / v2.size(),
                                                        target_image(w) % v2.size()};
      if (f[mi] == -1) f[mi] = tu;
      else if (f[mi] != tu) result.split = false;
      if (g[ni] == -1) g[ni] = tv;
      else if (g[ni] != tv) result.split = false;
      if (!result.split) return result;
    }
  }
  for (std::size_t i = 0; i < ms.size() && result.split_continuous; ++i)
    for (std::size_t j = 0; j < ms.size(); ++j)
      if (phi1.u_space.leq(ms[i], ms[j]) && !u2.leq(f[i], f[j])) {
        result.split_continuous = false;
        break;
      }
  for (std::size_t i = 0; i < ns.size() && result.split_continuous; ++i)
    for (std::size_t j = 0; j < ns.size(); ++j)
      if (phi1.v_space.leq(ns[i], ns[j]) && !v2.leq(g[i], g[j])) {
        result.split_continuous = false;
        break;
      }
  return result;
}

}  // namespace detail

/// Chart compatibility at a point c of the overlap of charts i and j: the
/// minimal-box preimage must land in chart j's domain and the transition
/// must split coordinatewise there. The pair is ordered; symmetry is
/// observed empirically, not assumed.
inline SplitCheck check_compatibility(const TwoSpace& w, int i, int j, PointIndex c) {
  if (i < 0 || i >= static_cast<int>(w.charts.size()) || j < 0 ||
      j >= static_cast<int>(w.charts.size()))
    throw std::out_of_range("chart index out of range");
  const Chart& phi1 = w.charts[static_cast<std::size_t>(i)];
  const Chart& phi2 = w.charts[static_cast<std::size_t>(j)];
  if (c < 0 || c >= w.base.size() || !mask_contains(phi1.domain, c) ||
      !mask_contains(phi2.domain, c))
    throw std::invalid_argument("point is not in the overlap of the two chart domains");
  return detail::split_on_minimal_box(
      phi1, c, phi2.u_space, phi2.v_space,
      [&phi2](PointIndex p) { return mask_contains(phi2.domain, p); },
      [&phi2](PointIndex p) { return phi2.forward[static_cast<std::size_t>(p)]; });
}

/// First-failure report of a full atlas validation. `valid` is the plain
/// verdict; `strict_valid` additionally requires every transition's split
/// maps to be continuous (strict mode tracks both so callers can compare).
struct TwoSpaceReport {
  enum class Kind { none, chart, coverage, compatibility };

  bool valid = true;
  bool strict_valid = true;
  Kind kind = Kind::none;
  int chart_index = -1;
  ChartIssue chart_issue = ChartIssue::ok;
  int chart_i = -1, chart_j = -1;
  PointIndex point = -1;
  int strict_chart_i = -1, strict_chart_j = -1;
  PointIndex strict_point = -1;
  std::string message;
};

/// Every chart must pass check_chart, the domains must cover the base, and
/// every ordered chart pair must be compatible at every overlap point.
inline TwoSpaceReport validate_two_space(const TwoSpace& w) {
  TwoSpaceReport report;
  for (std::size_t idx = 0; idx < w.charts.size(); ++idx) {
    ChartIssue issue = check_chart(w.base, w.charts[idx]);
    if (issue != ChartIssue::ok) {
      report.valid = report.strict_valid = false;
      report.kind = TwoSpaceReport::Kind::chart;
      report.chart_index = static_cast<int>(idx);
      report.chart_issue = issue;
      report.message = "chart " + std::to_string(idx) + ": " + to_string(issue);
      return report;
    }
  }
  PointMask covered = 0;
  for (const Chart& c : w.charts) covered |= c.domain;
  if (covered != w.base.full()) {
    report.valid = report.strict_valid = false;
    report.kind = TwoSpaceReport::Kind::coverage;
    report.message = "chart domains do not cover the base space";
    return report;
  }
  for (std::size_t i = 0; i < w.charts.size(); ++i)
    for (std::size_t j = 0; j < w.charts.size(); ++j) {
      PointMask overlap = w.charts[i].domain & w.charts[j].domain;
      while (overlap) {
        PointIndex c = std::countr_zero(overlap);
        overlap &= overlap - 1;
        SplitCheck r = check_compatibility(w, static_cast<int>(i), static_cast<int>(j), c);
        if (!r.ok()) {
          report.valid = report.strict_valid = false;
          report.kind = TwoSpaceReport::Kind::compatibility;
          report.chart_i = static_cast<int>(i);
          report.chart_j = static_cast<int>(j);
          report.point = c;
          report.message = "charts (" + std::to_string(i) + "," + std::to_string(j) +
                           ") incompatible at point " + std::to_string(c) +
                           (r.contained ? ": transition does not split"
                                        : ": box preimage leaves the second domain");
          return report;
        }
        if (!r.strict_ok() && report.strict_valid) {
          report.strict_valid = false;
          report.strict_chart_i = static_cast<int>(i);
          report.strict_chart_j = static_cast<int>(j);
          report.strict_point = c;
          report.message = "strict: split maps of charts (" + std::to_string(i) + "," +
                           std::to_string(j) + ") discontinuous at point " + std::to_string(c);
        }
      }
    }
  return report;
}

/// One chart per member point of a locally-product subset: the piece of c
/// inside the point's minimal open box, mapped coordinatewise onto the box's
/// projections (each taken with its subspace topology). Requires a passing
/// certificate; the result validates (exhaustively tested).
inline TwoSpace from_locally_product_subset(const ProductSpace& ps, PointMask c) {
  LocalProductCertificate cert = local_product_certificate(ps, c);
  if (!cert.ok)
    throw std::invalid_argument("subset is not locally a product: fails at flat point " +
                                std::to_string(cert.failing_point));
  Subspace base = subspace(ps.space(), c);
  TwoSpace w;
  w.base = base.space;
  for (PointMask t = c; t;) {
    PointIndex p = std::countr_zero(t);
    t &= t - 1;
    PointMask piece = c & ps.open_box_at(p);
    Subspace su = subspace(ps.x(), ps.project_x(piece));
    Subspace sv = subspace(ps.y(), ps.project_y(piece));
    Chart chart;
    chart.u_space = su.space;
    chart.v_space = sv.space;
    chart.forward.assign(static_cast<std::size_t>(w.base.size()), -1);
    chart.inverse.assign(static_cast<std::size_t>(chart.flat_size()), -1);
    for (PointMask q = piece; q;) {
      PointIndex g = std::countr_zero(q);
      q &= q - 1;
      auto [a, b] = ps.unflat(g);
      PointIndex wi = base.index_of[static_cast<std::size_t>(g)];
      PointIndex uv = chart.flat(su.index_of[static_cast<std::size_t>(a)],
                                 sv.index_of[static_cast<std::size_t>(b)]);
      chart.forward[static_cast<std::size_t>(wi)] = uv;
      chart.inverse[static_cast<std::size_t>(uv)] = wi;
      chart.domain |= point_bit(wi);
    }
    w.charts.push_back(std::move(chart));
  }
  return w;
}

/// Product of two atlases: base is the product of bases, and each chart pair
/// combines into one chart whose forward map reshuffles ((u1,v1),(u2,v2))
/// into ((u1,u2),(v1,v2)). Inputs must validate; the result validates too
/// (exhaustively tested at small scale).
inline TwoSpace two_product(const TwoSpace& w1, const TwoSpace& w2) {
  if (TwoSpaceReport r = validate_two_space(w1); !r.valid)
    throw std::invalid_argument("two_product: first factor invalid: " + r.message);
  if (TwoSpaceReport r = validate_two_space(w2); !r.valid)
    throw std::invalid_argument("two_product: second factor invalid: " + r.message);

  ProductSpace pb(w1.base, w2.base);
  TwoSpace out;
  out.base = pb.space();
  for (const Chart& c1 : w1.charts)
    for (const Chart& c2 : w2.charts) {
      ProductSpace pu(c1.u_space, c2.u_space);
      ProductSpace pv(c1.v_space, c2.v_space);
      Chart chart;
      chart.u_space = pu.space();
      chart.v_space = pv.space();
      chart.forward.assign(static_cast<std::size_t>(out.base.size()), -1);
      chart.inverse.assign(static_cast<std::size_t>(chart.flat_size()), -1);
      for (PointMask ta = c1.domain; ta;) {
        PointIndex wa = std::countr_zero(ta);
        ta &= ta - 1;
        auto [u1, v1] = c1.unflat(c1.forward[static_cast<std::size_t>(wa)]);
        for (PointMask tb = c2.domain; tb;) {
          PointIndex wb = std::countr_zero(tb);
          tb &= tb - 1;
          auto [u2, v2] = c2.unflat(c2.forward[static_cast<std::size_t>(wb)]);
          PointIndex wp = pb.flat(wa, wb);
          PointIndex uv = chart.flat(pu.flat(u1, u2), pv.flat(v1, v2));
          chart.forward[static_cast<std::size_t>(wp)] = uv;
          chart.inverse[static_cast<std::size_t>(uv)] = wp;
          chart.domain |= point_bit(wp);
        }
      }
      out.charts.push_back(std::move(chart));
    }
  return out;
}

/// First-failure report for a 2-map check.
struct TwoMapReport {
  enum class Kind { none, not_continuous, not_contained, not_split };

  bool ok = true;
  bool strict_ok = true;
  Kind kind = Kind::none;
  PointIndex point = -1;
  int src_chart = -1, dst_chart = -1;
  PointIndex strict_point = -1;
  int strict_src_chart = -1, strict_dst_chart = -1;
  std::string message;
};

/// h must be continuous on the bases, and for every point c, every source
/// chart containing c and every target chart containing h(c), the minimal
/// box around the source chart image of c must land (through h) inside the
/// target chart's domain with a coordinatewise-split expression.
inline TwoMapReport check_two_map(const TwoSpace& src, const TwoSpace& dst,
                                  std::span<const PointIndex> h) {
  if (static_cast<int>(h.size()) != src.base.size())
    throw std::invalid_argument("2-map must be total on the source base");
  for (PointIndex v : h)
    if (v < 0 || v >= dst.base.size()) throw std::out_of_range("2-map value out of target range");

  TwoMapReport report;
  for (int x = 0; x < src.base.size(); ++x)
    for (int y = 0; y < src.base.size(); ++y)
      if (src.base.leq(x, y) &&
          !dst.base.leq(h[static_cast<std::size_t>(x)], h[static_cast<std::size_t>(y)])) {
        report.ok = report.strict_ok = false;
        report.kind = TwoMapReport::Kind::not_continuous;
        report.point = x;
        report.message = "map is not continuous: leq(" + std::to_string(x) + "," +
                         std::to_string(y) + ") is not preserved";
        return report;
      }

  for (int c = 0; c < src.base.size(); ++c)
    for (std::size_t i = 0; i < src.charts.size(); ++i) {
      if (!mask_contains(src.charts[i].domain, c)) continue;
      for (std::size_t j = 0; j < dst.charts.size(); ++j) {
        if (!mask_contains(dst.charts[j].domain, h[static_cast<std::size_t>(c)])) continue;
        const Chart& phi2 = dst.charts[j];
        SplitCheck r = detail::split_on_minimal_box(
            src.charts[i], c, phi2.u_space, phi2.v_space,
            [&](PointIndex w) { return mask_contains(phi2.domain, h[static_cast<std::size_t>(w)]); },
            [&](PointIndex w) { return phi2.forward[static_cast<std::size_t>(h[static_cast<std::size_t>(w)])]; });
        if (!r.ok()) {
          report.ok = report.strict_ok = false;
          report.kind = r.contained ? TwoMapReport::Kind::not_split : TwoMapReport::Kind::not_contained;
          report.point = c;
          report.src_chart = static_cast<int>(i);
          report.dst_chart = static_cast<int>(j);
          report.message = "2-map condition fails at point " + std::to_string(c) + " (charts " +
                           std::to_string(i) + " -> " + std::to_string(j) +
                           (r.contained ? "): expression does not split"
                                        : "): box preimage leaves the target chart");
          return report;
        }
        if (!r.strict_ok() && report.strict_ok) {
          report.strict_ok = false;
          report.strict_point = c;
          report.strict_src_chart = static_cast<int>(i);
          report.strict_dst_chart = static_cast<int>(j);
          report.message = "strict: split maps discontinuous at point " + std::to_string(c);
        }
      }
    }
  return report;
}

}  // namespace fintop
