#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "fintop/sweep.hpp"

using namespace fintop;

namespace {

// plain nested-loop recount of the n=2 verify sweep
struct Recount {
  std::uint64_t pairs = 0, subsets = 0, satisfying = 0, holding = 0;
};

Recount recount_2x2(unsigned require, bool empty_pc) {
  Recount r;
  std::vector<FiniteSpace> xs = enumerate_preorders(2);
  for (const FiniteSpace& x : xs)
    for (const FiniteSpace& y : xs) {
      ++r.pairs;
      ProductSpace ps(x, y);
      for (PointMask c = 0; c <= full_mask(4); ++c) {
        ++r.subsets;
        unsigned flags = hypothesis_flags(ps, c, empty_pc);
        if ((flags & require) != require) continue;
        ++r.satisfying;
        if (decompose(ps, c).exact) ++r.holding;
      }
    }
  return r;
}

}  // namespace

TEST_CASE("verify sweep counts match a direct recount at n=2") {
  SweepConfig cfg;
  cfg.nx = cfg.ny = 2;
  SweepReport r = run_sweep(cfg);
  Recount ref = recount_2x2(kAllHypotheses, true);
  CHECK(r.pairs_examined == ref.pairs);
  CHECK(r.subsets_examined == ref.subsets);
  CHECK(r.hypothesis_satisfying == ref.satisfying);
  CHECK(r.conclusion_holding == ref.holding);
  CHECK(r.violations == 0);
  CHECK(r.counterexamples == 0);
  CHECK(r.exhaustive);
  CHECK(r.findings.empty());
  CHECK(r.ok());
}

TEST_CASE("treating the empty set as disconnected only removes empty-set hits") {
  SweepConfig cfg;
  cfg.nx = cfg.ny = 2;
  cfg.empty_is_path_connected = false;
  SweepReport strict = run_sweep(cfg);
  Recount ref = recount_2x2(kAllHypotheses, false);
  CHECK(strict.hypothesis_satisfying == ref.satisfying);
  CHECK(strict.violations == 0);

  cfg.empty_is_path_connected = true;
  SweepReport lax = run_sweep(cfg);
  // the empty set is closed, locally product, and exact in every pair
  CHECK(lax.hypothesis_satisfying == strict.hypothesis_satisfying + lax.pairs_examined);
  CHECK(lax.conclusion_holding == strict.conclusion_holding + lax.pairs_examined);
}

TEST_CASE("worker count does not change the report") {
  SweepConfig cfg;
  cfg.nx = 2;
  cfg.ny = 3;
  cfg.mode = SweepMode::search;
  cfg.require = kClosed;  // plenty of counterexamples, so findings matter
  cfg.max_findings = 64;
  SweepReport one = run_sweep(cfg);
  cfg.workers = 3;
  SweepReport three = run_sweep(cfg);
  cfg.workers = 8;
  SweepReport eight = run_sweep(cfg);

  CHECK(one.pairs_examined == three.pairs_examined);
  CHECK(one.subsets_examined == three.subsets_examined);
  CHECK(one.hypothesis_satisfying == three.hypothesis_satisfying);
  CHECK(one.conclusion_holding == three.conclusion_holding);
  CHECK(one.counterexamples == three.counterexamples);
  CHECK(one.violations == three.violations);
  CHECK(one.findings == three.findings);
  CHECK(three.findings == eight.findings);
  CHECK(one.counterexamples > 0);
  CHECK(one.violations == 0);
}

TEST_CASE("search without path-connectedness finds the discrete diagonal") {
  SweepConfig cfg;
  cfg.nx = cfg.ny = 2;
  cfg.mode = SweepMode::search;
  cfg.require = kClosed | kLocallyProduct;
  cfg.max_findings = 4096;
  SweepReport r = run_sweep(cfg);
  CHECK(r.counterexamples > 0);
  CHECK(r.violations == 0);  // not a refutation: a hypothesis was dropped
  CHECK(r.ok());

  const std::vector<PointMask> discrete_up = {0b01, 0b10};
  bool diagonal = false;
  for (const Finding& f : r.findings)
    diagonal = diagonal || (f.x_up == discrete_up && f.y_up == discrete_up &&
                            f.c == (point_bit(0) | point_bit(3)) && !f.exact);
  CHECK(diagonal);
}

TEST_CASE("findings are a prefix: capping keeps the earliest ones") {
  SweepConfig cfg;
  cfg.nx = cfg.ny = 2;
  cfg.mode = SweepMode::search;
  cfg.require = kClosed | kLocallyProduct;
  cfg.max_findings = 4096;
  SweepReport all = run_sweep(cfg);
  cfg.max_findings = 3;
  SweepReport capped = run_sweep(cfg);
  REQUIRE(all.findings.size() >= 3);
  REQUIRE(capped.findings.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(capped.findings[i] == all.findings[i]);
  CHECK(capped.counterexamples == all.counterexamples);  // counts are not capped

  cfg.max_findings = 0;
  CHECK(run_sweep(cfg).findings.empty());
}

TEST_CASE("sampled sweeps are deterministic per seed") {
  SweepConfig cfg;
  cfg.nx = 4;
  cfg.ny = 2;
  cfg.samples = 20000;
  cfg.seed = 7;
  REQUIRE(cfg.sampling());
  SweepReport a = run_sweep(cfg);
  cfg.workers = 4;
  SweepReport b = run_sweep(cfg);
  CHECK_FALSE(a.exhaustive);
  CHECK(a.subsets_examined == 20000);
  CHECK(a.pairs_examined == b.pairs_examined);
  CHECK(a.subsets_examined == b.subsets_examined);
  CHECK(a.hypothesis_satisfying == b.hypothesis_satisfying);
  CHECK(a.conclusion_holding == b.conclusion_holding);
  CHECK(a.findings == b.findings);
  CHECK(a.violations == 0);

  cfg.workers = 1;
  cfg.mode = SweepMode::search;
  cfg.require = kClosed;  // counterexamples abound, so findings fill up
  SweepReport seed7 = run_sweep(cfg);
  cfg.seed = 8;
  SweepReport seed8 = run_sweep(cfg);
  CHECK(seed8.subsets_examined == seed7.subsets_examined);
  REQUIRE_FALSE(seed7.findings.empty());
  REQUIRE_FALSE(seed8.findings.empty());
  CHECK(seed7.findings != seed8.findings);  // different seed, different instances
}

TEST_CASE("exhaustive sweeps ignore seed and samples") {
  SweepConfig cfg;
  cfg.nx = cfg.ny = 2;
  SweepReport a = run_sweep(cfg);
  cfg.seed = 999;
  cfg.samples = 5;
  SweepReport b = run_sweep(cfg);
  CHECK(a.subsets_examined == b.subsets_examined);
  CHECK(a.hypothesis_satisfying == b.hypothesis_satisfying);
  CHECK(b.exhaustive);
}

TEST_CASE("config validation") {
  SweepConfig cfg;
  cfg.nx = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.nx = 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.nx = 2;
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.workers = 1;
  cfg.max_findings = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.max_findings = 16;
  cfg.require = 8;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.require = kAllHypotheses;
  cfg.nx = 4;
  cfg.samples = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.samples = 1;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("fence sweep saturates every small fence") {
  SweepConfig cfg;
  cfg.nx = cfg.ny = 2;
  SweepReport r = fence_sweep(cfg);
  CHECK(r.violations == 0);
  CHECK(r.fences_checked > 0);
  CHECK(r.exhaustive);
  CHECK(r.findings.empty());

  cfg.workers = 4;
  SweepReport parallel = fence_sweep(cfg);
  CHECK(parallel.fences_checked == r.fences_checked);
  CHECK(parallel.hypothesis_satisfying == r.hypothesis_satisfying);
}

TEST_CASE("fence sweep scales are capped at three points per side") {
  SweepConfig cfg;
  cfg.nx = 4;
  cfg.ny = 2;
  CHECK_THROWS_AS(fence_sweep(cfg), std::invalid_argument);
}

TEST_CASE("longer fences only add checks") {
  SweepConfig short_cfg;
  short_cfg.nx = short_cfg.ny = 2;
  short_cfg.max_fence_len = 1;
  SweepConfig long_cfg = short_cfg;
  long_cfg.max_fence_len = 4;
  SweepReport s = fence_sweep(short_cfg);
  SweepReport l = fence_sweep(long_cfg);
  CHECK(s.fences_checked < l.fences_checked);
  CHECK(s.violations == 0);
  CHECK(l.violations == 0);
  // length-1 fences: one per member point of each qualifying subset
  CHECK(s.fences_checked > 0);
}
