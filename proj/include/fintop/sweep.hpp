#pragma once

#include <atomic>
#include <chrono>
#include <random>
#include <thread>

#include "fintop/enumerate.hpp"
#include "fintop/product.hpp"

namespace fintop {

// Hypothesis bits. `require` masks in SweepConfig are unions of these.
inline constexpr unsigned kClosed = 1u;
inline constexpr unsigned kPathConnected = 2u;
inline constexpr unsigned kLocallyProduct = 4u;
inline constexpr unsigned kAllHypotheses = kClosed | kPathConnected | kLocallyProduct;

inline const char* hypothesis_name(unsigned bit) {
  switch (bit) {
    case kClosed: return "closed";
    case kPathConnected: return "path-connected";
    case kLocallyProduct: return "locally-product";
  }
  return "?";
}

enum class SweepMode { verify, search };

struct SweepConfig {
  int nx = 2;
  int ny = 2;
  unsigned require = kAllHypotheses;  // hypotheses an instance must satisfy
  SweepMode mode = SweepMode::verify;
  int workers = 1;
  std::uint64_t seed = 1;          // used only when sampling()
  std::uint64_t samples = 100000;  // instances drawn when sampling()
  int max_findings = 16;
  int max_fence_len = 4;
  bool empty_is_path_connected = true;

  // Point counts of 4 exceed desk scale for exhaustion (355^2 pairs x 2^16
  // subsets); those runs draw seeded samples instead.
  bool sampling() const { return nx == 4 || ny == 4; }

  void validate() const {
    if (nx < 1 || nx > 4 || ny < 1 || ny > 4)
      throw std::invalid_argument("sweep sizes must be between 1 and 4");
    if (workers < 1) throw std::invalid_argument("worker count must be at least 1");
    if (max_findings < 0) throw std::invalid_argument("max findings must be non-negative");
    if (max_fence_len < 1) throw std::invalid_argument("max fence length must be at least 1");
    if ((require & ~kAllHypotheses) != 0)
      throw std::invalid_argument("unknown hypothesis bit in require mask");
    if (sampling() && samples < 1)
      throw std::invalid_argument("sampled sweeps need at least one sample");
  }
};

/// One recorded instance: the space pair (by enumeration index and by
/// up-set encoding, so reports are self-contained), the subset, which
/// hypotheses held, and whether the conclusion held. Fence sweeps add the
/// offending fence and the mixed pair that escaped C.
struct Finding {
  int x_index = -1;
  int y_index = -1;
  std::vector<PointMask> x_up;
  std::vector<PointMask> y_up;
  PointMask c = 0;
  unsigned flags = 0;
  bool exact = false;
  std::vector<PointIndex> fence;
  PointIndex missing_a = -1;
  PointIndex missing_b = -1;

  bool operator==(const Finding&) const = default;
};

struct SweepReport {
  SweepConfig config;
  std::uint64_t pairs_examined = 0;
  std::uint64_t subsets_examined = 0;
  std::uint64_t hypothesis_satisfying = 0;
  std::uint64_t conclusion_holding = 0;
  std::uint64_t fences_checked = 0;
  std::uint64_t violations = 0;       // required hypotheses held, conclusion failed
  std::uint64_t counterexamples = 0;  // search mode: same predicate, reported not asserted
  std::vector<Finding> findings;      // first max_findings, canonical order
  bool exhaustive = true;
  double seconds = 0.0;  // wall clock; not part of structured output

  bool ok() const { return violations == 0; }
};

inline unsigned hypothesis_flags(const ProductSpace& ps, PointMask c, bool empty_is_path_connected) {
  unsigned flags = 0;
  if (ps.space().is_closed(c)) flags |= kClosed;
  if (c == 0 ? empty_is_path_connected : ps.space().is_path_connected(c))
    flags |= kPathConnected;
  if (is_locally_product(ps, c)) flags |= kLocallyProduct;
  return flags;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform value in [0, bound) by rejection, so results do not depend on a
// standard library's uniform_int_distribution implementation.
inline std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v < threshold);
  return v % bound;
}

struct BlockResult {
  std::uint64_t subsets = 0;
  std::uint64_t hits = 0;
  std::uint64_t holds = 0;
  std::uint64_t fences = 0;
  std::uint64_t violations = 0;
  std::uint64_t counterexamples = 0;
  std::vector<Finding> findings;
  std::vector<std::uint64_t> pair_bits;  // sampled runs: which pairs were drawn
};

// Fixed block list, atomic cursor, per-block results merged afterwards in
// block order: byte-identical reports at any worker count.
template <typename Fn>
std::vector<BlockResult> run_blocks(std::uint64_t total, int workers, Fn&& fn) {
  std::vector<BlockResult> results(total);
  if (workers <= 1 || total <= 1) {
    for (std::uint64_t b = 0; b < total; ++b) results[b] = fn(b);
    return results;
  }
  std::atomic<std::uint64_t> cursor{0};
  auto drain = [&] {
    for (;;) {
      std::uint64_t b = cursor.fetch_add(1, std::memory_order_relaxed);
      if (b >= total) return;
      results[b] = fn(b);
    }
  };
  std::vector<std::thread> pool;
  int count = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), total));
  pool.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pool.emplace_back(drain);
  for (std::thread& t : pool) t.join();
  return results;
}

inline Finding make_finding(int xi, int yi, const FiniteSpace& x, const FiniteSpace& y,
                            PointMask c, unsigned flags, bool exact) {
  Finding f;
  f.x_index = xi;
  f.y_index = yi;
  for (int p = 0; p < x.size(); ++p) f.x_up.push_back(x.minimal_open(p));
  for (int p = 0; p < y.size(); ++p) f.y_up.push_back(y.minimal_open(p));
  f.c = c;
  f.flags = flags;
  f.exact = exact;
  return f;
}

// Examines one (pair, subset) instance and updates the block tallies.
inline void examine(const SweepConfig& cfg, const ProductSpace& ps, int xi, int yi, PointMask c,
                    BlockResult& out) {
  ++out.subsets;
  unsigned flags = hypothesis_flags(ps, c, cfg.empty_is_path_connected);
  if ((flags & cfg.require) != cfg.require) return;
  ++out.hits;
  if (decompose(ps, c).exact) {
    ++out.holds;
    return;
  }
  if (cfg.mode == SweepMode::verify) {
    ++out.violations;
  } else {
    ++out.counterexamples;
    if ((flags & kAllHypotheses) == kAllHypotheses) ++out.violations;
  }
  if (static_cast<int>(out.findings.size()) < cfg.max_findings)
    out.findings.push_back(make_finding(xi, yi, ps.x(), ps.y(), c, flags, false));
}

inline SweepReport merge_blocks(const SweepConfig& cfg, std::vector<BlockResult>&& blocks,
                                std::uint64_t pair_count) {
  SweepReport report;
  report.config = cfg;
  report.exhaustive = !cfg.sampling();
  std::vector<std::uint64_t> pair_bits;
  for (BlockResult& b : blocks) {
    report.subsets_examined += b.subsets;
    report.hypothesis_satisfying += b.hits;
    report.conclusion_holding += b.holds;
    report.fences_checked += b.fences;
    report.violations += b.violations;
    report.counterexamples += b.counterexamples;
    for (Finding& f : b.findings)
      if (static_cast<int>(report.findings.size()) < cfg.max_findings)
        report.findings.push_back(std::move(f));
    if (!b.pair_bits.empty()) {
      pair_bits.resize(std::max(pair_bits.size(), b.pair_bits.size()), 0);
      for (std::size_t i = 0; i < b.pair_bits.size(); ++i) pair_bits[i] |= b.pair_bits[i];
    }
  }
  if (report.exhaustive) {
    report.pairs_examined = pair_count;
    // no-overlap, no-gap check on the block partition
    std::uint64_t expected = pair_count << static_cast<unsigned>(cfg.nx * cfg.ny);
    if (report.subsets_examined != expected)
      throw std::logic_error("sweep blocks did not cover the space exactly once");
  } else {
    for (std::uint64_t word : pair_bits)
      report.pairs_examined += static_cast<std::uint64_t>(std::popcount(word));
  }
  return report;
}

}  // namespace detail

/// Sweeps every subset of every product of enumerated spaces (or seeded
/// samples when a side has 4 points). Verify mode counts conclusion
/// failures among instances satisfying the required hypotheses as
/// violations; search mode reports them as counterexamples and reserves
/// "violation" for instances where all three hypotheses held.
inline SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  auto started = std::chrono::steady_clock::now();
  std::vector<FiniteSpace> xs = enumerate_preorders(cfg.nx);
  std::vector<FiniteSpace> ys = enumerate_preorders(cfg.ny);
  const std::uint64_t pair_count = xs.size() * ys.size();
  const int bits = cfg.nx * cfg.ny;
  const std::uint64_t total_k = std::uint64_t{1} << static_cast<unsigned>(bits);

  std::vector<detail::BlockResult> blocks;
  if (!cfg.sampling()) {
    const std::uint64_t chunks = std::min<std::uint64_t>(total_k, 16);
    const std::uint64_t chunk_size = total_k / chunks;
    blocks = detail::run_blocks(pair_count * chunks, cfg.workers, [&](std::uint64_t block) {
      detail::BlockResult out;
      const std::uint64_t pair = block / chunks;
      const std::uint64_t chunk = block % chunks;
      const int xi = static_cast<int>(pair / ys.size());
      const int yi = static_cast<int>(pair % ys.size());
      ProductSpace ps(xs[static_cast<std::size_t>(xi)], ys[static_cast<std::size_t>(yi)]);
      for (std::uint64_t k = chunk * chunk_size; k < (chunk + 1) * chunk_size; ++k)
        detail::examine(cfg, ps, xi, yi, canonical_subset(bits, k), out);
      return out;
    });
  } else {
    const std::uint64_t per_block = 1024;
    const std::uint64_t block_count = (cfg.samples + per_block - 1) / per_block;
    const std::size_t words = static_cast<std::size_t>((pair_count + 63) / 64);
    blocks = detail::run_blocks(block_count, cfg.workers, [&](std::uint64_t block) {
      detail::BlockResult out;
      out.pair_bits.assign(words, 0);
      std::mt19937_64 rng(detail::splitmix64(detail::splitmix64(cfg.seed) ^ (block + 1)));
      const std::uint64_t hi = std::min(cfg.samples, (block + 1) * per_block);
      for (std::uint64_t s = block * per_block; s < hi; ++s) {
        const int xi = static_cast<int>(detail::next_below(rng, xs.size()));
        const int yi = static_cast<int>(detail::next_below(rng, ys.size()));
        const PointMask c = canonical_subset(bits, detail::next_below(rng, total_k));
        ProductSpace ps(xs[static_cast<std::size_t>(xi)], ys[static_cast<std::size_t>(yi)]);
        const std::uint64_t pair = static_cast<std::uint64_t>(xi) * ys.size() + yi;
        out.pair_bits[static_cast<std::size_t>(pair / 64)] |= std::uint64_t{1} << (pair % 64);
        detail::examine(cfg, ps, xi, yi, c, out);
      }
      return out;
    });
  }
  SweepReport report = detail::merge_blocks(cfg, std::move(blocks), pair_count);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

/// Enumerates, for every hypothesis-satisfying instance, all fences in C
/// (consecutive points distinct and comparable) up to the configured length
/// and checks that each fence's mixed coordinate pairs all lie in C.
inline SweepReport fence_sweep(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.nx > 3 || cfg.ny > 3)
    throw std::invalid_argument("fence sweeps are exhaustive and stop at 3 points per side");
  auto started = std::chrono::steady_clock::now();
  std::vector<FiniteSpace> xs = enumerate_preorders(cfg.nx);
  std::vector<FiniteSpace> ys = enumerate_preorders(cfg.ny);
  const std::uint64_t pair_count = xs.size() * ys.size();
  const int bits = cfg.nx * cfg.ny;
  const std::uint64_t total_k = std::uint64_t{1} << static_cast<unsigned>(bits);
  const std::uint64_t chunks = std::min<std::uint64_t>(total_k, 16);
  const std::uint64_t chunk_size = total_k / chunks;

  auto check_instance = [&cfg](const ProductSpace& ps, int xi, int yi, PointMask c,
                               detail::BlockResult& out) {
    ++out.subsets;
    unsigned flags = hypothesis_flags(ps, c, cfg.empty_is_path_connected);
    if ((flags & cfg.require) != cfg.require) return;
    ++out.hits;
    std::vector<PointIndex> pts = mask_points(c);
    std::vector<PointIndex> path;
    // grid check for the current fence; returns false and records the first
    // missing mixed pair on violation
    auto saturated = [&](Finding* f) {
      for (PointIndex p : path)
        for (PointIndex q : path) {
          PointIndex a = ps.unflat(p).first;
          PointIndex b = ps.unflat(q).second;
          if (!mask_contains(c, ps.flat(a, b))) {
            if (f) {
              f->missing_a = a;
              f->missing_b = b;
            }
            return false;
          }
        }
      return true;
    };
    auto extend = [&](auto&& self, PointIndex last) -> void {
      ++out.fences;
      if (!saturated(nullptr)) {
        ++out.violations;
        if (static_cast<int>(out.findings.size()) < cfg.max_findings) {
          Finding f = detail::make_finding(xi, yi, ps.x(), ps.y(), c, flags, false);
          f.fence = path;
          saturated(&f);
          out.findings.push_back(std::move(f));
        }
      }
      if (static_cast<int>(path.size()) >= cfg.max_fence_len) return;
      for (PointIndex next : pts) {
        if (next == last || !ps.space().comparable(last, next)) continue;
        path.push_back(next);
        self(self, next);
        path.pop_back();
      }
    };
    for (PointIndex start : pts) {
      path.assign(1, start);
      extend(extend, start);
    }
  };

  std::vector<detail::BlockResult> blocks =
      detail::run_blocks(pair_count * chunks, cfg.workers, [&](std::uint64_t block) {
        detail::BlockResult out;
        const std::uint64_t pair = block / chunks;
        const std::uint64_t chunk = block % chunks;
        const int xi = static_cast<int>(pair / ys.size());
        const int yi = static_cast<int>(pair % ys.size());
        ProductSpace ps(xs[static_cast<std::size_t>(xi)], ys[static_cast<std::size_t>(yi)]);
        for (std::uint64_t k = chunk * chunk_size; k < (chunk + 1) * chunk_size; ++k)
          check_instance(ps, xi, yi, canonical_subset(bits, k), out);
        return out;
      });
  SweepReport report = detail::merge_blocks(cfg, std::move(blocks), pair_count);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace fintop
