#include "cantor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

#include "cantor/errors.hpp"

namespace cantor {

namespace {

// Pending enclosures are compacted into the running union past this size.
constexpr std::size_t kCompactThreshold = std::size_t(1) << 20;

std::vector<Interval> enclosures(const std::vector<BasicInterval>& ivs) {
  std::vector<Interval> out;
  out.reserve(ivs.size());
  for (const auto& iv : ivs) out.push_back(iv.enclosure());
  return out;
}

IntervalUnion cover_rows(const Expr& e, const std::vector<Interval>& xs, const std::vector<Interval>& ys,
                         std::size_t row_begin, std::size_t row_end) {
  IntervalUnion acc;
  std::vector<Interval> pending;
  pending.reserve(std::min(kCompactThreshold, (row_end - row_begin) * ys.size()));
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (const Interval& y : ys) {
      pending.push_back(eval_interval(e, Box{xs[i], y}));
      if (pending.size() >= kCompactThreshold) {
        acc.merge(IntervalUnion::from_intervals(std::move(pending)));
        pending.clear();
      }
    }
  }
  acc.merge(IntervalUnion::from_intervals(std::move(pending)));
  return acc;
}

}  // namespace

CoverReport depth_cover(const Expr& e, unsigned n, const Box& region, const OracleOptions& opts) {
  check_rank(n);
  const auto xs = enclosures(intervals_of_rank(n, region.x));
  const auto ys = enclosures(intervals_of_rank(n, region.y));
  const std::size_t count = xs.size() * ys.size();
  if (count > opts.square_budget)
    throw BudgetExceeded("depth " + std::to_string(n) + " needs " + std::to_string(count) +
                         " squares, over the budget of " + std::to_string(opts.square_budget));

  CoverReport rep;
  rep.depth = n;
  rep.squares_visited = count;
  const std::size_t nthreads = std::clamp<std::size_t>(opts.workers, 1, std::max<std::size_t>(1, xs.size()));
  if (nthreads == 1) {
    rep.cover = cover_rows(e, xs, ys, 0, xs.size());
  } else {
    // Contiguous row blocks; the union is order independent, so the merged
    // result matches the sequential one exactly.
    std::vector<IntervalUnion> partial(nthreads);
    std::vector<std::exception_ptr> errors(nthreads);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        const std::size_t b = xs.size() * t / nthreads;
        const std::size_t end = xs.size() * (t + 1) / nthreads;
        try {
          partial[t] = cover_rows(e, xs, ys, b, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
    for (const auto& p : partial) rep.cover.merge(p);
  }
  rep.measure = rep.cover.measure();
  return rep;
}

std::vector<CoverReport> cover_series(const Expr& e, unsigned n_max, const Box& region,
                                      const OracleOptions& opts) {
  check_rank(n_max);
  std::vector<CoverReport> out;
  for (unsigned n = 0; n <= n_max; ++n) out.push_back(depth_cover(e, n, region, opts));
  return out;
}

std::vector<std::pair<unsigned, double>> cover_measure_series(const Expr& e, unsigned n_max,
                                                              const Box& region, const OracleOptions& opts) {
  std::vector<std::pair<unsigned, double>> out;
  for (const auto& rep : cover_series(e, n_max, region, opts)) out.emplace_back(rep.depth, rep.measure);
  return out;
}

std::vector<double> inner_samples(const Expr& e, const BasicSquare& sq, unsigned m) {
  if (m < sq.rank())
    throw Error("inner_samples: depth " + std::to_string(m) + " is below the square's rank " +
                std::to_string(sq.rank()));
  check_rank(m);
  const std::size_t per_axis = std::size_t(2) << (m - sq.rank());
  if (per_axis * per_axis > 50'000'000)
    throw BudgetExceeded("inner_samples: too many lattice points at depth " + std::to_string(m));

  auto endpoints = [m](const BasicInterval& side) {
    std::vector<double> pts;
    for (const auto& iv : intervals_of_rank(m, Interval(0.0, 1.0), side.word())) {
      pts.push_back(iv.left().to_double());
      pts.push_back(iv.right().to_double());
    }
    return pts;
  };
  const auto xs = endpoints(sq.x());
  const auto ys = endpoints(sq.y());
  std::vector<double> values;
  values.reserve(xs.size() * ys.size());
  for (double x : xs)
    for (double y : ys) values.push_back(eval_point(e, x, y));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

bool hit_test(const Certificate& cert, const Expr& e, unsigned m, double grid) {
  if (!(grid > 0.0)) throw Error("hit_test: grid must be positive");
  const auto samples = inner_samples(e, cert.square, m);
  if (samples.empty()) return false;
  const double lipschitz = rounding::add_up(cert.fx_enclosure.mag(), cert.fy_enclosure.mag());
  const double tol = lipschitz * std::pow(3.0, -static_cast<double>(m));

  const double k_first = std::ceil(cert.image.lo() / grid);
  const double k_last = std::floor(cert.image.hi() / grid);
  for (double k = k_first; k <= k_last; k += 1.0) {
    const double v = k * grid;
    if (!cert.image.contains(v)) continue;
    auto it = std::lower_bound(samples.begin(), samples.end(), v);
    double best = std::numeric_limits<double>::infinity();
    if (it != samples.end()) best = *it - v;
    if (it != samples.begin()) best = std::min(best, v - *std::prev(it));
    if (best > tol) return false;
  }
  return true;
}

namespace {

// Outer image of a descendant square after re-checking the certificate's
// sign and overlap conditions on it.
Interval descendant_image(const Certificate& cert, const GradTriple& g, const BasicSquare& sq) {
  const Signature& sig = cert.signature;
  try {
    const Box box = sq.enclosure();
    const Interval ex = eval_interval(g.fx, box);
    const Interval ey = eval_interval(g.fy, box);
    const bool signs_ok = (sig.sx > 0 ? ex.lo() > 0.0 : ex.hi() < 0.0) && (sig.sy > 0 ? ey.lo() > 0.0 : ey.hi() < 0.0);
    const Interval& dom = sig.swap ? ey : ex;
    const Interval& sub = sig.swap ? ex : ey;
    const bool overlap_ok = signs_ok && rounding::add_down(dom.mig(), -sub.mag()) >= 0.0 &&
                            rounding::add_down(rounding::mul_down(3.0, sub.mig()), -dom.mag()) >= 0.0;
    if (!overlap_ok)
      throw ConditionLost("descendant " + sq.x().word().str() + "x" + sq.y().word().str() +
                          " violates the certified conditions");

    const auto& ix = sq.x();
    const auto& iy = sq.y();
    const Box lo{(sig.sx > 0 ? ix.left() : ix.right()).enclosure(), (sig.sy > 0 ? iy.left() : iy.right()).enclosure()};
    const Box hi{(sig.sx > 0 ? ix.right() : ix.left()).enclosure(), (sig.sy > 0 ? iy.right() : iy.left()).enclosure()};
    return Interval(eval_interval(g.f, lo).lo(), eval_interval(g.f, hi).hi());
  } catch (const DomainError& e) {
    throw ConditionLost(std::string("descendant left the domain: ") + e.what());
  }
}

void refine(const Certificate& cert, const GradTriple& g, const BasicSquare& sq, unsigned level, unsigned depth,
            const std::function<void(unsigned, const Interval&)>& sink) {
  if (level == depth) return;
  for (const BasicSquare& child : sq.children()) {
    sink(level + 1, descendant_image(cert, g, child));
    refine(cert, g, child, level + 1, depth, sink);
  }
}

bool within_ulps(const Interval& a, const Interval& b, int ulps) {
  return widen_ulps(a, ulps).contains(b) && widen_ulps(b, ulps).contains(a);
}

}  // namespace

std::vector<Interval> refinement_images(const Certificate& cert, const GradTriple& g, unsigned level) {
  check_rank(cert.square.rank() + level);
  if (level == 0) return {Interval(cert.min_value.lo(), cert.max_value.hi())};
  std::vector<Interval> out;
  refine(cert, g, cert.square, 0, level, [&](unsigned k, const Interval& img) {
    if (k == level) out.push_back(img);
  });
  return out;
}

bool verify_recursion(const Certificate& cert, const GradTriple& g, unsigned depth) {
  check_rank(cert.square.rank() + depth);
  std::vector<IntervalUnion> unions(depth + 1);
  unions[0].insert(Interval(cert.min_value.lo(), cert.max_value.hi()));
  refine(cert, g, cert.square, 0, depth, [&](unsigned k, const Interval& img) { unions[k].insert(img); });
  if (!unions[0].parts().front().contains(cert.image)) return false;
  for (unsigned k = 1; k <= depth; ++k) {
    if (unions[k].size() != 1) return false;
    if (!within_ulps(unions[k].parts().front(), unions[k - 1].parts().front(), kRecursionDriftUlps)) return false;
  }
  return true;
}

bool verify_recursion(const Certificate& cert, const Expr& e, unsigned depth) {
  return verify_recursion(cert, differentiate(e), depth);
}

}  // namespace cantor
