#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cantor/certify.hpp"
#include "cantor/expr.hpp"
#include "cantor/interval.hpp"
#include "cantor/triadic.hpp"

namespace cantor {

// Outer cover of f((C×C) ∩ region) from all rank-n basic squares.
struct CoverReport {
  unsigned depth = 0;
  IntervalUnion cover;
  double measure = 0.0;
  std::size_t squares_visited = 0;
};

struct OracleOptions {
  std::size_t square_budget = 50'000'000;
  unsigned workers = 1;
};

inline const Box kUnitSquare{Interval(0.0, 1.0), Interval(0.0, 1.0)};

CoverReport depth_cover(const Expr& e, unsigned n, const Box& region = kUnitSquare,
                        const OracleOptions& opts = {});
std::vector<CoverReport> cover_series(const Expr& e, unsigned n_max, const Box& region = kUnitSquare,
                                      const OracleOptions& opts = {});
std::vector<std::pair<unsigned, double>> cover_measure_series(const Expr& e, unsigned n_max,
                                                              const Box& region = kUnitSquare,
                                                              const OracleOptions& opts = {});

// Values of e at all endpoint pairs of the rank-m basic intervals nested in
// the square's sides, sorted and deduplicated. Every value belongs to
// f(C×C) up to evaluation rounding.
std::vector<double> inner_samples(const Expr& e, const BasicSquare& sq, unsigned m);

// Every multiple of `grid` inside cert.image lies within L·3^-m of an inner
// sample, L = sup|fx| + sup|fy| over the square.
bool hit_test(const Certificate& cert, const Expr& e, unsigned m, double grid);

// Outer monotone images [f(min corner), f(max corner)] of all descendants of
// the certified square `level` ranks down, in depth-first order. Throws
// ConditionLost if a descendant breaks the certificate's conditions.
std::vector<Interval> refinement_images(const Certificate& cert, const GradTriple& g, unsigned level);

// Refines the certified square `depth` times and checks that the union of
// the descendants' images stays a single interval equal to the previous
// level's within 8 ulps per endpoint.
bool verify_recursion(const Certificate& cert, const GradTriple& g, unsigned depth);
bool verify_recursion(const Certificate& cert, const Expr& e, unsigned depth);

inline constexpr int kRecursionDriftUlps = 8;

}  // namespace cantor
