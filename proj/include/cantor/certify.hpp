#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cantor/expr.hpp"
#include "cantor/interval.hpp"
#include "cantor/triadic.hpp"

namespace cantor {

enum class PointCase { XDominant, YDominant, Boundary, Fail };

std::string to_string(PointCase c);

// Pointwise derivative-ratio test at a single point.
struct PointReport {
  Rational x0;
  Rational y0;
  double fx = 0.0;
  double fy = 0.0;
  // |fx / fy|; infinite when fy vanishes.
  double ratio = 0.0;
  PointCase kind = PointCase::Fail;
  int sx = 0;
  int sy = 0;
};

// Ratio tolerance for the boundary case.
inline constexpr double kBoundaryTolerance = 1e-12;

PointReport point_condition(const GradTriple& g, const Rational& x0, const Rational& y0);

enum class Axis { X, Y };

// Constant signs of the partials on a square and which partial dominates.
// swap is set when the y partial dominates (the axes are exchanged).
struct Signature {
  int sx = 1;
  int sy = 1;
  Axis dominant = Axis::X;
  bool swap = false;

  friend bool operator==(const Signature&, const Signature&) = default;
};

// Lower bounds, with D the dominant and d the other partial:
//   m1 = inf|D| - sup|d|,  m2 = 3 inf|d| - sup|D|,  m3 = inf|D|,  m4 = inf|d|.
struct Margins {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

using Corner = std::pair<TriadicRational, TriadicRational>;

struct Certificate {
  BasicSquare square;
  Signature signature;
  Margins margins;
  Interval fx_enclosure;
  Interval fy_enclosure;
  // Corners realizing the minimum and maximum of f on the square.
  Corner min_corner;
  Corner max_corner;
  // Outward enclosures of f at those corners.
  Interval min_value;
  Interval max_value;
  // [min_value.hi, max_value.lo]; proven to lie inside f(C×C).
  Interval image;
};

enum class FailureReason { SignAmbiguous, DominanceFails, RatioFails, DomainError, DegenerateImage };

std::string to_string(FailureReason r);

struct Failure {
  FailureReason reason;
  std::string detail;
};

using CertifyResult = std::variant<Certificate, Failure>;

// Uniform sufficient condition: on the whole square neither partial vanishes,
// inf|D| >= sup|d| and 3 inf|d| >= sup|D|. Then f restricted to the Cantor
// points of the square has the same image as f on the full square.
CertifyResult certify_square(const GradTriple& g, const BasicSquare& sq);

struct SearchOptions {
  Box region{Interval(0.0, 1.0), Interval(0.0, 1.0)};
  unsigned max_rank = 12;
  std::size_t budget = 100000;
  unsigned workers = 1;
};

struct SearchStats {
  std::size_t nodes_expanded = 0;
  unsigned deepest_rank = 0;
  std::size_t pruned = 0;
};

struct NoCertificate {
  SearchStats stats;
};

struct SearchOutcome {
  std::variant<Certificate, NoCertificate> result;
  SearchStats stats;

  bool found() const { return std::holds_alternative<Certificate>(result); }
  const Certificate& certificate() const { return std::get<Certificate>(result); }
};

// Squares certified per frontier round; fixed so the result does not depend
// on the worker count.
inline constexpr std::size_t kSearchBatch = 8;

// Best-first search over basic squares inside the region.
SearchOutcome search(const GradTriple& g, const SearchOptions& opts);

// Like search but keeps going after a success; certified squares are never
// refined, so returned squares are pairwise non-nested.
std::vector<Certificate> multi_search(const GradTriple& g, const SearchOptions& opts, std::size_t max_certs,
                                      SearchStats* stats = nullptr);

// Enclosure-based proof that no sub-square of sq can certify: one partial
// exceeds three times the other everywhere on the square.
bool ratio_impossible(const Interval& fx, const Interval& fy);

}  // namespace cantor
