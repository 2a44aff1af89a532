#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cantor {

// Closed interval [lo, hi] of doubles. Arithmetic is outward rounded: every
// real result of an operation applied to points of its inputs lies inside the
// returned interval.
class Interval {
 public:
  Interval() : lo_(0.0), hi_(0.0) {}
  Interval(double lo, double hi);
  static Interval point(double v) { return Interval(v, v); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  double mid() const;

  bool contains(double v) const { return lo_ <= v && v <= hi_; }
  bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool is_point() const { return lo_ == hi_; }

  // Smallest and largest absolute value over the interval.
  double mig() const;
  double mag() const;

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_;
  double hi_;
};

std::ostream& operator<<(std::ostream& os, const Interval& v);

// Two-dimensional box x × y.
struct Box {
  Interval x;
  Interval y;

  friend bool operator==(const Box&, const Box&) = default;
};

namespace rounding {

double next_up(double v);
double next_down(double v);

// Directed-rounded elementary operations on doubles. The results are the
// tightest representable bounds whenever the operation does not underflow.
double add_down(double a, double b);
double add_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);
double sqrt_down(double a);
double sqrt_up(double a);

}  // namespace rounding

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);

Interval hull(const Interval& a, const Interval& b);
// Widen each endpoint by `ulps` steps of the floating-point grid.
Interval widen_ulps(const Interval& v, int ulps);

// Integer power; negative bases handled by parity, negative exponents need
// 0 outside the base.
Interval pow_int(const Interval& base, long exponent);
// General power exp(exponent * ln(base)); base must be strictly positive.
Interval pow(const Interval& base, const Interval& exponent);
Interval sin(const Interval& v);
Interval cos(const Interval& v);
Interval exp(const Interval& v);
Interval ln(const Interval& v);
Interval sqrt(const Interval& v);

enum class ArithOp { Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Ln, Sqrt };

// Uniform entry point over the operations above. Unary ops read args[0];
// binary ops read args[0], args[1]. For Pow, `exponent` is used when args has
// a single element.
Interval arith(ArithOp op, std::span<const Interval> args, double exponent = 0.0);

// Sorted union of pairwise-disjoint closed intervals. Adjacent parts are
// separated by a strictly positive gap; touching intervals merge.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  static IntervalUnion from_intervals(std::vector<Interval> parts);

  void insert(const Interval& v);
  void merge(const IntervalUnion& other);

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }
  double measure() const;
  // Every part widened by `ulps` grid steps and re-canonicalized.
  IntervalUnion widened(int ulps) const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<Interval> parts_;
};

IntervalUnion union_insert(IntervalUnion u, const Interval& v);

// True iff [inner.lo + slack, inner.hi - slack] is empty or lies inside a
// single part of u. The shrink is rounded so that the tested interval is never
// smaller than the exact one.
bool subset_with_slack(const Interval& inner, const IntervalUnion& u, double slack);

// Round-trippable decimal form (17 significant digits).
std::string format_double(double v);

}  // namespace cantor
