#include "cantor/interval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "cantor/errors.hpp"

namespace cantor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this magnitude fma residuals may be inexact (subnormal products), so
// the error-free checks are skipped in favour of an unconditional nudge.
constexpr double kTiny = 0x1p-960;

double down_n(double v, int n) {
  for (int i = 0; i < n; ++i) v = rounding::next_down(v);
  return v;
}

double up_n(double v, int n) {
  for (int i = 0; i < n; ++i) v = rounding::next_up(v);
  return v;
}

Interval checked(double lo, double hi, const char* op) {
  if (std::isnan(lo) || std::isnan(hi))
    throw DomainError(std::string(op) + ": undefined result");
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw OverflowError(std::string(op) + ": non-finite endpoint");
  return Interval(lo, hi);
}

void require_finite(const Interval& v, const char* op) {
  if (!std::isfinite(v.lo()) || !std::isfinite(v.hi()))
    throw OverflowError(std::string(op) + ": non-finite argument");
}

// Endpoint enclosure of a library transcendental, which is not guaranteed to
// be correctly rounded.
constexpr int kTranscendentalUlps = 2;

}  // namespace

namespace rounding {

double next_up(double v) { return std::nextafter(v, kInf); }
double next_down(double v) { return std::nextafter(v, -kInf); }

double add_down(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  // TwoSum: err is the exact residual (a + b) - s.
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err < 0.0 ? next_down(s) : s;
}

double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err > 0.0 ? next_up(s) : s;
}

double mul_down(double a, double b) {
  const double p = a * b;
  if (!std::isfinite(p) || a == 0.0 || b == 0.0) return p;
  if (std::fabs(p) < kTiny) return next_down(p);
  return std::fma(a, b, -p) < 0.0 ? next_down(p) : p;
}

double mul_up(double a, double b) {
  const double p = a * b;
  if (!std::isfinite(p) || a == 0.0 || b == 0.0) return p;
  if (std::fabs(p) < kTiny) return next_up(p);
  return std::fma(a, b, -p) > 0.0 ? next_up(p) : p;
}

namespace {
// Sign of (a / b) - q, from the exact remainder a - q*b.
int div_residual_sign(double a, double b, double q) {
  const double r = std::fma(-q, b, a);
  if (r == 0.0) return 0;
  return ((r > 0.0) == (b > 0.0)) ? 1 : -1;
}
}  // namespace

double div_down(double a, double b) {
  const double q = a / b;
  if (!std::isfinite(q) || a == 0.0) return q;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_down(q);
  return div_residual_sign(a, b, q) < 0 ? next_down(q) : q;
}

double div_up(double a, double b) {
  const double q = a / b;
  if (!std::isfinite(q) || a == 0.0) return q;
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_up(q);
  return div_residual_sign(a, b, q) > 0 ? next_up(q) : q;
}

double sqrt_down(double a) {
  const double s = std::sqrt(a);
  if (a == 0.0 || !std::isfinite(s)) return s;
  if (a < kTiny) return std::max(0.0, next_down(s));
  return std::fma(-s, s, a) < 0.0 ? next_down(s) : s;
}

double sqrt_up(double a) {
  const double s = std::sqrt(a);
  if (a == 0.0 || !std::isfinite(s)) return s;
  if (a < kTiny) return next_up(s);
  return std::fma(-s, s, a) > 0.0 ? next_up(s) : s;
}

}  // namespace rounding

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi)) throw Error("interval endpoint is NaN");
  if (lo > hi) throw Error("interval lower endpoint exceeds upper endpoint");
}

double Interval::mid() const {
  const double m = 0.5 * lo_ + 0.5 * hi_;
  return std::clamp(m, lo_, hi_);
}

double Interval::mig() const {
  if (contains_zero()) return 0.0;
  return std::min(std::fabs(lo_), std::fabs(hi_));
}

double Interval::mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

std::ostream& operator<<(std::ostream& os, const Interval& v) {
  return os << '[' << format_double(v.lo()) << ", " << format_double(v.hi()) << ']';
}

Interval operator+(const Interval& a, const Interval& b) {
  return checked(rounding::add_down(a.lo(), b.lo()), rounding::add_up(a.hi(), b.hi()), "add");
}

Interval operator-(const Interval& a, const Interval& b) {
  return checked(rounding::add_down(a.lo(), -b.hi()), rounding::add_up(a.hi(), -b.lo()), "sub");
}

Interval operator-(const Interval& a) { return Interval(-a.hi(), -a.lo()); }

Interval operator*(const Interval& a, const Interval& b) {
  require_finite(a, "mul");
  require_finite(b, "mul");
  const double lo = std::min({rounding::mul_down(a.lo(), b.lo()), rounding::mul_down(a.lo(), b.hi()),
                              rounding::mul_down(a.hi(), b.lo()), rounding::mul_down(a.hi(), b.hi())});
  const double hi = std::max({rounding::mul_up(a.lo(), b.lo()), rounding::mul_up(a.lo(), b.hi()),
                              rounding::mul_up(a.hi(), b.lo()), rounding::mul_up(a.hi(), b.hi())});
  return checked(lo, hi, "mul");
}

Interval operator/(const Interval& a, const Interval& b) {
  require_finite(a, "div");
  require_finite(b, "div");
  if (b.contains_zero()) throw DomainError("div: denominator interval contains 0");
  const double lo = std::min({rounding::div_down(a.lo(), b.lo()), rounding::div_down(a.lo(), b.hi()),
                              rounding::div_down(a.hi(), b.lo()), rounding::div_down(a.hi(), b.hi())});
  const double hi = std::max({rounding::div_up(a.lo(), b.lo()), rounding::div_up(a.lo(), b.hi()),
                              rounding::div_up(a.hi(), b.lo()), rounding::div_up(a.hi(), b.hi())});
  return checked(lo, hi, "div");
}

Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Interval widen_ulps(const Interval& v, int ulps) {
  return Interval(down_n(v.lo(), ulps), up_n(v.hi(), ulps));
}

namespace {

// Bounds on |v|^n for v >= 0, by repeated directed multiplication.
double pow_nonneg_down(double v, long n) {
  double r = 1.0;
  for (long i = 0; i < n; ++i) r = rounding::mul_down(r, v);
  return r;
}

double pow_nonneg_up(double v, long n) {
  double r = 1.0;
  for (long i = 0; i < n; ++i) r = rounding::mul_up(r, v);
  return r;
}

}  // namespace

Interval pow_int(const Interval& base, long exponent) {
  require_finite(base, "pow");
  if (exponent == 0) return Interval::point(1.0);
  if (exponent < 0) {
    if (base.contains_zero()) throw DomainError("pow: negative exponent with base containing 0");
    return Interval::point(1.0) / pow_int(base, -exponent);
  }
  const long n = exponent;
  const double lo = base.lo();
  const double hi = base.hi();
  if (n % 2 == 1) {
    // Odd powers are increasing; v^n = -(|v|^n) for negative v.
    const double rlo = lo >= 0.0 ? pow_nonneg_down(lo, n) : -pow_nonneg_up(-lo, n);
    const double rhi = hi >= 0.0 ? pow_nonneg_up(hi, n) : -pow_nonneg_down(-hi, n);
    return checked(rlo, rhi, "pow");
  }
  if (lo >= 0.0) return checked(pow_nonneg_down(lo, n), pow_nonneg_up(hi, n), "pow");
  if (hi <= 0.0) return checked(pow_nonneg_down(-hi, n), pow_nonneg_up(-lo, n), "pow");
  return checked(0.0, pow_nonneg_up(base.mag(), n), "pow");
}

Interval pow(const Interval& base, const Interval& exponent) {
  if (base.lo() <= 0.0) throw DomainError("pow: non-integer exponent needs a strictly positive base");
  return exp(exponent * ln(base));
}

Interval exp(const Interval& v) {
  require_finite(v, "exp");
  const double lo = std::max(0.0, down_n(std::exp(v.lo()), kTranscendentalUlps));
  const double hi = up_n(std::exp(v.hi()), kTranscendentalUlps);
  return checked(lo, hi, "exp");
}

Interval ln(const Interval& v) {
  require_finite(v, "ln");
  if (v.lo() <= 0.0) throw DomainError("ln: argument interval is not strictly positive");
  return checked(down_n(std::log(v.lo()), kTranscendentalUlps),
                 up_n(std::log(v.hi()), kTranscendentalUlps), "ln");
}

Interval sqrt(const Interval& v) {
  require_finite(v, "sqrt");
  if (v.lo() < 0.0) throw DomainError("sqrt: argument interval contains negative values");
  return checked(rounding::sqrt_down(v.lo()), rounding::sqrt_up(v.hi()), "sqrt");
}

namespace {

// Enclosure of sin (phase 1) or cos (phase 0). Extrema of both sit at integer
// multiples m of pi/2: a maximum where (m - phase) % 4 == 0, a minimum where
// it is 2. Each multiple is enclosed using bounds on pi/2, so an extremum is
// included whenever it might lie in the argument.
Interval trig(const Interval& v, int phase, const char* op) {
  require_finite(v, op);
  if (v.width() >= 7.0 || v.mag() > 1e9) return Interval(-1.0, 1.0);

  auto f = [phase](double t) { return phase == 1 ? std::sin(t) : std::cos(t); };
  const double flo = f(v.lo());
  const double fhi = f(v.hi());
  double lo = down_n(std::min(flo, fhi), kTranscendentalUlps);
  double hi = up_n(std::max(flo, fhi), kTranscendentalUlps);

  static const Interval half_pi(rounding::next_down(M_PI_2), rounding::next_up(M_PI_2));
  const long m_first = static_cast<long>(std::floor(v.lo() / M_PI_2)) - 1;
  const long m_last = static_cast<long>(std::ceil(v.hi() / M_PI_2)) + 1;
  for (long m = m_first; m <= m_last; ++m) {
    const Interval c = Interval::point(static_cast<double>(m)) * half_pi;
    if (c.hi() < v.lo() || c.lo() > v.hi()) continue;
    const long k = (((m - phase) % 4) + 4) % 4;
    if (k == 0) hi = 1.0;
    if (k == 2) lo = -1.0;
  }
  return Interval(std::max(lo, -1.0), std::min(hi, 1.0));
}

}  // namespace

Interval sin(const Interval& v) { return trig(v, 1, "sin"); }
Interval cos(const Interval& v) { return trig(v, 0, "cos"); }

Interval arith(ArithOp op, std::span<const Interval> args, double exponent) {
  auto need = [&](std::size_t n) {
    if (args.size() < n) throw Error("arith: missing operand");
  };
  switch (op) {
    case ArithOp::Add: need(2); return args[0] + args[1];
    case ArithOp::Sub: need(2); return args[0] - args[1];
    case ArithOp::Mul: need(2); return args[0] * args[1];
    case ArithOp::Div: need(2); return args[0] / args[1];
    case ArithOp::Neg: need(1); return -args[0];
    case ArithOp::Pow: {
      need(1);
      const Interval e = args.size() >= 2 ? args[1] : Interval::point(exponent);
      if (e.is_point() && e.lo() == std::trunc(e.lo()) && std::fabs(e.lo()) < 1e9)
        return pow_int(args[0], static_cast<long>(e.lo()));
      return pow(args[0], e);
    }
    case ArithOp::Sin: need(1); return sin(args[0]);
    case ArithOp::Cos: need(1); return cos(args[0]);
    case ArithOp::Exp: need(1); return exp(args[0]);
    case ArithOp::Ln: need(1); return ln(args[0]);
    case ArithOp::Sqrt: need(1); return sqrt(args[0]);
  }
  throw Error("arith: unknown operation");
}

IntervalUnion IntervalUnion::from_intervals(std::vector<Interval> parts) {
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo() < b.lo(); });
  IntervalUnion u;
  for (const Interval& v : parts) {
    if (!u.parts_.empty() && v.lo() <= u.parts_.back().hi()) {
      Interval& last = u.parts_.back();
      last = Interval(last.lo(), std::max(last.hi(), v.hi()));
    } else {
      u.parts_.push_back(v);
    }
  }
  return u;
}

void IntervalUnion::insert(const Interval& v) {
  auto first = std::lower_bound(parts_.begin(), parts_.end(), v.lo(),
                                [](const Interval& p, double lo) { return p.hi() < lo; });
  auto last = first;
  double lo = v.lo();
  double hi = v.hi();
  while (last != parts_.end() && last->lo() <= hi) {
    lo = std::min(lo, last->lo());
    hi = std::max(hi, last->hi());
    ++last;
  }
  first = parts_.erase(first, last);
  parts_.insert(first, Interval(lo, hi));
}

void IntervalUnion::merge(const IntervalUnion& other) {
  std::vector<Interval> all = parts_;
  all.insert(all.end(), other.parts_.begin(), other.parts_.end());
  *this = from_intervals(std::move(all));
}

double IntervalUnion::measure() const {
  double total = 0.0;
  for (const Interval& p : parts_) total += p.width();
  return total;
}

IntervalUnion IntervalUnion::widened(int ulps) const {
  std::vector<Interval> w;
  w.reserve(parts_.size());
  for (const Interval& p : parts_) w.push_back(widen_ulps(p, ulps));
  return from_intervals(std::move(w));
}

IntervalUnion union_insert(IntervalUnion u, const Interval& v) {
  u.insert(v);
  return u;
}

bool subset_with_slack(const Interval& inner, const IntervalUnion& u, double slack) {
  const double lo = rounding::add_down(inner.lo(), slack);
  const double hi = rounding::add_up(inner.hi(), -slack);
  if (lo > hi) return true;
  const auto& parts = u.parts();
  auto it = std::lower_bound(parts.begin(), parts.end(), lo,
                             [](const Interval& p, double x) { return p.hi() < x; });
  return it != parts.end() && it->lo() <= lo && hi <= it->hi();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace cantor
