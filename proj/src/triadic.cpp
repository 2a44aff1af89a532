#include "cantor/triadic.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <map>

#include "cantor/errors.hpp"

namespace cantor {

namespace {

std::atomic<unsigned> g_rank_cap{30};

// 3^n is exact in a double up to n = 33; 2^53 bounds exact numerators.
constexpr unsigned kMaxExactRank = 33;
const BigInt kMaxExactNumerator = BigInt(1) << 53;

BigInt parse_bigint(std::string_view text, std::string_view what) {
  if (text.empty()) throw Error("empty " + std::string(what));
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) throw Error("malformed " + std::string(what) + ": " + std::string(text));
  for (std::size_t k = i; k < text.size(); ++k)
    if (text[k] < '0' || text[k] > '9')
      throw Error("malformed " + std::string(what) + ": " + std::string(text));
  BigInt v(std::string(text.substr(i)));
  return text[0] == '-' ? BigInt(-v) : v;
}

}  // namespace

TernaryWord TernaryWord::parse(std::string_view text) {
  std::vector<Digit> d;
  d.reserve(text.size());
  for (char c : text) {
    if (c == 'L') d.push_back(Digit::L);
    else if (c == 'R') d.push_back(Digit::R);
    else throw Error("ternary word may only contain L and R: " + std::string(text));
  }
  return TernaryWord(std::move(d));
}

TernaryWord TernaryWord::append(Digit d) const {
  std::vector<Digit> v = digits_;
  v.push_back(d);
  return TernaryWord(std::move(v));
}

bool TernaryWord::has_prefix(const TernaryWord& prefix) const {
  if (prefix.rank() > rank()) return false;
  return std::equal(prefix.digits_.begin(), prefix.digits_.end(), digits_.begin());
}

std::string TernaryWord::str() const {
  std::string s;
  s.reserve(digits_.size());
  for (Digit d : digits_) s.push_back(d == Digit::L ? 'L' : 'R');
  return s;
}

std::strong_ordering operator<=>(const TernaryWord& a, const TernaryWord& b) {
  return std::lexicographical_compare_three_way(a.digits_.begin(), a.digits_.end(), b.digits_.begin(),
                                                b.digits_.end());
}

BigInt pow3(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 3;
  return r;
}

TriadicRational TriadicRational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos || text.substr(slash + 1, 2) != "3^")
    throw Error("expected p/3^n, got " + std::string(text));
  const BigInt num = parse_bigint(text.substr(0, slash), "numerator");
  const std::string_view exp = text.substr(slash + 3);
  unsigned rank = 0;
  const auto res = std::from_chars(exp.data(), exp.data() + exp.size(), rank);
  if (res.ec != std::errc() || res.ptr != exp.data() + exp.size())
    throw Error("malformed exponent in " + std::string(text));
  return TriadicRational(num, rank);
}

Rational TriadicRational::to_rational() const { return Rational(num_, pow3(rank_)); }

double TriadicRational::to_double() const {
  if (rank_ <= kMaxExactRank && abs(num_) < kMaxExactNumerator)
    return num_.convert_to<double>() / std::pow(3.0, rank_);
  return enclose(to_rational()).mid();
}

Interval TriadicRational::enclosure() const {
  if (rank_ <= kMaxExactRank && abs(num_) < kMaxExactNumerator) {
    const double p = num_.convert_to<double>();
    const double t = std::pow(3.0, rank_);
    const double q = p / t;
    // Sign of the exact residual p - q*t tells on which side q rounded.
    const double r = std::fma(-q, t, p);
    if (r == 0.0) return Interval::point(q);
    if (r > 0.0) return Interval(q, rounding::next_up(q));
    return Interval(rounding::next_down(q), q);
  }
  return enclose(to_rational());
}

std::string TriadicRational::str() const { return num_.str() + "/3^" + std::to_string(rank_); }

bool operator==(const TriadicRational& a, const TriadicRational& b) {
  return a.num_ * pow3(b.rank_) == b.num_ * pow3(a.rank_);
}

std::strong_ordering operator<=>(const TriadicRational& a, const TriadicRational& b) {
  const BigInt lhs = a.num_ * pow3(b.rank_);
  const BigInt rhs = b.num_ * pow3(a.rank_);
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

namespace {
std::pair<BigInt, BigInt> common_numerators(const TriadicRational& a, const TriadicRational& b,
                                            unsigned& rank) {
  rank = std::max(a.rank(), b.rank());
  return {a.numerator() * pow3(rank - a.rank()), b.numerator() * pow3(rank - b.rank())};
}
}  // namespace

TriadicRational operator+(const TriadicRational& a, const TriadicRational& b) {
  unsigned rank = 0;
  auto [x, y] = common_numerators(a, b, rank);
  return TriadicRational(x + y, rank);
}

TriadicRational operator-(const TriadicRational& a, const TriadicRational& b) {
  unsigned rank = 0;
  auto [x, y] = common_numerators(a, b, rank);
  return TriadicRational(x - y, rank);
}

Interval enclose(const Rational& q) {
  const double d = q.convert_to<double>();
  if (!std::isfinite(d)) throw OverflowError("rational out of double range");
  // Largest double not above q, then its successor unless q is exact.
  double lo = d;
  while (Rational(lo) > q) lo = rounding::next_down(lo);
  while (Rational(rounding::next_up(lo)) <= q) lo = rounding::next_up(lo);
  if (Rational(lo) == q) return Interval::point(lo);
  return Interval(lo, rounding::next_up(lo));
}

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(text, "integer"));
  const BigInt num = parse_bigint(text.substr(0, slash), "numerator");
  const BigInt den = parse_bigint(text.substr(slash + 1), "denominator");
  if (den == 0) throw Error("zero denominator in " + std::string(text));
  return Rational(num, den);
}

std::string rational_str(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

BasicInterval::BasicInterval(TernaryWord word) : word_(std::move(word)) {
  // left = sum c_k 3^{-k} with c_k in {0, 2}; accumulate in base 3.
  BigInt num = 0;
  for (Digit d : word_.digits()) num = num * 3 + (d == Digit::R ? 2 : 0);
  left_ = TriadicRational(num, word_.rank());
}

TriadicRational BasicInterval::right() const {
  return TriadicRational(left_.numerator() + 1, rank());
}

Interval BasicInterval::enclosure() const {
  return Interval(left_.enclosure().lo(), right().enclosure().hi());
}

bool BasicInterval::intersects(const Interval& range) const {
  const Rational lo(range.lo());
  const Rational hi(range.hi());
  return left_.to_rational() <= hi && right().to_rational() >= lo;
}

bool BasicInterval::inside(const Interval& range) const {
  const Rational lo(range.lo());
  const Rational hi(range.hi());
  return lo <= left_.to_rational() && right().to_rational() <= hi;
}

BasicInterval word_to_interval(const TernaryWord& word) { return BasicInterval(word); }

std::pair<BasicInterval, BasicInterval> children(const BasicInterval& iv) {
  return {BasicInterval(iv.word().append(Digit::L)), BasicInterval(iv.word().append(Digit::R))};
}

BasicSquare::BasicSquare(BasicInterval x, BasicInterval y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rank() != y_.rank()) throw Error("basic square sides must have equal rank");
}

bool BasicSquare::contains(const BasicSquare& other) const {
  return other.x_.word().has_prefix(x_.word()) && other.y_.word().has_prefix(y_.word()) &&
         other.rank() >= rank();
}

std::vector<BasicSquare> BasicSquare::children() const {
  auto [xl, xr] = cantor::children(x_);
  auto [yl, yr] = cantor::children(y_);
  return {BasicSquare(xl, yl), BasicSquare(xl, yr), BasicSquare(xr, yl), BasicSquare(xr, yr)};
}

unsigned rank_cap() { return g_rank_cap.load(); }
void set_rank_cap(unsigned cap) { g_rank_cap.store(cap); }

void check_rank(unsigned n) {
  if (n > rank_cap())
    throw RankCapExceeded("rank " + std::to_string(n) + " exceeds the rank cap " +
                          std::to_string(rank_cap()));
}

namespace {

void collect(const BasicInterval& node, unsigned n, const Rational& lo, const Rational& hi,
             std::vector<BasicInterval>& out) {
  if (node.left().to_rational() > hi || node.right().to_rational() < lo) return;
  if (node.rank() == n) {
    out.push_back(node);
    return;
  }
  auto [l, r] = children(node);
  collect(l, n, lo, hi, out);
  collect(r, n, lo, hi, out);
}

}  // namespace

std::vector<BasicInterval> intervals_of_rank(unsigned n, const Interval& range, const TernaryWord& prefix) {
  check_rank(n);
  std::vector<BasicInterval> out;
  if (prefix.rank() > n) return out;
  collect(BasicInterval(prefix), n, Rational(range.lo()), Rational(range.hi()), out);
  return out;
}

void for_each_square_of_rank(unsigned n, const Box& region,
                             const std::function<void(const BasicSquare&)>& visit) {
  const auto xs = intervals_of_rank(n, region.x);
  const auto ys = intervals_of_rank(n, region.y);
  for (const auto& ix : xs)
    for (const auto& iy : ys) visit(BasicSquare(ix, iy));
}

std::vector<BasicSquare> squares_of_rank(unsigned n, const Box& region) {
  std::vector<BasicSquare> out;
  for_each_square_of_rank(n, region, [&](const BasicSquare& s) { out.push_back(s); });
  return out;
}

bool cantor_membership(const Rational& q) {
  if (q < 0 || q > 1) throw DomainError("cantor_membership: point outside [0, 1]");
  const BigInt p = numerator(q);
  const BigInt d = denominator(q);
  if (p == 0 || p == d) return true;

  // Long division in base 3, stopping at a zero remainder (finite expansion)
  // or a repeated remainder (one full period generated).
  std::vector<int> digits;
  std::map<BigInt, std::size_t> seen;
  BigInt r = p;
  while (r != 0 && !seen.contains(r)) {
    seen.emplace(r, digits.size());
    r *= 3;
    digits.push_back(static_cast<int>(r / d));
    r %= d;
  }
  const auto ones = std::count(digits.begin(), digits.end(), 1);
  if (ones == 0) return true;
  // A finite expansion ending in 1 has the dual form ...0222..., so a single
  // trailing 1 is admissible.
  return r == 0 && ones == 1 && digits.back() == 1;
}

}  // namespace cantor
