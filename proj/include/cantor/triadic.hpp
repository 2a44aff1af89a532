#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cantor/interval.hpp"

namespace cantor {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// L is the left contraction x/3, R the right contraction (x+2)/3.
enum class Digit : std::uint8_t { L, R };

class TernaryWord {
 public:
  TernaryWord() = default;
  explicit TernaryWord(std::vector<Digit> digits) : digits_(std::move(digits)) {}
  // Accepts a string over {L, R}; the empty string is the rank-0 word.
  static TernaryWord parse(std::string_view text);

  unsigned rank() const { return static_cast<unsigned>(digits_.size()); }
  const std::vector<Digit>& digits() const { return digits_; }
  TernaryWord append(Digit d) const;
  bool has_prefix(const TernaryWord& prefix) const;
  std::string str() const;

  friend bool operator==(const TernaryWord&, const TernaryWord&) = default;
  friend std::strong_ordering operator<=>(const TernaryWord& a, const TernaryWord& b);

 private:
  std::vector<Digit> digits_;
};

BigInt pow3(unsigned n);

// numerator / 3^rank. Equality and ordering are by value.
class TriadicRational {
 public:
  TriadicRational() = default;
  TriadicRational(BigInt numerator, unsigned rank) : num_(std::move(numerator)), rank_(rank) {}
  // Parses "p/3^n".
  static TriadicRational parse(std::string_view text);

  const BigInt& numerator() const { return num_; }
  unsigned rank() const { return rank_; }
  Rational to_rational() const;
  double to_double() const;
  // Tightest double interval containing the value.
  Interval enclosure() const;
  // "p/3^n" with the stored numerator and rank.
  std::string str() const;

  friend bool operator==(const TriadicRational& a, const TriadicRational& b);
  friend std::strong_ordering operator<=>(const TriadicRational& a, const TriadicRational& b);
  friend TriadicRational operator+(const TriadicRational& a, const TriadicRational& b);
  friend TriadicRational operator-(const TriadicRational& a, const TriadicRational& b);

 private:
  BigInt num_ = 0;
  unsigned rank_ = 0;
};

// Tightest double interval containing an exact rational.
Interval enclose(const Rational& q);
// Parses "p/q" or an integer "p".
Rational parse_rational(std::string_view text);
std::string rational_str(const Rational& q);

// Image of [0,1] under the composition of the word's contractions.
class BasicInterval {
 public:
  BasicInterval() : BasicInterval(TernaryWord{}) {}
  explicit BasicInterval(TernaryWord word);

  const TernaryWord& word() const { return word_; }
  unsigned rank() const { return word_.rank(); }
  const TriadicRational& left() const { return left_; }
  TriadicRational right() const;
  TriadicRational length() const { return TriadicRational(1, rank()); }
  Interval enclosure() const;
  // Exact test of [left, right] ∩ [lo, hi] ≠ ∅ / [left, right] ⊆ [lo, hi].
  bool intersects(const Interval& range) const;
  bool inside(const Interval& range) const;

  friend bool operator==(const BasicInterval& a, const BasicInterval& b) { return a.word_ == b.word_; }

 private:
  TernaryWord word_;
  TriadicRational left_;
};

BasicInterval word_to_interval(const TernaryWord& word);
// Rank+1 intervals obtained by appending L and R, in that order.
std::pair<BasicInterval, BasicInterval> children(const BasicInterval& iv);

class BasicSquare {
 public:
  BasicSquare() = default;
  BasicSquare(BasicInterval x, BasicInterval y);

  const BasicInterval& x() const { return x_; }
  const BasicInterval& y() const { return y_; }
  unsigned rank() const { return x_.rank(); }
  Box enclosure() const { return Box{x_.enclosure(), y_.enclosure()}; }
  bool intersects(const Box& region) const { return x_.intersects(region.x) && y_.intersects(region.y); }
  bool inside(const Box& region) const { return x_.inside(region.x) && y_.inside(region.y); }
  bool contains(const BasicSquare& other) const;
  // The four rank+1 sub-squares, ordered (LL, LR, RL, RR) by (x, y) digit.
  std::vector<BasicSquare> children() const;

  friend bool operator==(const BasicSquare& a, const BasicSquare& b) = default;

 private:
  BasicInterval x_;
  BasicInterval y_;
};

// Process-wide limit on enumeration rank. Defaults to 30.
unsigned rank_cap();
void set_rank_cap(unsigned cap);
// Throws RankCapExceeded when n exceeds the cap.
void check_rank(unsigned n);

// Rank-n basic intervals below `prefix` meeting `range`, in increasing order.
std::vector<BasicInterval> intervals_of_rank(unsigned n, const Interval& range,
                                             const TernaryWord& prefix = {});
// Rank-n basic squares meeting `region`, ordered lexicographically by
// (x-word, y-word).
std::vector<BasicSquare> squares_of_rank(unsigned n, const Box& region);
void for_each_square_of_rank(unsigned n, const Box& region,
                             const std::function<void(const BasicSquare&)>& visit);

// Exact membership of a rational in the middle-third Cantor set. Throws
// DomainError outside [0, 1].
bool cantor_membership(const Rational& q);

}  // namespace cantor
