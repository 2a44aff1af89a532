#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cantor/interval.hpp"

namespace cantor {

enum class NodeKind { Const, VarX, VarY, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Ln, Sqrt };

// Immutable expression tree in the variables x and y. Copies share nodes.
class Expr {
 public:
  struct Node;

  static Expr constant(double value);
  // Constant whose exact value is only known to lie in `enclosure`.
  static Expr constant(double value, const Interval& enclosure);
  // Decimal literal; the enclosure contains the exact decimal value.
  static Expr literal(std::string_view text);
  static Expr pi();
  static Expr e();
  static Expr x();
  static Expr y();
  static Expr binary(NodeKind kind, Expr lhs, Expr rhs);
  static Expr unary(NodeKind kind, Expr arg);

  NodeKind kind() const;
  // Constants only.
  double value() const;
  const Interval& enclosure() const;
  const std::string& label() const;
  // First operand (the argument of unary nodes) and second operand.
  const Expr& lhs() const;
  const Expr& rhs() const;

  bool has_variables() const;
  bool is_zero() const;
  bool is_one() const;
  // For Pow nodes with a constant integer exponent.
  std::optional<long> integer_exponent() const;

  // Structural equality; constants compare by value and enclosure.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Grammar (whitespace insensitive):
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?
//   atom  := number | 'x' | 'y' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'
// with name one of sin, cos, exp, ln, sqrt.
Expr parse(std::string_view text);
// Minimal-parenthesis infix form; parse(print(e)) == e for parsed trees.
std::string print(const Expr& e);

struct GradTriple {
  Expr f;
  Expr fx;
  Expr fy;
};

enum class Var { X, Y };

Expr derivative(const Expr& e, Var v);
GradTriple differentiate(const Expr& e);

// Floating evaluation for heuristics and sampling; never used to certify.
double eval_point(const Expr& e, double x, double y);
// Natural interval extension over the box.
Interval eval_interval(const Expr& e, const Box& b);

}  // namespace cantor
