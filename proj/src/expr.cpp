#include "cantor/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "cantor/errors.hpp"
#include "cantor/triadic.hpp"

namespace cantor {

struct Expr::Node {
  NodeKind kind = NodeKind::Const;
  double value = 0.0;
  Interval enclosure;
  std::string label;
  std::optional<Expr> a;
  std::optional<Expr> b;
  bool has_vars = false;
  std::optional<long> int_exp;
};

namespace {

bool is_binary(NodeKind k) {
  return k == NodeKind::Add || k == NodeKind::Sub || k == NodeKind::Mul || k == NodeKind::Div ||
         k == NodeKind::Pow;
}

bool is_unary(NodeKind k) {
  return k == NodeKind::Neg || k == NodeKind::Sin || k == NodeKind::Cos || k == NodeKind::Exp ||
         k == NodeKind::Ln || k == NodeKind::Sqrt;
}

// Value of a decimal literal as an exact rational.
Rational decimal_value(std::string_view text) {
  BigInt mantissa = 0;
  long scale = 0;
  std::size_t i = 0;
  bool seen_dot = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) --scale;
    } else {
      break;
    }
  }
  if (i < text.size()) scale += std::strtol(std::string(text.substr(i + 1)).c_str(), nullptr, 10);
  BigInt ten_pow = 1;
  for (long k = 0; k < std::labs(scale); ++k) ten_pow *= 10;
  return scale >= 0 ? Rational(mantissa * ten_pow) : Rational(mantissa, ten_pow);
}

}  // namespace

Expr Expr::constant(double value) { return constant(value, Interval::point(value)); }

Expr Expr::constant(double value, const Interval& enclosure) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Const;
  n->value = value;
  n->enclosure = enclosure;
  return Expr(std::move(n));
}

Expr Expr::literal(std::string_view text) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Const;
  n->value = std::strtod(std::string(text).c_str(), nullptr);
  if (!std::isfinite(n->value)) throw OverflowError("numeric literal out of range: " + std::string(text));
  n->enclosure = enclose(decimal_value(text));
  n->label = std::string(text);
  return Expr(std::move(n));
}

Expr Expr::pi() {
  auto n = std::make_shared<Node>();
  n->value = M_PI;
  n->enclosure = Interval(rounding::next_down(M_PI), rounding::next_up(M_PI));
  n->label = "pi";
  return Expr(std::move(n));
}

Expr Expr::e() {
  auto n = std::make_shared<Node>();
  n->value = M_E;
  n->enclosure = Interval(rounding::next_down(M_E), rounding::next_up(M_E));
  n->label = "e";
  return Expr(std::move(n));
}

Expr Expr::x() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::VarX;
  n->has_vars = true;
  return Expr(std::move(n));
}

Expr Expr::y() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::VarY;
  n->has_vars = true;
  return Expr(std::move(n));
}

Expr Expr::binary(NodeKind kind, Expr lhs, Expr rhs) {
  if (!is_binary(kind)) throw Error("not a binary node kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->has_vars = lhs.has_variables() || rhs.has_variables();
  if (kind == NodeKind::Pow && !rhs.has_variables()) {
    const Interval ex = eval_interval(rhs, Box{});
    if (ex.is_point() && ex.lo() == std::trunc(ex.lo()) && std::fabs(ex.lo()) < 1e9)
      n->int_exp = static_cast<long>(ex.lo());
  }
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::unary(NodeKind kind, Expr arg) {
  if (!is_unary(kind)) throw Error("not a unary node kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->has_vars = arg.has_variables();
  n->a = std::move(arg);
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const Interval& Expr::enclosure() const { return node_->enclosure; }
const std::string& Expr::label() const { return node_->label; }
const Expr& Expr::lhs() const { return *node_->a; }
const Expr& Expr::rhs() const { return *node_->b; }
bool Expr::has_variables() const { return node_->has_vars; }
bool Expr::is_zero() const {
  return kind() == NodeKind::Const && enclosure() == Interval::point(0.0);
}
bool Expr::is_one() const {
  return kind() == NodeKind::Const && enclosure() == Interval::point(1.0);
}
std::optional<long> Expr::integer_exponent() const { return node_->int_exp; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::Const:
      return a.value() == b.value() && a.enclosure() == b.enclosure();
    case NodeKind::VarX:
    case NodeKind::VarY:
      return true;
    default:
      break;
  }
  if (!(a.lhs() == b.lhs())) return false;
  return !is_binary(a.kind()) || a.rhs() == b.rhs();
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("expected operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = Expr::binary(NodeKind::Add, lhs, parse_term());
      else if (accept('-')) lhs = Expr::binary(NodeKind::Sub, lhs, parse_term());
      else return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = Expr::binary(NodeKind::Mul, lhs, parse_unary());
      else if (accept('/')) lhs = Expr::binary(NodeKind::Div, lhs, parse_unary());
      else return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::unary(NodeKind::Neg, parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return Expr::binary(NodeKind::Pow, base, parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected number, variable, function or '('");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
    if (accept('(')) {
      Expr inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    fail("expected number, variable, function or '('");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    bool digits = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      digits = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) {
      pos_ = start;
      fail("malformed number");
    }
    // Exponent only when digits follow, so "2*e" style input is unaffected.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
        pos_ = k;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    return Expr::literal(text_.substr(start, pos_ - start));
  }

  Expr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (!call) {
      if (name == "x") return Expr::x();
      if (name == "y") return Expr::y();
      if (name == "pi") return Expr::pi();
      if (name == "e") return Expr::e();
      if (name == "sin" || name == "cos" || name == "exp" || name == "ln" || name == "sqrt")
        fail("expected '(' after " + std::string(name));
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    NodeKind kind;
    if (name == "sin") kind = NodeKind::Sin;
    else if (name == "cos") kind = NodeKind::Cos;
    else if (name == "exp") kind = NodeKind::Exp;
    else if (name == "ln") kind = NodeKind::Ln;
    else if (name == "sqrt") kind = NodeKind::Sqrt;
    else {
      pos_ = start;
      fail("unknown function '" + std::string(name) + "'");
    }
    accept('(');
    Expr arg = parse_expr();
    if (!accept(')')) fail("expected ')'");
    return Expr::unary(kind, arg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printer

namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecUnary = 3;
constexpr int kPrecAtom = 5;

int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Add:
    case NodeKind::Sub: return kPrecAdd;
    case NodeKind::Mul:
    case NodeKind::Div: return kPrecMul;
    case NodeKind::Neg: return kPrecUnary;
    case NodeKind::Pow: return 4;
    case NodeKind::Const: return e.label().empty() && e.value() < 0.0 ? kPrecUnary : kPrecAtom;
    default: return kPrecAtom;
  }
}

std::string render(const Expr& e, int min_prec);

std::string render_binary(const Expr& e, const char* op, int left_min, int right_min) {
  return render(e.lhs(), left_min) + op + render(e.rhs(), right_min);
}

std::string render(const Expr& e, int min_prec) {
  std::string s;
  switch (e.kind()) {
    case NodeKind::Const: s = e.label().empty() ? format_double(e.value()) : e.label(); break;
    case NodeKind::VarX: s = "x"; break;
    case NodeKind::VarY: s = "y"; break;
    case NodeKind::Add: s = render_binary(e, " + ", kPrecAdd, kPrecMul); break;
    case NodeKind::Sub: s = render_binary(e, " - ", kPrecAdd, kPrecMul); break;
    case NodeKind::Mul: s = render_binary(e, " * ", kPrecMul, kPrecUnary); break;
    case NodeKind::Div: s = render_binary(e, " / ", kPrecMul, kPrecUnary); break;
    case NodeKind::Neg: s = "-" + render(e.lhs(), kPrecUnary); break;
    case NodeKind::Pow: s = render_binary(e, "^", kPrecAtom, kPrecUnary); break;
    case NodeKind::Sin: s = "sin(" + render(e.lhs(), 0) + ")"; break;
    case NodeKind::Cos: s = "cos(" + render(e.lhs(), 0) + ")"; break;
    case NodeKind::Exp: s = "exp(" + render(e.lhs(), 0) + ")"; break;
    case NodeKind::Ln: s = "ln(" + render(e.lhs(), 0) + ")"; break;
    case NodeKind::Sqrt: s = "sqrt(" + render(e.lhs(), 0) + ")"; break;
  }
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string print(const Expr& e) { return render(e, 0); }

// ---------------------------------------------------------------------------
// Evaluation

double eval_point(const Expr& e, double x, double y) {
  auto finite = [](double v, const char* op) {
    if (std::isnan(v)) throw DomainError(std::string(op) + ": undefined result");
    if (!std::isfinite(v)) throw OverflowError(std::string(op) + ": non-finite result");
    return v;
  };
  switch (e.kind()) {
    case NodeKind::Const: return e.value();
    case NodeKind::VarX: return x;
    case NodeKind::VarY: return y;
    case NodeKind::Add: return finite(eval_point(e.lhs(), x, y) + eval_point(e.rhs(), x, y), "add");
    case NodeKind::Sub: return finite(eval_point(e.lhs(), x, y) - eval_point(e.rhs(), x, y), "sub");
    case NodeKind::Mul: return finite(eval_point(e.lhs(), x, y) * eval_point(e.rhs(), x, y), "mul");
    case NodeKind::Div: {
      const double den = eval_point(e.rhs(), x, y);
      if (den == 0.0) throw DomainError("div: division by zero");
      return finite(eval_point(e.lhs(), x, y) / den, "div");
    }
    case NodeKind::Neg: return -eval_point(e.lhs(), x, y);
    case NodeKind::Pow: {
      const double base = eval_point(e.lhs(), x, y);
      if (auto n = e.integer_exponent()) {
        if (*n < 0 && base == 0.0) throw DomainError("pow: zero base with negative exponent");
        return finite(std::pow(base, static_cast<double>(*n)), "pow");
      }
      if (base <= 0.0) throw DomainError("pow: non-integer exponent needs a strictly positive base");
      return finite(std::pow(base, eval_point(e.rhs(), x, y)), "pow");
    }
    case NodeKind::Sin: return std::sin(eval_point(e.lhs(), x, y));
    case NodeKind::Cos: return std::cos(eval_point(e.lhs(), x, y));
    case NodeKind::Exp: return finite(std::exp(eval_point(e.lhs(), x, y)), "exp");
    case NodeKind::Ln: {
      const double a = eval_point(e.lhs(), x, y);
      if (a <= 0.0) throw DomainError("ln: argument is not strictly positive");
      return std::log(a);
    }
    case NodeKind::Sqrt: {
      const double a = eval_point(e.lhs(), x, y);
      if (a < 0.0) throw DomainError("sqrt: negative argument");
      return std::sqrt(a);
    }
  }
  throw Error("eval_point: unknown node");
}

Interval eval_interval(const Expr& e, const Box& b) {
  switch (e.kind()) {
    case NodeKind::Const: return e.enclosure();
    case NodeKind::VarX: return b.x;
    case NodeKind::VarY: return b.y;
    case NodeKind::Add: return eval_interval(e.lhs(), b) + eval_interval(e.rhs(), b);
    case NodeKind::Sub: return eval_interval(e.lhs(), b) - eval_interval(e.rhs(), b);
    case NodeKind::Mul: return eval_interval(e.lhs(), b) * eval_interval(e.rhs(), b);
    case NodeKind::Div: return eval_interval(e.lhs(), b) / eval_interval(e.rhs(), b);
    case NodeKind::Neg: return -eval_interval(e.lhs(), b);
    case NodeKind::Pow: {
      const Interval base = eval_interval(e.lhs(), b);
      if (auto n = e.integer_exponent()) return pow_int(base, *n);
      return pow(base, eval_interval(e.rhs(), b));
    }
    case NodeKind::Sin: return sin(eval_interval(e.lhs(), b));
    case NodeKind::Cos: return cos(eval_interval(e.lhs(), b));
    case NodeKind::Exp: return exp(eval_interval(e.lhs(), b));
    case NodeKind::Ln: return ln(eval_interval(e.lhs(), b));
    case NodeKind::Sqrt: return sqrt(eval_interval(e.lhs(), b));
  }
  throw Error("eval_interval: unknown node");
}

// ---------------------------------------------------------------------------
// Differentiation with light simplification.

namespace {

bool is_const(const Expr& e) { return e.kind() == NodeKind::Const; }

// Folds a node whose operands are constants; the enclosure follows interval
// arithmetic so folded constants stay rigorous.
std::optional<Expr> fold(NodeKind kind, const Expr& a, const Expr* b) {
  if (!is_const(a) || (b && !is_const(*b))) return std::nullopt;
  try {
    const Expr node = b ? Expr::binary(kind, a, *b) : Expr::unary(kind, a);
    return Expr::constant(eval_point(node, 0.0, 0.0), eval_interval(node, Box{}));
  } catch (const Error&) {
    return std::nullopt;
  }
}

Expr make_add(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (auto f = fold(NodeKind::Add, a, &b)) return *f;
  return Expr::binary(NodeKind::Add, a, b);
}

Expr make_neg(const Expr& a) {
  if (a.is_zero()) return a;
  if (a.kind() == NodeKind::Neg) return a.lhs();
  if (auto f = fold(NodeKind::Neg, a, nullptr)) return *f;
  return Expr::unary(NodeKind::Neg, a);
}

Expr make_sub(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return make_neg(b);
  if (auto f = fold(NodeKind::Sub, a, &b)) return *f;
  return Expr::binary(NodeKind::Sub, a, b);
}

Expr make_mul(const Expr& a, const Expr& b) {
  if (a.is_zero()) return a;
  if (b.is_zero()) return b;
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (auto f = fold(NodeKind::Mul, a, &b)) return *f;
  return Expr::binary(NodeKind::Mul, a, b);
}

Expr make_div(const Expr& a, const Expr& b) {
  if (a.is_zero()) return a;
  if (b.is_one()) return a;
  if (auto f = fold(NodeKind::Div, a, &b)) return *f;
  return Expr::binary(NodeKind::Div, a, b);
}

Expr make_pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_zero()) return Expr::constant(1.0);
  if (exponent.is_one()) return base;
  if (auto f = fold(NodeKind::Pow, base, &exponent)) return *f;
  return Expr::binary(NodeKind::Pow, base, exponent);
}

}  // namespace

Expr derivative(const Expr& e, Var v) {
  const Expr zero = Expr::constant(0.0);
  const Expr one = Expr::constant(1.0);
  switch (e.kind()) {
    case NodeKind::Const: return zero;
    case NodeKind::VarX: return v == Var::X ? one : zero;
    case NodeKind::VarY: return v == Var::Y ? one : zero;
    default: break;
  }
  if (!e.has_variables()) return zero;

  const Expr& u = e.lhs();
  switch (e.kind()) {
    case NodeKind::Add: return make_add(derivative(u, v), derivative(e.rhs(), v));
    case NodeKind::Sub: return make_sub(derivative(u, v), derivative(e.rhs(), v));
    case NodeKind::Mul:
      return make_add(make_mul(derivative(u, v), e.rhs()), make_mul(u, derivative(e.rhs(), v)));
    case NodeKind::Div: {
      const Expr& w = e.rhs();
      const Expr num = make_sub(make_mul(derivative(u, v), w), make_mul(u, derivative(w, v)));
      return make_div(num, make_pow(w, Expr::constant(2.0)));
    }
    case NodeKind::Neg: return make_neg(derivative(u, v));
    case NodeKind::Pow: {
      const Expr& g = e.rhs();
      if (!g.has_variables()) {
        // d(u^c) = c u^(c-1) u'
        return make_mul(make_mul(g, make_pow(u, make_sub(g, one))), derivative(u, v));
      }
      if (!u.has_variables() && u.enclosure().lo() > 0.0) {
        // d(c^g) = c^g ln(c) g'
        return make_mul(make_mul(e, Expr::unary(NodeKind::Ln, u)), derivative(g, v));
      }
      throw NotDifferentiable("power with a variable exponent needs a positive constant base: " + print(e));
    }
    case NodeKind::Sin: return make_mul(Expr::unary(NodeKind::Cos, u), derivative(u, v));
    case NodeKind::Cos: return make_mul(make_neg(Expr::unary(NodeKind::Sin, u)), derivative(u, v));
    case NodeKind::Exp: return make_mul(e, derivative(u, v));
    case NodeKind::Ln: return make_div(derivative(u, v), u);
    case NodeKind::Sqrt:
      return make_div(derivative(u, v), make_mul(Expr::constant(2.0), e));
    default: break;
  }
  throw Error("derivative: unknown node");
}

GradTriple differentiate(const Expr& e) {
  return GradTriple{e, derivative(e, Var::X), derivative(e, Var::Y)};
}

}  // namespace cantor
