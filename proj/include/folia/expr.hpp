#pragma once

// Closed-form test functions: expression trees over chart coordinates with
// node set {constant, coordinate, +, *, integer power, sin, cos, exp}.
// Evaluation is generic over the scalar type, so the same tree evaluates on
// doubles and on jets (exact derivatives).

#include <cctype>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "folia/jet.hpp"

namespace folia {

class Expr;

namespace detail {

enum class NodeKind { Constant, Coordinate, Add, Mul, Pow, Sin, Cos, Exp };

struct Node {
  NodeKind kind;
  double value = 0.0;              // Constant
  int coord = 0;                   // Coordinate
  int exponent = 1;                // Pow
  std::vector<std::shared_ptr<const Node>> children;
};

}  // namespace detail

class Expr {
public:
  Expr() : node_(nullptr) {}

  static Expr constant(double v) {
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::NodeKind::Constant;
    n->value = v;
    return Expr(n);
  }
  static Expr coord(int i) {
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::NodeKind::Coordinate;
    n->coord = i;
    return Expr(n);
  }

  bool empty() const { return node_ == nullptr; }

  friend Expr operator+(const Expr& a, const Expr& b) { return nary(detail::NodeKind::Add, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return nary(detail::NodeKind::Mul, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return a + Expr::constant(-1.0) * b; }
  friend Expr operator-(const Expr& a) { return Expr::constant(-1.0) * a; }

  static Expr pow(const Expr& base, int e) {
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::NodeKind::Pow;
    n->exponent = e;
    n->children = {base.node_};
    return Expr(n);
  }
  static Expr sin(const Expr& a) { return unary(detail::NodeKind::Sin, a); }
  static Expr cos(const Expr& a) { return unary(detail::NodeKind::Cos, a); }
  static Expr exp(const Expr& a) { return unary(detail::NodeKind::Exp, a); }

  template <typename T>
  T eval(const std::vector<T>& vars) const {
    if (!node_) throw std::logic_error("empty expression");
    return eval_node(*node_, vars);
  }

  double operator()(const std::vector<double>& vars) const { return eval(vars); }

private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

  static Expr unary(detail::NodeKind k, const Expr& a) {
    auto n = std::make_shared<detail::Node>();
    n->kind = k;
    n->children = {a.node_};
    return Expr(n);
  }
  static Expr nary(detail::NodeKind k, const Expr& a, const Expr& b) {
    auto n = std::make_shared<detail::Node>();
    n->kind = k;
    n->children = {a.node_, b.node_};
    return Expr(n);
  }

  template <typename T>
  static T eval_node(const detail::Node& n, const std::vector<T>& vars) {
    using detail::NodeKind;
    switch (n.kind) {
      case NodeKind::Constant:
        return make_const(vars, n.value);
      case NodeKind::Coordinate:
        return vars.at(n.coord);
      case NodeKind::Add: {
        T r = eval_node(*n.children[0], vars);
        for (std::size_t i = 1; i < n.children.size(); ++i) r += eval_node(*n.children[i], vars);
        return r;
      }
      case NodeKind::Mul: {
        T r = eval_node(*n.children[0], vars);
        for (std::size_t i = 1; i < n.children.size(); ++i)
          r = r * eval_node(*n.children[i], vars);
        return r;
      }
      case NodeKind::Pow:
        return pow_impl(eval_node(*n.children[0], vars), n.exponent);
      case NodeKind::Sin:
        using std::sin;
        return sin(eval_node(*n.children[0], vars));
      case NodeKind::Cos:
        using std::cos;
        return cos(eval_node(*n.children[0], vars));
      case NodeKind::Exp:
        using std::exp;
        return exp(eval_node(*n.children[0], vars));
    }
    throw std::logic_error("unreachable expr node");
  }

  static double make_const(const std::vector<double>&, double v) { return v; }
  static Jet make_const(const std::vector<Jet>& vars, double v) {
    return Jet(vars.at(0).dim(), vars.at(0).order(), v);
  }
  static double pow_impl(double b, int e) { return std::pow(b, e); }
  static Jet pow_impl(const Jet& b, int e) { return folia::pow(b, e); }

  std::shared_ptr<const detail::Node> node_;
};

// ---------------------------------------------------------------------------
// Parser for chart-coefficient and test-function expressions.
// Grammar: sum of products of signed powers, with sin/cos/exp calls.
// Division is parsed as multiplication by an integer power of -1.
// ---------------------------------------------------------------------------

namespace detail {

class ExprParser {
public:
  ExprParser(const std::string& text, const std::vector<std::string>& vars)
      : s_(text), vars_(vars) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression parse error at position " << pos_ << ": " << what << " in '" << s_ << "'";
    throw std::invalid_argument(os.str());
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr e = accept('-') ? -parse_product() : parse_product();
    while (true) {
      if (accept('+'))
        e = e + parse_product();
      else if (accept('-'))
        e = e - parse_product();
      else
        return e;
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    while (true) {
      if (accept('*'))
        e = e * parse_unary();
      else if (accept('/'))
        e = e * Expr::pow(parse_unary(), -1);
      else
        return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) {
      bool neg = accept('-');
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected integer exponent");
      int e = std::stoi(s_.substr(start, pos_ - start));
      return Expr::pow(base, neg ? -e : e);
    }
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t consumed = 0;
      double v = std::stod(s_.substr(pos_), &consumed);
      pos_ += consumed;
      return Expr::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "pi") return Expr::constant(3.14159265358979323846);
      if (name == "sin" || name == "cos" || name == "exp") {
        if (!accept('(')) fail("expected '(' after function name");
        Expr arg = parse_sum();
        if (!accept(')')) fail("expected ')'");
        if (name == "sin") return Expr::sin(arg);
        if (name == "cos") return Expr::cos(arg);
        return Expr::exp(arg);
      }
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) return Expr::coord(static_cast<int>(i));
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::vector<std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(const std::string& text, const std::vector<std::string>& vars) {
  return detail::ExprParser(text, vars).parse();
}

// Random smooth test function: degree-<=3 polynomial terms in the chart
// coordinates, each optionally multiplied by sin/cos of a linear form.
// Coefficients uniform on [-1,1], fully determined by the generator state.
inline Expr random_test_function(int dim, std::mt19937& rng, int terms = 3) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(0, 3);
  std::uniform_int_distribution<int> which(0, dim - 1);
  std::uniform_int_distribution<int> trig(0, 2);
  Expr f = Expr::constant(0.0);
  for (int t = 0; t < terms; ++t) {
    Expr term = Expr::constant(unit(rng));
    int d = deg(rng);
    for (int k = 0; k < d; ++k) term = term * Expr::coord(which(rng));
    int mode = trig(rng);
    if (mode != 0) {
      Expr lin = Expr::constant(0.0);
      for (int i = 0; i < dim; ++i) lin = lin + Expr::constant(unit(rng)) * Expr::coord(i);
      term = term * (mode == 1 ? Expr::sin(lin) : Expr::cos(lin));
    }
    f = f + term;
  }
  return f;
}

}  // namespace folia
