#pragma once

// Trigonometric-polynomial expressions over the chart coordinates x0..x3.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('+' | '-') factor | power
//   power  := atom ('^' integer)?
//   atom   := number | 'pi' | ('sin' | 'cos') '(' affine ')' | '(' expr ')'
//
// Coordinates may appear only inside sin/cos, whose arguments must be affine
// in x. Divisors must be nonzero constants. Evaluation returns the value, gradient and Hessian exactly.

#include "swlab/grid.hpp"

#include <memory>
#include <optional>
#include <string>

namespace swlab::app {

class ParseError : public InvalidArgument {
 public:
  ParseError(const std::string& msg, int column)
      : InvalidArgument("parse error at column " + std::to_string(column) + ": " + msg), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

/// Value, gradient and Hessian at a point.
struct Jet {
  double v = 0.0;
  Vec4 g = Vec4::Zero();
  Mat4 h = Mat4::Zero();
};

class Expr {
 public:
  enum class Kind { constant, coordinate, add, sub, mul, neg, pow, sin, cos };

  static std::shared_ptr<const Expr> parse(const std::string& text);

  Kind kind() const { return kind_; }

  double value(const Vec4& x) const { return jet(x).v; }

  Jet jet(const Vec4& x) const {
    Jet out;
    switch (kind_) {
      case Kind::constant: out.v = c_; break;
      case Kind::coordinate:
        out.v = x(axis_);
        out.g(axis_) = 1.0;
        break;
      case Kind::add:
      case Kind::sub: {
        const Jet a = l_->jet(x), b = r_->jet(x);
        const double s = kind_ == Kind::add ? 1.0 : -1.0;
        out.v = a.v + s * b.v;
        out.g = a.g + s * b.g;
        out.h = a.h + s * b.h;
        break;
      }
      case Kind::mul: {
        const Jet a = l_->jet(x), b = r_->jet(x);
        out.v = a.v * b.v;
        out.g = a.v * b.g + b.v * a.g;
        out.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
        break;
      }
      case Kind::neg: {
        const Jet a = l_->jet(x);
        out.v = -a.v;
        out.g = -a.g;
        out.h = -a.h;
        break;
      }
      case Kind::pow: {
        const Jet a = l_->jet(x);
        const int n = exponent_;
        out.v = std::pow(a.v, n);
        const double d1 = n == 0 ? 0.0 : n * std::pow(a.v, n - 1);
        const double d2 = n < 2 ? 0.0 : n * (n - 1) * std::pow(a.v, n - 2);
        out.g = d1 * a.g;
        out.h = d1 * a.h + d2 * a.g * a.g.transpose();
        break;
      }
      case Kind::sin:
      case Kind::cos: {
        const double t = slope_.dot(x) + offset_;
        const double f = kind_ == Kind::sin ? std::sin(t) : std::cos(t);
        const double df = kind_ == Kind::sin ? std::cos(t) : -std::sin(t);
        out.v = f;
        out.g = df * slope_;
        out.h = -f * slope_ * slope_.transpose();
        break;
      }
    }
    return out;
  }

  /// Throws unless every sin/cos argument is periodic on the chart.
  void require_periodic(const GridSpec& g) const {
    if (kind_ == Kind::sin || kind_ == Kind::cos) {
      for (int k = 0; k < 4; ++k) {
        const double turns = slope_(k) * g.period(k) / (2 * kPi);
        if (std::abs(turns - std::round(turns)) > 1e-9) {
          throw ParseError("argument of " + std::string(kind_ == Kind::sin ? "sin" : "cos") +
                               " is not periodic in x" + std::to_string(k) + " on this chart",
                           column_);
        }
      }
    }
    if (l_) l_->require_periodic(g);
    if (r_) r_->require_periodic(g);
  }

  /// True when the expression does not involve the given axis.
  bool independent_of(int axis) const {
    if ((kind_ == Kind::sin || kind_ == Kind::cos) && slope_(axis) != 0.0) return false;
    return (!l_ || l_->independent_of(axis)) && (!r_ || r_->independent_of(axis));
  }

  ScalarField sample(const GridSpec& g) const {
    return generate(g, [this](const Vec4& x) { return value(x); });
  }

 private:
  friend class ExprParser;
  Kind kind_ = Kind::constant;
  double c_ = 0.0;
  int axis_ = 0;
  int exponent_ = 1;
  Vec4 slope_ = Vec4::Zero();
  double offset_ = 0.0;
  int column_ = 1;
  std::shared_ptr<const Expr> l_, r_;
};

using ExprPtr = std::shared_ptr<const Expr>;

class ExprParser {
 public:
  explicit ExprParser(std::string text) : s_(std::move(text)) {}

  ExprPtr parse() {
    auto e = parse_expr();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    require_no_free_coordinates(*e);
    return e;
  }

 private:
  struct Affine {
    Vec4 slope = Vec4::Zero();
    double offset = 0.0;
  };

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, int(pos_) + 1); }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static std::shared_ptr<Expr> node(Expr::Kind k, int column) {
    auto e = std::make_shared<Expr>();
    e->kind_ = k;
    e->column_ = column;
    return e;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      skip_space();
      const int col = int(pos_) + 1;
      if (accept('+') || (pos_ < s_.size() && s_[pos_] == '-' && accept('-'))) {
        const bool plus = s_[pos_ - 1] == '+';
        auto e = node(plus ? Expr::Kind::add : Expr::Kind::sub, col);
        e->l_ = lhs;
        e->r_ = parse_term();
        lhs = e;
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      skip_space();
      const int col = int(pos_) + 1;
      const bool divide = accept('/');
      if (!divide && !accept('*')) return lhs;
      auto e = node(Expr::Kind::mul, col);
      e->l_ = lhs;
      skip_space();
      const std::size_t rhs_start = pos_;
      e->r_ = parse_factor();
      if (divide) {
        const auto d = affine(*e->r_);
        if (!d || !d->slope.isZero() || d->offset == 0.0) {
          pos_ = rhs_start;
          fail("divisor must be a nonzero constant");
        }
        auto inv = node(Expr::Kind::constant, int(rhs_start) + 1);
        inv->c_ = 1.0 / d->offset;
        e->r_ = inv;
      }
      lhs = e;
    }
  }

  ExprPtr parse_factor() {
    skip_space();
    const int col = int(pos_) + 1;
    if (accept('+')) return parse_factor();
    if (accept('-')) {
      auto e = node(Expr::Kind::neg, col);
      e->l_ = parse_factor();
      return e;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    skip_space();
    const int col = int(pos_) + 1;
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a non-negative integer exponent");
    auto e = node(Expr::Kind::pow, col);
    e->l_ = base;
    e->exponent_ = std::stoi(s_.substr(start, pos_ - start));
    return e;
  }

  ExprPtr parse_atom() {
    skip_space();
    const int col = int(pos_) + 1;
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      auto e = node(Expr::Kind::constant, col);
      e->c_ = v;
      return e;
    }
    if (accept('(')) {
      auto e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "pi") {
        auto e = node(Expr::Kind::constant, col);
        e->c_ = kPi;
        return e;
      }
      if (id.size() == 2 && id[0] == 'x' && id[1] >= '0' && id[1] <= '3') {
        auto e = node(Expr::Kind::coordinate, col);
        e->axis_ = id[1] - '0';
        return e;
      }
      if (id == "sin" || id == "cos") {
        expect('(');
        const std::size_t arg_start = pos_;
        auto arg = parse_expr();
        const auto aff = affine(*arg);
        if (!aff) {
          pos_ = arg_start;
          skip_space();
          fail("argument of " + id + " must be affine in x0..x3");
        }
        expect(')');
        auto e = node(id == "sin" ? Expr::Kind::sin : Expr::Kind::cos, col);
        e->slope_ = aff->slope;
        e->offset_ = aff->offset;
        return e;
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  static std::optional<Affine> affine(const Expr& e) {
    switch (e.kind_) {
      case Expr::Kind::constant: return Affine{Vec4::Zero(), e.c_};
      case Expr::Kind::coordinate: return Affine{Vec4::Unit(e.axis_), 0.0};
      case Expr::Kind::add:
      case Expr::Kind::sub: {
        auto a = affine(*e.l_), b = affine(*e.r_);
        if (!a || !b) return std::nullopt;
        const double s = e.kind_ == Expr::Kind::add ? 1.0 : -1.0;
        return Affine{a->slope + s * b->slope, a->offset + s * b->offset};
      }
      case Expr::Kind::neg: {
        auto a = affine(*e.l_);
        if (!a) return std::nullopt;
        return Affine{-a->slope, -a->offset};
      }
      case Expr::Kind::mul: {
        auto a = affine(*e.l_), b = affine(*e.r_);
        if (!a || !b) return std::nullopt;
        if (a->slope.isZero()) return Affine{a->offset * b->slope, a->offset * b->offset};
        if (b->slope.isZero()) return Affine{b->offset * a->slope, b->offset * a->offset};
        return std::nullopt;
      }
      case Expr::Kind::pow: {
        auto a = affine(*e.l_);
        if (!a) return std::nullopt;
        if (e.exponent_ == 1) return a;
        if (a->slope.isZero()) return Affine{Vec4::Zero(), std::pow(a->offset, e.exponent_)};
        return std::nullopt;
      }
      case Expr::Kind::sin:
      case Expr::Kind::cos: return std::nullopt;
    }
    return std::nullopt;
  }

  static void require_no_free_coordinates(const Expr& e) {
    if (e.kind_ == Expr::Kind::coordinate) {
      throw ParseError("x" + std::to_string(e.axis_) + " may appear only inside sin or cos", e.column_);
    }
    if (e.l_) require_no_free_coordinates(*e.l_);
    if (e.r_) require_no_free_coordinates(*e.r_);
  }

  std::string s_;
  std::size_t pos_ = 0;
};

inline ExprPtr Expr::parse(const std::string& text) { return ExprParser(text).parse(); }

}  // namespace swlab::app
