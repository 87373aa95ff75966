#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jacobi_spectral/errors.hpp"
#include "jacobi_spectral/expansion.hpp"
#include "jacobi_spectral/quadrature.hpp"

namespace jacobi_spectral {

// Polynomial in x0..x{d-1} stored as exponent vector -> coefficient.
class Polynomial {
 public:
  using Terms = std::map<std::vector<int>, double>;

  explicit Polynomial(std::size_t d) : d_(d) {}

  static Polynomial constant(std::size_t d, double c) {
    Polynomial p(d);
    if (c != 0.0) p.terms_[std::vector<int>(d, 0)] = c;
    return p;
  }
  static Polynomial variable(std::size_t d, std::size_t i) {
    Polynomial p(d);
    std::vector<int> e(d, 0);
    e.at(i) = 1;
    p.terms_[e] = 1.0;
    return p;
  }

  std::size_t dim() const noexcept { return d_; }
  const Terms& terms() const noexcept { return terms_; }

  int degree() const {
    int deg = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int k : e) s += k;
      deg = std::max(deg, s);
    }
    return deg;
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != d_) throw ShapeError("polynomial evaluated at a point of the wrong dimension");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
      double term = c;
      for (std::size_t i = 0; i < d_; ++i) term *= std::pow(x[i], e[i]);
      sum += term;
    }
    return sum;
  }

  Polynomial operator+(const Polynomial& o) const {
    Polynomial out = *this;
    for (const auto& [e, c] : o.terms_) out.terms_[e] += c;
    return out;
  }
  Polynomial operator*(double s) const {
    Polynomial out(d_);
    for (const auto& [e, c] : terms_) out.terms_[e] = c * s;
    return out;
  }
  Polynomial operator-(const Polynomial& o) const { return *this + o * -1.0; }
  Polynomial operator*(const Polynomial& o) const {
    Polynomial out(d_);
    for (const auto& [e1, c1] : terms_) {
      for (const auto& [e2, c2] : o.terms_) {
        std::vector<int> e(d_);
        for (std::size_t i = 0; i < d_; ++i) e[i] = e1[i] + e2[i];
        out.terms_[e] += c1 * c2;
      }
    }
    return out;
  }

 private:
  std::size_t d_;
  Terms terms_;
};

namespace detail {

// expr := term (('+'|'-') term)* ; term := unary ('*' unary)* ;
// unary := ('+'|'-') unary | power ; power := primary ('^' int)? ;
// primary := number | 'x' int | '(' expr ')'
class PolynomialParser {
 public:
  PolynomialParser(std::string_view text, std::size_t d) : text_(text), d_(d) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ArgumentError("cannot parse polynomial '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " +
                        what);
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  int integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    if (pos_ - start > 6) fail("integer too large");
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
  }

  Polynomial expr() {
    Polynomial p = term();
    for (;;) {
      if (accept('+')) {
        p = p + term();
      } else if (accept('-')) {
        p = p - term();
      } else {
        return p;
      }
    }
  }
  Polynomial term() {
    Polynomial p = unary();
    while (accept('*')) p = p * unary();
    return p;
  }
  Polynomial unary() {
    if (accept('-')) return unary() * -1.0;
    if (accept('+')) return unary();
    return power();
  }
  Polynomial power() {
    Polynomial base = primary();
    if (!accept('^')) return base;
    const int k = integer();
    if (k > 64) fail("exponent too large");
    Polynomial out = Polynomial::constant(d_, 1.0);
    for (int i = 0; i < k; ++i) out = out * base;
    return out;
  }
  Polynomial primary() {
    skip();
    if (accept('(')) {
      Polynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (pos_ < text_.size() && text_[pos_] == 'x') {
      ++pos_;
      const int i = integer();
      if (static_cast<std::size_t>(i) >= d_) fail("variable x" + std::to_string(i) + " exceeds dimension");
      return Polynomial::variable(d_, static_cast<std::size_t>(i));
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == 'e' ||
            text_[pos_] == 'E' ||
            ((text_[pos_] == '-' || text_[pos_] == '+') && pos_ > start &&
             (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    if (start == pos_) fail("expected a number, a variable or '('");
    const std::string lit(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(lit.c_str(), &end);
    if (end != lit.c_str() + lit.size() || !std::isfinite(v)) fail("bad number '" + lit + "'");
    return Polynomial::constant(d_, v);
  }

  std::string_view text_;
  std::size_t d_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses e.g. "x0*x1", "1 + 2*x0^2 - (x1 - 0.5)^3" over x0..x{d-1}.
inline Polynomial parse_polynomial(std::string_view text, std::size_t d) {
  return detail::PolynomialParser(text, d).parse();
}

// Coefficients of p up to the table's degree, from a rule exact for deg(p) + N.
inline Expansion expand_polynomial(const Polynomial& p, TablePtr table) {
  const int N = table->max_degree();
  const int m = std::max(N + 1, (p.degree() + N) / 2 + 1);
  const auto rule = tensor_rule(table->params(), std::vector<int>(table->dim(), m));
  return analyze(p, std::move(table), rule);
}

}  // namespace jacobi_spectral
