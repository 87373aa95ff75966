#pragma once

#include <boost/rational.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jacobi_spectral/errors.hpp"

namespace jacobi_spectral {

using Rational = boost::rational<std::int64_t>;

namespace detail {

inline std::int64_t parse_int64(std::string_view text) {
  std::int64_t value = 0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ArgumentError("cannot parse integer '" + std::string(text) + "'");
  }
  return value;
}

// Decimal literal without exponent, e.g. "-0.25" -> -1/4. Returns nullopt when
// the literal has an exponent or does not fit in 64-bit numerator/denominator.
inline std::optional<Rational> parse_decimal_rational(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    seen_digit = true;
    if (numerator > (INT64_MAX - 9) / 10) return std::nullopt;
    numerator = numerator * 10 + (c - '0');
    if (seen_point) {
      if (denominator > INT64_MAX / 10) return std::nullopt;
      denominator *= 10;
    }
  }
  if (!seen_digit) return std::nullopt;
  Rational r(numerator, denominator);
  return negative ? -r : r;
}

}  // namespace detail

// A real scalar given either as a plain double or as an exact rational
// ("1/2", "0.25"). The double is always the nearest value to the rational.
struct ExactReal {
  double value = 0.0;
  std::optional<Rational> exact;

  static ExactReal parse(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) throw ArgumentError("empty numeric literal");
    ExactReal out;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      auto num = detail::parse_int64(text.substr(0, slash));
      auto den = detail::parse_int64(text.substr(slash + 1));
      if (den == 0) throw ArgumentError("zero denominator in '" + std::string(text) + "'");
      out.exact = Rational(num, den);
      out.value = static_cast<double>(out.exact->numerator()) /
                  static_cast<double>(out.exact->denominator());
      return out;
    }
    std::string owned(text);
    char* end = nullptr;
    out.value = std::strtod(owned.c_str(), &end);
    if (end != owned.c_str() + owned.size() || !std::isfinite(out.value)) {
      throw ArgumentError("cannot parse number '" + owned + "'");
    }
    out.exact = detail::parse_decimal_rational(text);
    return out;
  }
};

// One coordinate's (alpha, beta). The measure is finite iff both exceed -1.
class ParamPair {
 public:
  ParamPair(double alpha, double beta) : alpha_(alpha), beta_(beta) { validate(); }

  ParamPair(ExactReal alpha, ExactReal beta)
      : alpha_(alpha.value), beta_(beta.value), alpha_exact_(alpha.exact), beta_exact_(beta.exact) {
    if (!alpha_exact_ || !beta_exact_) {
      alpha_exact_.reset();
      beta_exact_.reset();
    }
    validate();
  }

  static ParamPair parse(std::string_view alpha, std::string_view beta) {
    return ParamPair(ExactReal::parse(alpha), ExactReal::parse(beta));
  }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  bool is_exact() const noexcept { return alpha_exact_.has_value(); }
  const std::optional<Rational>& alpha_exact() const noexcept { return alpha_exact_; }
  const std::optional<Rational>& beta_exact() const noexcept { return beta_exact_; }

  // alpha, beta > -1/2: the region where the semigroup theory applies.
  bool semigroup_admissible() const noexcept { return alpha_ > -0.5 && beta_ > -0.5; }

  // (alpha + k, beta + k); used by the derivative identities.
  ParamPair shifted(int k) const {
    ParamPair out = *this;
    out.alpha_ += k;
    out.beta_ += k;
    if (out.alpha_exact_) {
      *out.alpha_exact_ += k;
      *out.beta_exact_ += k;
    }
    return out;
  }

  friend bool operator==(const ParamPair& a, const ParamPair& b) noexcept {
    return a.alpha_ == b.alpha_ && a.beta_ == b.beta_;
  }

 private:
  void validate() const {
    if (!(alpha_ > -1.0) || !(beta_ > -1.0) || !std::isfinite(alpha_) || !std::isfinite(beta_)) {
      std::ostringstream msg;
      msg << "Jacobi parameters must satisfy alpha > -1 and beta > -1 (got alpha=" << alpha_
          << ", beta=" << beta_ << ")";
      throw DomainError(msg.str());
    }
  }

  double alpha_;
  double beta_;
  std::optional<Rational> alpha_exact_;
  std::optional<Rational> beta_exact_;
};

// The parameter vectors alpha, beta of a d-dimensional Jacobi measure.
class Params {
 public:
  explicit Params(std::vector<ParamPair> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw ShapeError("Params requires dimension d >= 1");
  }

  Params(const std::vector<double>& alpha, const std::vector<double>& beta)
      : Params(zip(alpha, beta)) {}

  static Params parse(const std::vector<std::string>& alpha, const std::vector<std::string>& beta) {
    if (alpha.size() != beta.size()) {
      throw ShapeError("alpha and beta must have equal length (got " + std::to_string(alpha.size()) +
                       " and " + std::to_string(beta.size()) + ")");
    }
    std::vector<ParamPair> pairs;
    for (std::size_t i = 0; i < alpha.size(); ++i) pairs.push_back(ParamPair::parse(alpha[i], beta[i]));
    return Params(std::move(pairs));
  }

  std::size_t dim() const noexcept { return pairs_.size(); }
  const ParamPair& operator[](std::size_t i) const { return pairs_[i]; }
  const std::vector<ParamPair>& pairs() const noexcept { return pairs_; }

  bool is_exact() const noexcept {
    for (const auto& p : pairs_)
      if (!p.is_exact()) return false;
    return true;
  }

  bool semigroup_admissible() const noexcept {
    for (const auto& p : pairs_)
      if (!p.semigroup_admissible()) return false;
    return true;
  }

  void require_semigroup_admissible() const {
    if (!semigroup_admissible()) {
      throw DomainError("semigroup operators require alpha_i, beta_i > -1/2 (params " + summary() + ")");
    }
  }

  // Shift coordinate j by k in both alpha and beta.
  Params shifted(std::size_t j, int k) const {
    auto pairs = pairs_;
    pairs.at(j) = pairs_[j].shifted(k);
    return Params(std::move(pairs));
  }

  std::string summary() const {
    std::ostringstream out;
    out << "alpha=(";
    for (std::size_t i = 0; i < pairs_.size(); ++i) out << (i ? " " : "") << pairs_[i].alpha();
    out << ") beta=(";
    for (std::size_t i = 0; i < pairs_.size(); ++i) out << (i ? " " : "") << pairs_[i].beta();
    out << ")";
    return out.str();
  }

  friend bool operator==(const Params& a, const Params& b) noexcept { return a.pairs_ == b.pairs_; }

 private:
  static std::vector<ParamPair> zip(const std::vector<double>& alpha, const std::vector<double>& beta) {
    if (alpha.size() != beta.size()) {
      throw ShapeError("alpha and beta must have equal length");
    }
    std::vector<ParamPair> pairs;
    for (std::size_t i = 0; i < alpha.size(); ++i) pairs.emplace_back(alpha[i], beta[i]);
    return pairs;
  }

  std::vector<ParamPair> pairs_;
};

}  // namespace jacobi_spectral
