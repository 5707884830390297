#pragma once

// q-number arithmetic at a fixed real deformation parameter q > 0, q != 1.
//
// Every argument is a HalfInt so that q^{1/2} bookkeeping never goes through
// floating parity tests.

#include <cmath>
#include <compare>
#include <cstdlib>
#include <string>

#include "qso/errors.hpp"

namespace qso {

/// An exact element of (1/2)Z, stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr HalfInt(int value) : twice_(2 * value) {}  // NOLINT: implicit by intent

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  static constexpr HalfInt half() { return from_twice(1); }

  constexpr int twice() const { return twice_; }
  constexpr bool is_integral() const { return twice_ % 2 == 0; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr HalfInt abs() const { return from_twice(twice_ < 0 ? -twice_ : twice_); }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt& operator+=(HalfInt o) {
    twice_ += o.twice_;
    return *this;
  }
  constexpr HalfInt& operator-=(HalfInt o) {
    twice_ -= o.twice_;
    return *this;
  }
  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return a += b; }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return a -= b; }
  friend constexpr HalfInt operator*(int k, HalfInt a) { return from_twice(k * a.twice_); }

  friend constexpr bool operator==(HalfInt, HalfInt) = default;
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

  /// "3/2", "-1/2", "2".
  std::string str() const {
    if (is_integral()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

  /// Parses "2", "-3", "3/2", "-1/2", "1.5".
  static HalfInt parse(const std::string& text) {
    auto fail = [&] { throw ValidationError("malformed half-integer '" + text + "'"); };
    if (text.empty()) fail();
    auto to_int = [&](const std::string& s) {
      if (s.empty()) fail();
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(s, &pos);
      } catch (const std::exception&) {
        fail();
      }
      if (pos != s.size()) fail();
      return v;
    };
    if (auto slash = text.find('/'); slash != std::string::npos) {
      int num = to_int(text.substr(0, slash));
      int den = to_int(text.substr(slash + 1));
      if (den == 1) return HalfInt(num);
      if (den != 2) fail();
      return from_twice(num);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
      std::string frac = text.substr(dot + 1);
      std::string whole = text.substr(0, dot);
      bool negative = !whole.empty() && whole[0] == '-';
      int w = (whole.empty() || whole == "-") ? 0 : to_int(whole);
      if (frac.find_first_not_of('0') == std::string::npos) return HalfInt(w);
      if (frac.find_first_not_of('0', 1) != std::string::npos || frac[0] != '5') fail();
      int t = 2 * std::abs(w) + 1;
      return from_twice(negative ? -t : t);
    }
    return HalfInt(to_int(text));
  }

 private:
  int twice_ = 0;
};

/// Evaluation point and tolerances.
struct QContext {
  double q = 1.3;
  double tol_abs = 1e-9;
  double tol_rel = 1e-9;

  QContext() = default;
  explicit QContext(double q_, double tol_abs_ = 1e-9, double tol_rel_ = 1e-9)
      : q(q_), tol_abs(tol_abs_), tol_rel(tol_rel_) {
    validate();
  }

  void validate() const {
    if (!(q > 0.0) || !std::isfinite(q)) throw ValidationError("q must be a positive real number");
    if (std::abs(q - 1.0) <= 1e-12) throw ValidationError("q must differ from 1");
    if (!(tol_abs > 0.0) || !(tol_rel > 0.0)) throw ValidationError("tolerances must be positive");
  }

  double log_q() const { return std::log(q); }
  double tol(double scale) const { return tol_abs + tol_rel * scale; }
  bool within(double residual, double scale) const { return residual <= tol(scale); }
};

/// q^a.
inline double q_power(HalfInt a, const QContext& ctx) {
  if (a.twice() == 0) return 1.0;
  return std::exp(a.value() * ctx.log_q());
}

/// [a] = (q^a - q^{-a}) / (q - q^{-1}); exactly 0 for a = 0.
inline double q_bracket(HalfInt a, const QContext& ctx) {
  if (a.twice() == 0) return 0.0;
  const double h = ctx.log_q();
  return std::sinh(a.value() * h) / std::sinh(h);
}

/// [a]_+ = (q^a + q^{-a}) / (q - q^{-1}).
inline double q_bracket_plus(HalfInt a, const QContext& ctx) {
  const double h = ctx.log_q();
  return std::cosh(a.value() * h) / std::sinh(h);
}

/// q^a - q^{-a}.
inline double q_diff(HalfInt a, const QContext& ctx) {
  if (a.twice() == 0) return 0.0;
  return 2.0 * std::sinh(a.value() * ctx.log_q());
}

/// q^a + q^{-a}.
inline double q_sum(HalfInt a, const QContext& ctx) {
  return 2.0 * std::cosh(a.value() * ctx.log_q());
}

}  // namespace qso
