#pragma once

#include <cmath>
#include <concepts>

namespace qcpinn::ad {

// Forward-mode dual number: value + eps * derivative, eps^2 = 0.
// Nesting Dual<Dual<double>> gives exact second derivatives.
template <typename T = double>
struct Dual {
  T value{};
  T deriv{};

  constexpr Dual() = default;
  constexpr Dual(T v) : value(v), deriv(T{}) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T v, T d) : value(v), deriv(d) {}
  template <std::floating_point U>
    requires(!std::same_as<U, T>)
  constexpr Dual(U v) : value(T(v)), deriv(T{}) {}  // NOLINT(google-explicit-constructor)

  static constexpr Dual variable(T v) { return Dual(v, T{1}); }

  constexpr Dual& operator+=(const Dual& o) {
    value += o.value;
    deriv += o.deriv;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    value -= o.value;
    deriv -= o.deriv;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    deriv = deriv * o.value + value * o.deriv;
    value *= o.value;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    *this = *this / o;
    return *this;
  }

  friend constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend constexpr Dual operator/(const Dual& a, const Dual& b) {
    return Dual(a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value));
  }
  friend constexpr Dual operator-(const Dual& a) { return Dual(-a.value, -a.deriv); }

  friend constexpr bool operator<(const Dual& a, const Dual& b) { return a.value < b.value; }
  friend constexpr bool operator>(const Dual& a, const Dual& b) { return a.value > b.value; }
};

template <typename T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.value), cos(a.value) * a.deriv};
}

template <typename T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.value), -sin(a.value) * a.deriv};
}

template <typename T>
Dual<T> tan(const Dual<T>& a) {
  using std::tan;
  T t = tan(a.value);
  return {t, (T{1} + t * t) * a.deriv};
}

template <typename T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.value);
  return {e, e * a.deriv};
}

template <typename T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.value);
  return {s, a.deriv / (T{2} * s)};
}

template <typename T>
Dual<T> atan(const Dual<T>& a) {
  using std::atan;
  return {atan(a.value), a.deriv / (T{1} + a.value * a.value)};
}

template <typename T>
Dual<T> cosh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return {cosh(a.value), sinh(a.value) * a.deriv};
}

template <typename T>
Dual<T> sinh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return {sinh(a.value), cosh(a.value) * a.deriv};
}

template <typename T>
Dual<T> pow(const Dual<T>& a, int n) {
  using std::pow;
  return {pow(a.value, n), T(n) * pow(a.value, n - 1) * a.deriv};
}

// Plain value of a (possibly nested) dual.
inline double value_of(double x) { return x; }
template <typename T>
double value_of(const Dual<T>& x) {
  return value_of(x.value);
}

}  // namespace qcpinn::ad
