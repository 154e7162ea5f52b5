#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace qcpinn::ad {

class Tape;

/// Scalar recorded on a Tape. A Var with index < 0 is a constant and costs
/// no tape entry; arithmetic between constants stays off the tape.
class Var {
 public:
  Var() = default;
  Var(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  double value() const noexcept { return value_; }
  std::int32_t index() const noexcept { return index_; }
  Tape* tape() const noexcept { return tape_; }
  bool is_constant() const noexcept { return index_ < 0; }

  Var& operator+=(const Var& o);
  Var& operator-=(const Var& o);
  Var& operator*=(const Var& o);

 private:
  friend class Tape;
  Var(Tape* tape, std::int32_t index, double v) : value_(v), index_(index), tape_(tape) {}

  double value_ = 0.0;
  std::int32_t index_ = -1;
  Tape* tape_ = nullptr;
};

/// Linear tape of at most binary nodes. Reverse sweep accumulates adjoints
/// in insertion order, so results are deterministic.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void reserve(std::size_t nodes) { nodes_.reserve(nodes); }
  void clear() {
    nodes_.clear();
    adjoints_.clear();
  }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// New independent variable.
  Var variable(double value);

  /// Node with one or two parents and their local partial derivatives.
  Var unary(double value, const Var& a, double da);
  Var binary(double value, const Var& a, double da, const Var& b, double db);

  /// Seeds d(output)/d(output) = 1 and sweeps backwards.
  void backward(const Var& output);

  /// Adjoint of a variable after backward(); 0 for constants.
  double adjoint(const Var& v) const {
    return v.is_constant() ? 0.0 : adjoints_[static_cast<std::size_t>(v.index())];
  }

 private:
  struct Node {
    std::int32_t a;
    std::int32_t b;
    double da;
    double db;
  };

  std::vector<Node> nodes_;
  std::vector<double> adjoints_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);

Var sin(const Var& a);
Var cos(const Var& a);
Var exp(const Var& a);
Var sqrt(const Var& a);
Var square(const Var& a);

inline double square(double a) { return a * a; }

inline double value_of(const Var& v) { return v.value(); }

}  // namespace qcpinn::ad
