#include "qcpinn/ad/tape.hpp"

#include <cassert>
#include <cmath>

namespace qcpinn::ad {

namespace {

Tape* tape_of(const Var& a, const Var& b) { return a.tape() != nullptr ? a.tape() : b.tape(); }

}  // namespace

Var Tape::variable(double value) {
  nodes_.push_back({-1, -1, 0.0, 0.0});
  return Var(this, static_cast<std::int32_t>(nodes_.size() - 1), value);
}

Var Tape::unary(double value, const Var& a, double da) {
  if (a.is_constant()) return Var(value);
  nodes_.push_back({a.index(), -1, da, 0.0});
  return Var(this, static_cast<std::int32_t>(nodes_.size() - 1), value);
}

Var Tape::binary(double value, const Var& a, double da, const Var& b, double db) {
  if (a.is_constant() && b.is_constant()) return Var(value);
  if (a.is_constant()) return unary(value, b, db);
  if (b.is_constant()) return unary(value, a, da);
  nodes_.push_back({a.index(), b.index(), da, db});
  return Var(this, static_cast<std::int32_t>(nodes_.size() - 1), value);
}

void Tape::backward(const Var& output) {
  adjoints_.assign(nodes_.size(), 0.0);
  if (output.is_constant()) return;
  assert(output.tape() == this);
  adjoints_[static_cast<std::size_t>(output.index())] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const double g = adjoints_[i];
    if (g == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.a >= 0) adjoints_[static_cast<std::size_t>(n.a)] += g * n.da;
    if (n.b >= 0) adjoints_[static_cast<std::size_t>(n.b)] += g * n.db;
  }
}

Var& Var::operator+=(const Var& o) { return *this = *this + o; }
Var& Var::operator-=(const Var& o) { return *this = *this - o; }
Var& Var::operator*=(const Var& o) { return *this = *this * o; }

Var operator+(const Var& a, const Var& b) {
  Tape* t = tape_of(a, b);
  const double v = a.value() + b.value();
  return t ? t->binary(v, a, 1.0, b, 1.0) : Var(v);
}

Var operator-(const Var& a, const Var& b) {
  Tape* t = tape_of(a, b);
  const double v = a.value() - b.value();
  return t ? t->binary(v, a, 1.0, b, -1.0) : Var(v);
}

Var operator*(const Var& a, const Var& b) {
  Tape* t = tape_of(a, b);
  const double v = a.value() * b.value();
  return t ? t->binary(v, a, b.value(), b, a.value()) : Var(v);
}

Var operator/(const Var& a, const Var& b) {
  Tape* t = tape_of(a, b);
  const double inv = 1.0 / b.value();
  const double v = a.value() * inv;
  return t ? t->binary(v, a, inv, b, -v * inv) : Var(v);
}

Var operator-(const Var& a) {
  return a.tape() ? a.tape()->unary(-a.value(), a, -1.0) : Var(-a.value());
}

Var sin(const Var& a) {
  const double v = std::sin(a.value());
  return a.tape() ? a.tape()->unary(v, a, std::cos(a.value())) : Var(v);
}

Var cos(const Var& a) {
  const double v = std::cos(a.value());
  return a.tape() ? a.tape()->unary(v, a, -std::sin(a.value())) : Var(v);
}

Var exp(const Var& a) {
  const double v = std::exp(a.value());
  return a.tape() ? a.tape()->unary(v, a, v) : Var(v);
}

Var sqrt(const Var& a) {
  const double v = std::sqrt(a.value());
  return a.tape() ? a.tape()->unary(v, a, 0.5 / v) : Var(v);
}

Var square(const Var& a) {
  const double v = a.value() * a.value();
  return a.tape() ? a.tape()->unary(v, a, 2.0 * a.value()) : Var(v);
}

}  // namespace qcpinn::ad
