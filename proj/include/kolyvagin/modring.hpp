#pragma once

// Exact arithmetic in Z/m and its quotients Z/d, d | m.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

namespace kolyvagin {

using Int = std::int64_t;

/// Raised when two values that must share a ring (or an ambient site set)
/// do not.
class TypeMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Canonical representative of x in [0, d).
inline Int mod(Int x, Int d) {
  if (d <= 0) throw std::invalid_argument("modulus must be positive, got " + std::to_string(d));
  Int r = x % d;
  return r < 0 ? r + d : r;
}

inline Int mulmod(Int a, Int b, Int d) {
  return static_cast<Int>(mod(static_cast<Int>((static_cast<__int128>(a) * b) % d), d));
}

inline Int gcd(Int a, Int b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

/// Extended gcd: returns (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0.
inline std::tuple<Int, Int, Int> egcd(Int a, Int b) {
  Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

/// Inverse of a modulo d; throws if a is not a unit.
inline Int inverse_mod(Int a, Int d) {
  auto [g, s, t] = egcd(mod(a, d), d);
  (void)t;
  if (g != 1) throw std::domain_error(std::to_string(a) + " is not invertible mod " + std::to_string(d));
  return mod(s, d);
}

/// A unit u of Z/m with u*a = gcd(a, m) (mod m). Returns 1 when a = 0.
inline Int unit_normalizer(Int a, Int m) {
  a = mod(a, m);
  if (a == 0) return 1;
  Int g = gcd(a, m);
  Int mg = m / g;
  if (mg == 1) return 1;
  Int u = inverse_mod(a / g, mg);
  // u is only determined mod m/g; pick a lift coprime to m.
  while (gcd(u, m) != 1) u += mg;
  return mod(u, m);
}

/// The ring O = Z/m, m >= 2.
class Modulus {
 public:
  explicit Modulus(Int m) : m_(m) {
    if (m < 2) throw std::invalid_argument("modulus must be >= 2, got " + std::to_string(m));
  }
  Int value() const { return m_; }
  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  Int m_;
};

/// An element of Z/d. The divisor travels with the value so that elements of
/// the quotients O/(t) are first-class.
class Residue {
 public:
  Residue(Int value, Int divisor) : divisor_(divisor) {
    if (divisor < 1) throw std::invalid_argument("invalid modulus " + std::to_string(divisor));
    value_ = mod(value, divisor);
  }

  Int value() const { return value_; }
  Int divisor() const { return divisor_; }

  friend Residue operator+(const Residue& a, const Residue& b) {
    check(a, b);
    return {a.value_ + b.value_, a.divisor_};
  }
  friend Residue operator-(const Residue& a, const Residue& b) {
    check(a, b);
    return {a.value_ - b.value_, a.divisor_};
  }
  friend Residue operator*(const Residue& a, const Residue& b) {
    check(a, b);
    return {mulmod(a.value_, b.value_, a.divisor_), a.divisor_};
  }
  Residue operator-() const { return {-value_, divisor_}; }
  friend bool operator==(const Residue&, const Residue&) = default;

 private:
  static void check(const Residue& a, const Residue& b) {
    if (a.divisor_ != b.divisor_)
      throw TypeMismatch("residues mod " + std::to_string(a.divisor_) + " and mod " +
                         std::to_string(b.divisor_) + " cannot be combined");
  }

  Int value_;
  Int divisor_;
};

inline Residue reduce(Int x, Int d) {
  if (d < 1) throw std::invalid_argument("invalid modulus " + std::to_string(d));
  return {x, d};
}

/// Generator of the ideal (t) in Z/m: O/(t) is canonically Z/gcd(t, m).
inline Int ideal_content(Int t, const Modulus& m) {
  if (t < 1) throw std::invalid_argument("ideal generator must be >= 1");
  return gcd(t, m.value());
}

enum class RingOp { Add, Sub, Mul, Neg };

/// Neg ignores b.
inline Residue ring_op(const Residue& a, const Residue& b, RingOp op) {
  switch (op) {
    case RingOp::Add: return a + b;
    case RingOp::Sub: return a - b;
    case RingOp::Mul: return a * b;
    case RingOp::Neg: return -a;
  }
  throw std::invalid_argument("unknown ring op");
}

}  // namespace kolyvagin
