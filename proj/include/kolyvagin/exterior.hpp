#pragma once

// Exterior powers of a free O-module H with a fixed basis e_0..e_{h-1},
// tensored with the graded algebra, and the contraction calculus
//   f(m_1 ^ ... ^ m_r) = sum_i (-1)^(i-1) m_1 ^ .. ^ m_i-hat ^ .. ^ m_r (x) f(m_i).

#include <bit>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graded.hpp"
#include "linalg.hpp"

namespace kolyvagin {

/// Strictly increasing index tuple of basis vectors, as a bit set.
using BasisMask = std::uint32_t;

inline std::vector<int> basis_indices(BasisMask b) { return members(b); }

/// Element of (Lambda^r H) (x) G.
class WedgeTensor {
 public:
  WedgeTensor(SiteSetPtr ambient, int h, int rank) : ambient_(std::move(ambient)), h_(h), rank_(rank) {
    if (!ambient_) throw std::invalid_argument("null site set");
    if (h < 0 || h > 30) throw std::invalid_argument("H rank must lie in [0, 30]");
    if (rank < 0) throw std::invalid_argument("negative exterior rank");
  }

  /// The scalar c in Lambda^0 H = O.
  static WedgeTensor scalar(SiteSetPtr ambient, int h, const GradedElement& c) {
    WedgeTensor w(std::move(ambient), h, 0);
    w.add(0, c);
    return w;
  }

  const SiteSetPtr& ambient() const { return ambient_; }
  int h_rank() const { return h_; }
  int rank() const { return rank_; }
  const std::map<BasisMask, GradedElement>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  GradedElement coefficient(BasisMask b) const {
    auto it = coeffs_.find(b);
    return it == coeffs_.end() ? GradedElement(ambient_) : it->second;
  }

  void add(BasisMask b, const GradedElement& c) {
    if (std::popcount(b) != rank_) throw std::invalid_argument("basis tuple has the wrong length");
    if (h_ < 32 && (b >> h_) != 0) throw std::invalid_argument("basis index out of range");
    require_same_ambient(ambient_, c.ambient());
    if (c.is_zero()) return;
    auto it = coeffs_.find(b);
    if (it == coeffs_.end()) {
      coeffs_.emplace(b, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
  }

  /// Applies f to every coefficient, dropping zeros.
  template <class F>
  WedgeTensor map(F&& f) const {
    WedgeTensor out(ambient_, h_, rank_);
    for (const auto& [b, c] : coeffs_) out.add(b, f(c));
    return out;
  }

  WedgeTensor& operator+=(const WedgeTensor& o) {
    check_shape(o);
    for (const auto& [b, c] : o.coeffs_) add(b, c);
    return *this;
  }
  WedgeTensor& operator-=(const WedgeTensor& o) {
    check_shape(o);
    for (const auto& [b, c] : o.coeffs_) add(b, -c);
    return *this;
  }
  friend WedgeTensor operator+(WedgeTensor a, const WedgeTensor& b) { return a += b; }
  friend WedgeTensor operator-(WedgeTensor a, const WedgeTensor& b) { return a -= b; }
  WedgeTensor operator-() const {
    return map([](const GradedElement& c) { return -c; });
  }

  friend WedgeTensor operator*(const WedgeTensor& w, const GradedElement& g) {
    return w.map([&](const GradedElement& c) { return c * g; });
  }
  friend WedgeTensor operator*(const GradedElement& g, const WedgeTensor& w) { return w * g; }
  WedgeTensor scaled(Int c) const {
    return map([&](const GradedElement& x) { return x.scaled(c); });
  }

  /// Image in (Lambda^r H) (x) G (x) O/(d).
  WedgeTensor reduced_mod(Int d) const {
    return map([&](const GradedElement& x) { return x.reduced_mod(d); });
  }

  /// Whether every coefficient is homogeneous of `degree` and supported in s.
  bool has_shape(int degree, SubsetMask s) const {
    for (const auto& [b, c] : coeffs_)
      if (!c.is_homogeneous(degree) || !is_subset(c.support(), s)) return false;
    return true;
  }

  friend bool operator==(const WedgeTensor& a, const WedgeTensor& b) {
    a.check_shape(b);
    return a.coeffs_ == b.coeffs_;
  }

 private:
  void check_shape(const WedgeTensor& o) const {
    require_same_ambient(ambient_, o.ambient_);
    if (h_ != o.h_ || rank_ != o.rank_)
      throw TypeMismatch("wedge tensors of shape (h=" + std::to_string(h_) + ", r=" + std::to_string(rank_) +
                         ") and (h=" + std::to_string(o.h_) + ", r=" + std::to_string(o.rank_) + ") differ");
  }

  SiteSetPtr ambient_;
  int h_;
  int rank_;
  std::map<BasisMask, GradedElement> coeffs_;
};

inline WedgeTensor project(const WedgeTensor& w, SubsetMask s) {
  return w.map([&](const GradedElement& c) { return project(c, s); });
}

inline WedgeTensor graded_piece(const WedgeTensor& w, int degree) {
  return w.map([&](const GradedElement& c) { return graded_piece(c, degree); });
}

/// A homomorphism H -> B stored by its values on the basis. B is O, O/(t),
/// or G; all three are carried as GradedElements (O as degree 0).
class Functional {
 public:
  enum class Kind { IntoO, IntoQuotient, IntoGraded };

  static Functional into_o(const SiteSetPtr& ambient, const Vec& values) {
    Functional f(Kind::IntoO, ambient->modulus(), ambient);
    for (Int x : values) f.values_.push_back(GradedElement::constant(ambient, x));
    return f;
  }
  /// Values in O/(t) = Z/gcd(m, t); contraction reduces results mod t.
  static Functional into_quotient(const SiteSetPtr& ambient, const Vec& values, Int t) {
    Int d = gcd(ambient->modulus(), t);
    Functional f(Kind::IntoQuotient, d, ambient);
    for (Int x : values) f.values_.push_back(GradedElement::constant(ambient, mod(x, d)));
    return f;
  }
  static Functional into_graded(std::vector<GradedElement> values) {
    if (values.empty()) throw std::invalid_argument("functional on the zero module needs an ambient");
    Functional f(Kind::IntoGraded, values.front().ambient()->modulus(), values.front().ambient());
    f.values_ = std::move(values);
    return f;
  }

  Kind kind() const { return kind_; }
  Int divisor() const { return divisor_; }
  int h_rank() const { return static_cast<int>(values_.size()); }
  const GradedElement& value(int i) const { return values_.at(i); }
  const std::vector<GradedElement>& values() const { return values_; }

  Functional negated() const {
    Functional f = *this;
    for (auto& v : f.values_) v = -v;
    return f;
  }

  /// Post-composition with pi_s (only meaningful for graded values).
  Functional projected(SubsetMask s) const {
    Functional f = *this;
    for (auto& v : f.values_) v = project(v, s);
    return f;
  }

  /// f(a) for a coordinate vector a.
  GradedElement apply(const Vec& a) const {
    if (a.size() != values_.size()) throw std::invalid_argument("vector length does not match H rank");
    GradedElement out(ambient_);
    for (std::size_t i = 0; i < a.size(); ++i) out += values_[i].scaled(a[i]);
    return kind_ == Kind::IntoQuotient ? out.reduced_mod(divisor_) : out;
  }

 private:
  Functional(Kind kind, Int divisor, SiteSetPtr ambient)
      : kind_(kind), divisor_(divisor), ambient_(std::move(ambient)) {}

  Kind kind_;
  Int divisor_;
  SiteSetPtr ambient_;
  std::vector<GradedElement> values_;
};

/// m_1 ^ ... ^ m_r for coordinate vectors over O.
inline WedgeTensor wedge(const SiteSetPtr& ambient, int h, const std::vector<Vec>& vectors) {
  const Int m = ambient->modulus();
  std::map<BasisMask, Int> acc{{0, 1}};
  for (const Vec& v : vectors) {
    if (static_cast<int>(v.size()) != h) throw std::invalid_argument("wedge: vector length does not match H rank");
    std::map<BasisMask, Int> next;
    for (const auto& [b, c] : acc)
      for (int i = 0; i < h; ++i) {
        Int vi = mod(v[i], m);
        if (vi == 0 || (b >> i) & 1u) continue;
        // e_b ^ e_i = (-1)^{#{j in b : j > i}} e_{b + i}
        int sign = std::popcount(b >> (i + 1)) % 2 ? -1 : 1;
        Int& slot = next[b | (BasisMask{1} << i)];
        slot = mod(slot + sign * mulmod(c, vi, m), m);
      }
    acc = std::move(next);
  }
  WedgeTensor w(ambient, h, static_cast<int>(vectors.size()));
  for (const auto& [b, c] : acc)
    if (c) w.add(b, GradedElement::constant(ambient, c));
  return w;
}

inline WedgeTensor contract(const Functional& f, const WedgeTensor& w) {
  if (w.rank() < 1) throw std::invalid_argument("cannot contract a rank-0 tensor");
  if (f.h_rank() != w.h_rank()) throw std::invalid_argument("functional and tensor have different H rank");
  WedgeTensor out(w.ambient(), w.h_rank(), w.rank() - 1);
  for (const auto& [b, c] : w.coefficients()) {
    int position = 0;
    for (int i : basis_indices(b)) {
      const GradedElement& fi = f.value(i);
      if (!fi.is_zero()) {
        GradedElement term = c * fi;
        out.add(b & ~(BasisMask{1} << i), position % 2 ? -term : term);
      }
      ++position;
    }
  }
  return f.kind() == Functional::Kind::IntoQuotient ? out.reduced_mod(f.divisor()) : out;
}

/// (f_1 ^ ... ^ f_s)(w) = f_1(f_2(...f_s(w))).
inline WedgeTensor contract_seq(std::span<const Functional> fs, const WedgeTensor& w) {
  if (static_cast<int>(fs.size()) > w.rank())
    throw std::invalid_argument("contract_seq: " + std::to_string(fs.size()) + " functionals exceed rank " +
                                std::to_string(w.rank()));
  WedgeTensor acc = w;
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) acc = contract(*it, acc);
  return acc;
}

/// Coordinates over Z/m of a tensor, one per (basis tuple, monomial) key in
/// `keys`. A coefficient c of a monomial with divisor g is embedded as
/// (m/g)*c, an injective Z/m-linear map Z/g -> Z/m, so span membership of the
/// embedded vectors decides membership in the original module.
using TensorKey = std::pair<BasisMask, Monomial>;

inline Vec embed_coordinates(const WedgeTensor& w, const std::vector<TensorKey>& keys) {
  const SiteSet& s = *w.ambient();
  Vec out;
  out.reserve(keys.size());
  for (const auto& [b, mono] : keys) {
    Int c = w.coefficient(b).coefficient(mono);
    out.push_back(mod(c * (s.modulus() / s.divisor(monomial_support(mono))), s.modulus()));
  }
  return out;
}

/// Union of the (basis, monomial) keys occurring in the given tensors.
inline std::vector<TensorKey> tensor_keys(std::span<const WedgeTensor> ws) {
  std::map<TensorKey, bool> seen;
  for (const auto& w : ws)
    for (const auto& [b, c] : w.coefficients())
      for (const auto& [mono, v] : c.terms()) seen[{b, mono}] = true;
  std::vector<TensorKey> out;
  for (const auto& [k, v] : seen) out.push_back(k);
  return out;
}

/// Whether target lies in the O-span of gens.
inline bool tensor_in_span(std::span<const WedgeTensor> gens, const WedgeTensor& target) {
  std::vector<WedgeTensor> all(gens.begin(), gens.end());
  all.push_back(target);
  auto keys = tensor_keys(all);
  std::vector<Vec> rows;
  for (const auto& g : gens) rows.push_back(embed_coordinates(g, keys));
  return in_span(rows, embed_coordinates(target, keys), target.ambient()->modulus()).has_value();
}

}  // namespace kolyvagin
