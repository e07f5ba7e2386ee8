#pragma once

// The graded algebra G(S') = O[x_q : q in S'] / (t_q x_q), truncated above a
// degree cap. It stands in for the associated graded ring of the augmentation
// ideal of Z[prod_q Z/t_q] tensored with O.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "modring.hpp"

namespace kolyvagin {

/// Subsets of the site list, bit q set iff site q is a member.
using SubsetMask = std::uint32_t;

inline int subset_size(SubsetMask s) { return std::popcount(s); }
inline bool is_subset(SubsetMask a, SubsetMask b) { return (a & ~b) == 0; }

/// All subsets of `s`, in increasing numeric order.
inline std::vector<SubsetMask> subsets_of(SubsetMask s) {
  std::vector<SubsetMask> out;
  SubsetMask d = 0;
  while (true) {
    out.push_back(d);
    if (d == s) break;
    d = (d - s) & s;
  }
  return out;
}

inline std::vector<int> members(SubsetMask s) {
  std::vector<int> out;
  for (int i = 0; s; ++i, s >>= 1)
    if (s & 1u) out.push_back(i);
  return out;
}

struct Site {
  std::string label;
  Int t = 1;
  friend bool operator==(const Site&, const Site&) = default;
};

/// A finite ordered list of sites over O = Z/m with a degree cap.
class SiteSet {
 public:
  SiteSet(Modulus m, std::vector<Site> sites, std::optional<int> dmax = std::nullopt)
      : m_(m.value()), sites_(std::move(sites)) {
    if (sites_.size() > 20) throw std::invalid_argument("at most 20 sites are supported");
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (sites_[i].t < 1) throw std::invalid_argument("site '" + sites_[i].label + "' has t < 1");
      for (std::size_t j = 0; j < i; ++j)
        if (sites_[i].label == sites_[j].label)
          throw std::invalid_argument("duplicate site label '" + sites_[i].label + "'");
    }
    dmax_ = dmax.value_or(static_cast<int>(sites_.size()));
    if (dmax_ < 0) throw std::invalid_argument("degree cap must be >= 0");
    divisors_.resize(std::size_t{1} << sites_.size());
    for (SubsetMask s = 0; s < divisors_.size(); ++s) {
      Int g = m_;
      for (int q : members(s)) g = gcd(g, sites_[q].t);
      divisors_[s] = g;
    }
  }

  Int modulus() const { return m_; }
  int size() const { return static_cast<int>(sites_.size()); }
  int dmax() const { return dmax_; }
  const Site& site(int q) const { return sites_.at(q); }
  const std::vector<Site>& sites() const { return sites_; }
  SubsetMask full() const { return static_cast<SubsetMask>((std::size_t{1} << sites_.size()) - 1); }

  int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < sites_.size(); ++i)
      if (sites_[i].label == label) return static_cast<int>(i);
    throw std::invalid_argument("unknown site '" + label + "'");
  }

  /// gcd(m, t_q : q in s): the order of the coefficient ring of a monomial
  /// whose variables are exactly s.
  Int divisor(SubsetMask s) const { return divisors_.at(s); }

  friend bool operator==(const SiteSet& a, const SiteSet& b) {
    return a.m_ == b.m_ && a.dmax_ == b.dmax_ && a.sites_ == b.sites_;
  }

 private:
  Int m_;
  std::vector<Site> sites_;
  int dmax_ = 0;
  std::vector<Int> divisors_;
};

using SiteSetPtr = std::shared_ptr<const SiteSet>;

inline SiteSetPtr make_sites(Int m, std::vector<Site> sites, std::optional<int> dmax = std::nullopt) {
  return std::make_shared<const SiteSet>(Modulus(m), std::move(sites), dmax);
}

inline void require_same_ambient(const SiteSetPtr& a, const SiteSetPtr& b) {
  if (a != b && !(a && b && *a == *b)) throw TypeMismatch("elements live over different site sets");
}

/// Exponent vector, one entry per site.
using Monomial = std::vector<std::uint8_t>;

inline SubsetMask monomial_support(const Monomial& mono) {
  SubsetMask s = 0;
  for (std::size_t i = 0; i < mono.size(); ++i)
    if (mono[i]) s |= SubsetMask{1} << i;
  return s;
}

inline int monomial_degree(const Monomial& mono) {
  return std::accumulate(mono.begin(), mono.end(), 0);
}

/// Element of G(S). Canonical: every coefficient is reduced modulo the
/// divisor of its monomial's support, zero terms and terms above the degree
/// cap are dropped, so equality is representation equality.
class GradedElement {
 public:
  explicit GradedElement(SiteSetPtr ambient) : ambient_(std::move(ambient)) {
    if (!ambient_) throw std::invalid_argument("null site set");
  }

  static GradedElement constant(SiteSetPtr ambient, Int c) {
    GradedElement g(std::move(ambient));
    g.add_term(Monomial(g.ambient_->size(), 0), c);
    return g;
  }
  static GradedElement one(SiteSetPtr ambient) { return constant(std::move(ambient), 1); }

  /// The distinguished generator x_q of G(q)_1.
  static GradedElement generator(SiteSetPtr ambient, int q, Int c = 1) {
    GradedElement g(std::move(ambient));
    Monomial mono(g.ambient_->size(), 0);
    mono.at(q) = 1;
    g.add_term(mono, c);
    return g;
  }

  const SiteSetPtr& ambient() const { return ambient_; }
  const std::map<Monomial, Int>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Int coefficient(const Monomial& mono) const {
    auto it = terms_.find(mono);
    return it == terms_.end() ? 0 : it->second;
  }

  /// Adds c * mono, normalizing.
  void add_term(const Monomial& mono, Int c) {
    if (mono.size() != static_cast<std::size_t>(ambient_->size()))
      throw std::invalid_argument("monomial length does not match the site set");
    if (monomial_degree(mono) > ambient_->dmax()) return;
    Int d = ambient_->divisor(monomial_support(mono));
    auto it = terms_.find(mono);
    Int v = mod((it == terms_.end() ? 0 : it->second) + mod(c, d), d);
    if (v == 0) {
      if (it != terms_.end()) terms_.erase(it);
    } else if (it == terms_.end()) {
      terms_.emplace(mono, v);
    } else {
      it->second = v;
    }
  }

  /// Union of the variable supports of all monomials.
  SubsetMask support() const {
    SubsetMask s = 0;
    for (const auto& [mono, c] : terms_) s |= monomial_support(mono);
    return s;
  }

  bool is_homogeneous(int degree) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [&](const auto& kv) { return monomial_degree(kv.first) == degree; });
  }

  GradedElement& operator+=(const GradedElement& o) {
    require_same_ambient(ambient_, o.ambient_);
    for (const auto& [mono, c] : o.terms_) add_term(mono, c);
    return *this;
  }
  GradedElement& operator-=(const GradedElement& o) {
    require_same_ambient(ambient_, o.ambient_);
    for (const auto& [mono, c] : o.terms_) add_term(mono, -c);
    return *this;
  }
  friend GradedElement operator+(GradedElement a, const GradedElement& b) { return a += b; }
  friend GradedElement operator-(GradedElement a, const GradedElement& b) { return a -= b; }
  GradedElement operator-() const { return scaled(-1); }

  GradedElement scaled(Int c) const {
    GradedElement out(ambient_);
    for (const auto& [mono, v] : terms_) out.add_term(mono, mulmod(v, mod(c, ambient_->modulus()), ambient_->modulus()));
    return out;
  }

  friend GradedElement operator*(const GradedElement& a, const GradedElement& b) {
    require_same_ambient(a.ambient_, b.ambient_);
    GradedElement out(a.ambient_);
    const int dmax = a.ambient_->dmax();
    const Int m = a.ambient_->modulus();
    Monomial prod(a.ambient_->size());
    for (const auto& [ma, ca] : a.terms_) {
      int da = monomial_degree(ma);
      for (const auto& [mb, cb] : b.terms_) {
        if (da + monomial_degree(mb) > dmax) continue;
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = static_cast<std::uint8_t>(ma[i] + mb[i]);
        out.add_term(prod, mulmod(ca, cb, m));
      }
    }
    return out;
  }
  GradedElement& operator*=(const GradedElement& o) { return *this = *this * o; }

  /// Image in G tensor O/(d).
  GradedElement reduced_mod(Int d) const {
    GradedElement out(ambient_);
    for (const auto& [mono, c] : terms_) {
      Int dd = gcd(ambient_->divisor(monomial_support(mono)), d);
      out.add_term(mono, mod(c, dd));
    }
    return out;
  }

  friend bool operator==(const GradedElement& a, const GradedElement& b) {
    require_same_ambient(a.ambient_, b.ambient_);
    return a.terms_ == b.terms_;
  }

 private:
  SiteSetPtr ambient_;
  std::map<Monomial, Int> terms_;
};

/// All monomials of total degree `degree` whose variables lie in `support`.
inline std::vector<Monomial> monomials_of_degree(int n_sites, SubsetMask support, int degree) {
  std::vector<Monomial> out;
  std::vector<int> vars = members(support);
  Monomial cur(n_sites, 0);
  auto rec = [&](auto&& self, std::size_t k, int left) -> void {
    if (k == vars.size()) {
      if (left == 0) out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[vars[k]] = static_cast<std::uint8_t>(e);
      self(self, k + 1, left - e);
    }
    cur[vars[k]] = 0;
  };
  rec(rec, 0, degree);
  return out;
}

/// Restriction (.)|_S: keeps the monomials whose variables all lie in S.
/// pi_n is project(g, n).
inline GradedElement project(const GradedElement& g, SubsetMask s) {
  GradedElement out(g.ambient());
  for (const auto& [mono, c] : g.terms())
    if (is_subset(monomial_support(mono), s)) out.add_term(mono, c);
  return out;
}

inline GradedElement graded_piece(const GradedElement& g, int degree) {
  GradedElement out(g.ambient());
  for (const auto& [mono, c] : g.terms())
    if (monomial_degree(mono) == degree) out.add_term(mono, c);
  return out;
}

/// s_{m,n}(g) = sum_{d subset n} (-1)^{|d|} pi_{m \ d}(g).
template <class T>
T s_operator(const T& g, SubsetMask m_set, SubsetMask n_set) {
  if (!is_subset(n_set, m_set)) throw std::invalid_argument("s_operator: n must be a subset of m");
  T out = g - g;
  for (SubsetMask d : subsets_of(n_set)) {
    T term = project(g, m_set & ~d);
    if (subset_size(d) % 2) out -= term;
    else out += term;
  }
  return out;
}

/// Leibniz determinant over any commutative ring type providing +, -, *.
template <class T>
T determinant(const std::vector<std::vector<T>>& a, const T& one) {
  const std::size_t n = a.size();
  if (n == 0) return one;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  T total = one - one;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    T term = one;
    for (std::size_t i = 0; i < n; ++i) term = term * a[i][perm[i]];
    if (inversions % 2) total = total - term;
    else total = total + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

namespace detail {

inline void check_p_entry(const GradedElement& p, int q) {
  if (!p.is_homogeneous(1)) throw std::invalid_argument("P entry must be homogeneous of degree 1");
  if (p.support() & (SubsetMask{1} << q)) throw std::invalid_argument("P_q must be supported away from q");
}

}  // namespace detail

/// D_{n,d}: determinant with diagonal -pi_{n/d}(P_{q_i}) and off-diagonal
/// entries -pi_{q_j}(P_{q_i}), q_1..q_k the members of d in `order` (default
/// increasing). D_{n,1} = 1. `p` is indexed by site.
inline GradedElement det_D(SubsetMask n_set, SubsetMask d_set, const std::vector<GradedElement>& p,
                           const std::vector<int>& order = {}) {
  if (!is_subset(d_set, n_set)) throw std::invalid_argument("det_D: d must be a subset of n");
  if (p.empty()) throw std::invalid_argument("det_D: no P entries");
  const auto& ambient = p.front().ambient();
  std::vector<int> qs = order.empty() ? members(d_set) : order;
  for (int q : qs) detail::check_p_entry(p.at(q), q);
  const SubsetMask rest = n_set & ~d_set;
  std::vector<std::vector<GradedElement>> a(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = 0; j < qs.size(); ++j)
      a[i].push_back(-project(p[qs[i]], i == j ? rest : SubsetMask{1} << qs[j]));
  return determinant(a, GradedElement::one(ambient));
}

/// D_d = pi_d(D_{n,d}); independent of n.
inline GradedElement det_D_reduced(SubsetMask d_set, const std::vector<GradedElement>& p) {
  return project(det_D(d_set, d_set, p), d_set);
}

}  // namespace kolyvagin
