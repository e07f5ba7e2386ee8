#pragma once

// The data (O, Sigma, H, t, v, u, P) that every system in the engine is built
// over, with the functionals phi_q, phi_q^n and the Selmer submodules S^n.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exterior.hpp"
#include "graded.hpp"
#include "linalg.hpp"
#include "random.hpp"

namespace kolyvagin {

/// O = Z/m, Sigma with its t-values (the site set), H = O^h with a fixed
/// basis, v_q : H -> O, u_q : H -> O/(t_q), P_q in G(Sigma \ q)_1. The
/// v and u functionals are stored as rows of basis values.
struct SevenTuple {
  SiteSetPtr sites;
  int h = 0;
  std::vector<Vec> v;
  std::vector<Vec> u;
  std::vector<GradedElement> p;
  /// Free-form notes (e.g. the root normalization of a cyclotomic
  /// instance); carried through serialization, ignored by the algebra.
  std::map<std::string, std::string> meta;

  Int modulus() const { return sites->modulus(); }
  int site_count() const { return sites->size(); }

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const {
    if (!sites) throw std::invalid_argument("instance has no site set");
    const int n = sites->size();
    if (h < 0 || h > 30) throw std::invalid_argument("H rank must lie in [0, 30]");
    if (static_cast<int>(v.size()) != n || static_cast<int>(u.size()) != n || static_cast<int>(p.size()) != n)
      throw std::invalid_argument("v, u and P need one entry per site");
    for (int q = 0; q < n; ++q) {
      const std::string& label = sites->site(q).label;
      if (static_cast<int>(v[q].size()) != h) throw std::invalid_argument("v[" + label + "] has the wrong length");
      if (static_cast<int>(u[q].size()) != h) throw std::invalid_argument("u[" + label + "] has the wrong length");
      Int dq = sites->divisor(SubsetMask{1} << q);
      for (Int x : v[q])
        if (x < 0 || x >= modulus()) throw std::invalid_argument("v[" + label + "] entry not reduced mod m");
      for (Int x : u[q])
        if (x < 0 || x >= dq) throw std::invalid_argument("u[" + label + "] entry not reduced mod gcd(m, t)");
      require_same_ambient(sites, p[q].ambient());
      if (!p[q].is_homogeneous(1)) throw std::invalid_argument("P[" + label + "] is not homogeneous of degree 1");
      if (!project(p[q], SubsetMask{1} << q).is_zero())
        throw std::invalid_argument("P[" + label + "] has a component at its own site");
    }
  }

  Functional v_functional(int q) const { return Functional::into_o(sites, v.at(q)); }
  Functional neg_v_functional(int q) const { return v_functional(q).negated(); }
  Functional u_functional(int q) const { return Functional::into_quotient(sites, u.at(q), sites->site(q).t); }

  /// phi_q as a G(Sigma)_1-valued functional.
  Functional phi_functional(int q) const {
    std::vector<GradedElement> values;
    for (int i = 0; i < h; ++i) values.push_back(phi_value(q, i));
    return Functional::into_graded(std::move(values));
  }
  /// phi_q^n = pi_n o phi_q.
  Functional phi_n_functional(int q, SubsetMask n) const { return phi_functional(q).projected(n); }

 private:
  GradedElement phi_value(int q, int i) const {
    // phi_q(e_i) = -u_q(e_i) x_q - v_q(e_i) P_q
    return -GradedElement::generator(sites, q, u.at(q).at(i)) - p.at(q).scaled(v.at(q).at(i));
  }
};

using InstancePtr = std::shared_ptr<const SevenTuple>;

inline GradedElement phi(const SevenTuple& T, int q, const Vec& a) {
  if (q < 0 || q >= T.site_count()) throw std::invalid_argument("unknown site index " + std::to_string(q));
  return T.phi_functional(q).apply(a);
}

inline GradedElement phi_n(const SevenTuple& T, int q, SubsetMask n, const Vec& a) {
  return project(phi(T, q, a), n);
}

/// Generators of S^n = {a in H : v_q(a) = 0 for q in Sigma \ n}.
inline std::vector<Vec> selmer_generators(const SevenTuple& T, SubsetMask n) {
  std::vector<Vec> rows;
  for (int q = 0; q < T.site_count(); ++q)
    if (!((n >> q) & 1u)) rows.push_back(T.v[q]);
  if (rows.empty()) {
    std::vector<Vec> basis;
    for (int i = 0; i < T.h; ++i) {
      basis.emplace_back(T.h, 0);
      basis.back()[i] = 1;
    }
    return basis;
  }
  return kernel_generators(MatrixZm(T.modulus(), rows, T.h));
}

struct InstanceParams {
  Int m = 9;
  std::vector<Int> t;  ///< one per site
  int h = 4;
  std::vector<std::string> labels;  ///< defaults to q1, q2, ...
  std::optional<int> dmax;
};

inline void validate_params(const InstanceParams& params) {
  if (params.m < 2) throw std::invalid_argument("m must be >= 2");
  if (params.t.empty()) throw std::invalid_argument("at least one site is required");
  if (params.t.size() > 12) throw std::invalid_argument("at most 12 sites are supported");
  for (Int t : params.t)
    if (t < 1) throw std::invalid_argument("t values must be >= 1");
  if (params.h < 1 || params.h > 16) throw std::invalid_argument("H rank must lie in [1, 16]");
  if (!params.labels.empty() && params.labels.size() != params.t.size())
    throw std::invalid_argument("label count does not match site count");
}

/// Deterministic random instance. Each v_q is uniform, and with probability
/// 1/4 is scaled by a random divisor of m so that non-unimodular functionals
/// (and hence non-free Selmer modules) occur regularly.
inline SevenTuple random_instance(std::uint64_t seed, const InstanceParams& params) {
  validate_params(params);
  Rng rng(seed);
  const int n = static_cast<int>(params.t.size());
  std::vector<Site> sites;
  for (int q = 0; q < n; ++q)
    sites.push_back({params.labels.empty() ? "q" + std::to_string(q + 1) : params.labels[q], params.t[q]});
  SevenTuple T;
  T.sites = make_sites(params.m, std::move(sites), params.dmax);
  T.h = params.h;
  std::vector<Int> divisors;
  for (Int d = 2; d < params.m; ++d)
    if (params.m % d == 0) divisors.push_back(d);
  for (int q = 0; q < n; ++q) {
    Vec row(params.h);
    for (auto& x : row) x = rng.below(params.m);
    if (!divisors.empty() && rng.chance(1, 4)) {
      Int d = divisors[rng.below(static_cast<Int>(divisors.size()))];
      for (auto& x : row) x = mod(x * d, params.m);
    }
    T.v.push_back(std::move(row));
  }
  for (int q = 0; q < n; ++q) {
    Int dq = T.sites->divisor(SubsetMask{1} << q);
    Vec row(params.h);
    for (auto& x : row) x = rng.below(dq);
    T.u.push_back(std::move(row));
  }
  for (int q = 0; q < n; ++q) {
    GradedElement pq(T.sites);
    for (int q2 = 0; q2 < n; ++q2)
      if (q2 != q) pq += GradedElement::generator(T.sites, q2, rng.below(T.sites->divisor(SubsetMask{1} << q2)));
    T.p.push_back(std::move(pq));
  }
  T.validate();
  return T;
}

}  // namespace kolyvagin
