#pragma once

// The instance attached to T = Z_p(1): Sigma-primes l = 1 mod p^k, the
// valuation and unit-part functionals v_l, u_l on Q^x / (Q^x)^M, Frobenius
// discrete logs, the elements P_l and the polynomials Q_l.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graded.hpp"
#include "instance.hpp"
#include "modring.hpp"

namespace kolyvagin::cyclo {

inline bool is_prime(Int n) {
  if (n < 2) return false;
  for (Int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline Int powmod(Int b, Int e, Int n) {
  Int r = 1 % n;
  b = mod(b, n);
  for (; e > 0; e >>= 1) {
    if (e & 1) r = mulmod(r, b, n);
    b = mulmod(b, b, n);
  }
  return r;
}

/// Largest power of p dividing n.
inline Int p_part(Int n, Int p) {
  Int out = 1;
  while (n % p == 0) {
    n /= p;
    out *= p;
  }
  return out;
}

/// Exponent of the largest power of l dividing n (n != 0).
inline int valuation(Int n, Int l) {
  if (n == 0) throw std::invalid_argument("valuation of 0");
  int v = 0;
  while (n % l == 0) {
    n /= l;
    ++v;
  }
  return v;
}

inline bool is_primitive_root(Int g, Int l) {
  if (mod(g, l) == 0) return false;
  Int n = l - 1;
  for (Int d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    if (powmod(g, (l - 1) / d, l) == 1) return false;
    while (n % d == 0) n /= d;
  }
  return n == 1 || powmod(g, (l - 1) / n, l) != 1;
}

inline Int smallest_primitive_root(Int l) {
  for (Int g = 2; g < l; ++g)
    if (is_primitive_root(g, l)) return g;
  if (l == 2) return 1;
  throw std::invalid_argument(std::to_string(l) + " has no primitive root");
}

/// Brute-force discrete log: the least e >= 0 with base^e = x mod n.
inline std::optional<Int> dlog(Int base, Int x, Int n) {
  x = mod(x, n);
  Int acc = 1 % n;
  for (Int e = 0; e < n; ++e) {
    if (acc == x) return e;
    acc = mulmod(acc, base, n);
  }
  return std::nullopt;
}

/// A nonzero rational num/den, den > 0.
struct Rational {
  Int num = 1;
  Int den = 1;

  static Rational parse(const std::string& s) {
    Rational r;
    std::size_t used = 0;
    auto slash = s.find('/');
    try {
      r.num = std::stoll(s.substr(0, slash), &used);
      if (used != (slash == std::string::npos ? s.size() : slash)) throw std::invalid_argument("");
      if (slash != std::string::npos) {
        r.den = std::stoll(s.substr(slash + 1), &used);
        if (used != s.size() - slash - 1) throw std::invalid_argument("");
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed rational '" + s + "'");
    }
    if (r.num == 0 || r.den == 0) throw std::invalid_argument("rational '" + s + "' must be nonzero and finite");
    if (r.den < 0) {
      r.num = -r.num;
      r.den = -r.den;
    }
    return r;
  }

  std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Primes l <= bound with l = 1 mod p^k and l != p.
inline std::vector<Int> sigma_primes(Int p, int k, Int bound) {
  if (!is_prime(p) || p == 2) throw std::invalid_argument("p must be an odd prime");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  Int M = 1;
  for (int i = 0; i < k; ++i) M *= p;
  std::vector<Int> out;
  for (Int l = M + 1; l <= bound; l += M)
    if (l != p && is_prime(l)) out.push_back(l);
  return out;
}

/// l-adic valuation of a, mod M.
inline Int v_ell(const Rational& a, Int l, Int M) {
  if (a.num == 0) throw std::invalid_argument("v_ell of 0");
  return mod(valuation(a.num, l) - valuation(a.den, l), M);
}

/// Class of the unit part w of a in F_l^x / (F_l^x)^M, as the discrete log
/// base zeta = g^{(l-1)/M} of w^{(l-1)/M}.
inline Int u_ell(const Rational& a, Int l, Int M, Int g) {
  if (a.num == 0) throw std::invalid_argument("u_ell of 0");
  if ((l - 1) % M != 0) throw std::invalid_argument("M must divide l - 1");
  Int num = a.num, den = a.den;
  while (num % l == 0) num /= l;
  while (den % l == 0) den /= l;
  Int w = mulmod(mod(num, l), inverse_mod(den, l), l);
  Int zeta = powmod(g, (l - 1) / M, l);
  auto e = dlog(zeta, powmod(w, (l - 1) / M, l), l);
  if (!e || !is_primitive_root(g, l))
    throw std::invalid_argument(std::to_string(g) + " is not a primitive root mod " + std::to_string(l));
  return mod(*e, M);
}

/// Component at q of Fr_l: dlog_{g_q}(l mod q), reduced mod t_q.
inline Int frobenius_dlog(Int l, Int q, Int g_q, Int t_q) {
  if (l % q == 0) throw std::invalid_argument("Frobenius at " + std::to_string(l) + " is undefined at q = l");
  auto e = dlog(g_q, l, q);
  if (!e) throw std::invalid_argument(std::to_string(g_q) + " is not a primitive root mod " + std::to_string(q));
  return mod(*e, t_q);
}

/// Q(x) = (P(x) - P(1)) / (x - 1) mod M, coefficients from the constant
/// term up. Requires P(1) = 0 mod M.
inline std::vector<Int> compute_Q(const std::vector<Int>& p, Int M) {
  Int at_one = 0;
  for (Int c : p) at_one = mod(at_one + c, M);
  if (at_one != 0) throw std::invalid_argument("P(1) is not 0 mod M");
  if (p.size() <= 1) return {};
  // synthetic division by (x - 1), highest coefficient first
  std::vector<Int> q(p.size() - 1);
  Int carry = 0;
  for (std::size_t i = p.size() - 1; i >= 1; --i) {
    carry = mod(carry + p[i], M);
    q[i - 1] = carry;
  }
  while (!q.empty() && q.back() == 0) q.pop_back();
  return q;
}

struct CycloConfig {
  Int p = 3;
  int k = 1;
  std::vector<Int> sigma;
  std::map<Int, Int> roots;  ///< fixed primitive root per Sigma-prime
  std::vector<Rational> generators;

  Int M() const {
    Int m = 1;
    for (int i = 0; i < k; ++i) m *= p;
    return m;
  }

  Int root(Int l) const {
    auto it = roots.find(l);
    return it == roots.end() ? smallest_primitive_root(l) : it->second;
  }

  void validate() const {
    if (!is_prime(p) || p == 2) throw std::invalid_argument("p must be an odd prime");
    if (k < 1 || k > 12) throw std::invalid_argument("k must lie in [1, 12]");
    if (sigma.empty()) throw std::invalid_argument("Sigma must be nonempty");
    if (sigma.size() > 8) throw std::invalid_argument("at most 8 Sigma-primes are supported");
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      Int l = sigma[i];
      if (!is_prime(l) || l == p || (l - 1) % M() != 0)
        throw std::invalid_argument(std::to_string(l) + " is not a Sigma-prime (prime, != p, M | l - 1)");
      for (std::size_t j = 0; j < i; ++j)
        if (sigma[j] == l) throw std::invalid_argument("repeated Sigma-prime " + std::to_string(l));
      if (!is_primitive_root(root(l), l))
        throw std::invalid_argument(std::to_string(root(l)) + " is not a primitive root mod " + std::to_string(l));
    }
    for (const auto& [l, g] : roots)
      if (std::find(sigma.begin(), sigma.end(), l) == sigma.end())
        throw std::invalid_argument("root given for " + std::to_string(l) + ", which is not in Sigma");
    if (generators.empty()) throw std::invalid_argument("at least one generator is required");
    if (generators.size() > 16) throw std::invalid_argument("at most 16 generators are supported");
    for (std::size_t i = 0; i < generators.size(); ++i) {
      const auto& a = generators[i];
      if (a.den != 1 || !is_prime(a.num)) throw std::invalid_argument("generator " + a.str() + " is not a prime");
      for (std::size_t j = 0; j < i; ++j)
        if (generators[j] == a) throw std::invalid_argument("repeated generator " + a.str());
    }
  }
};

/// P_l in G(Sigma \ l)_1: coefficient -l * frobenius_dlog(l, q') on x_{q'}.
inline GradedElement p_element(std::size_t l_index, const CycloConfig& cfg, const SiteSetPtr& sites) {
  const Int l = cfg.sigma.at(l_index);
  GradedElement out(sites);
  for (std::size_t j = 0; j < cfg.sigma.size(); ++j) {
    if (j == l_index) continue;
    const Int q = cfg.sigma[j];
    const Int t_q = sites->site(static_cast<int>(j)).t;
    Int a = frobenius_dlog(l, q, cfg.root(q), t_q);
    out += GradedElement::generator(sites, static_cast<int>(j), -mulmod(mod(l, t_q), a, t_q));
  }
  return out;
}

/// O = Z/M, sites labelled by the Sigma-primes with t_l the p-part of l - 1,
/// H free on the generator primes, v and u their valuation and unit-part
/// classes, P from Frobenius discrete logs.
inline SevenTuple build_cyclotomic_instance(const CycloConfig& cfg) {
  cfg.validate();
  const Int M = cfg.M();
  std::vector<Site> sites;
  for (Int l : cfg.sigma) sites.push_back({std::to_string(l), p_part(l - 1, cfg.p)});
  SevenTuple T;
  T.sites = make_sites(M, std::move(sites));
  T.h = static_cast<int>(cfg.generators.size());
  std::string roots;
  for (std::size_t i = 0; i < cfg.sigma.size(); ++i) {
    const Int l = cfg.sigma[i];
    const Int d = T.sites->divisor(SubsetMask{1} << i);
    Vec v, u;
    for (const auto& a : cfg.generators) {
      v.push_back(v_ell(a, l, M));
      u.push_back(mod(u_ell(a, l, M, cfg.root(l)), d));
    }
    T.v.push_back(std::move(v));
    T.u.push_back(std::move(u));
    T.p.push_back(p_element(i, cfg, T.sites));
    roots += (roots.empty() ? "" : ",") + std::to_string(l) + ":" + std::to_string(cfg.root(l));
  }
  T.meta["source"] = "cyclotomic p=" + std::to_string(cfg.p) + " k=" + std::to_string(cfg.k);
  T.meta["primitive_roots"] = roots;
  T.meta["sigma_generator"] = "sigma_l induced by the fixed primitive root g_l";
  T.validate();
  return T;
}

}  // namespace kolyvagin::cyclo
