#pragma once

// The four flavours of Kolyvagin system (KS, TKS, PKS, DKS), their axiom
// checkers, the transforms F_PT, F_PK, F_TK, F_TD, F_DK, the recursive
// inverses G_PK, G_TD, G_TK, and the ordered-partition determinant identity.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exterior.hpp"
#include "graded.hpp"
#include "instance.hpp"
#include "linalg.hpp"
#include "random.hpp"

namespace kolyvagin {

enum class SystemKind { KS, TKS, PKS, DKS, RAW };

inline std::string to_string(SystemKind k) {
  switch (k) {
    case SystemKind::KS: return "KS";
    case SystemKind::TKS: return "TKS";
    case SystemKind::PKS: return "PKS";
    case SystemKind::DKS: return "DKS";
    case SystemKind::RAW: return "RAW";
  }
  return "RAW";
}

inline SystemKind parse_kind(const std::string& s) {
  if (s == "KS") return SystemKind::KS;
  if (s == "TKS") return SystemKind::TKS;
  if (s == "PKS") return SystemKind::PKS;
  if (s == "DKS") return SystemKind::DKS;
  if (s == "RAW") return SystemKind::RAW;
  throw std::invalid_argument("unknown system kind '" + s + "'");
}

/// A family {a_n} over every subset n of Sigma, entries in Lambda^r H (x) G.
struct SystemCollection {
  InstancePtr instance;
  int r = 1;
  SystemKind kind = SystemKind::RAW;
  std::vector<WedgeTensor> entries;  ///< indexed by subset mask

  static SystemCollection zero(InstancePtr T, int r, SystemKind kind) {
    SystemCollection s{T, r, kind, {}};
    const std::size_t count = std::size_t{1} << T->site_count();
    s.entries.assign(count, WedgeTensor(T->sites, T->h, r));
    return s;
  }

  SubsetMask full() const { return instance->sites->full(); }
  const WedgeTensor& operator[](SubsetMask n) const { return entries.at(n); }
  WedgeTensor& operator[](SubsetMask n) { return entries.at(n); }

  /// Kind-independent equality of the entries.
  bool same_entries(const SystemCollection& o) const { return r == o.r && entries == o.entries; }
};

/// Entries have the shape their kind requires: homogeneous of degree nu(n),
/// supported in n (KS/TKS/DKS) or anywhere in Sigma (PKS). RAW accepts
/// either. Returns the first offending subset.
inline std::optional<SubsetMask> shape_violation(const SystemCollection& s) {
  if (s.entries.size() != (std::size_t{1} << s.instance->site_count())) return SubsetMask{0};
  for (SubsetMask n = 0; n < s.entries.size(); ++n) {
    const auto& e = s.entries[n];
    if (e.rank() != s.r || e.h_rank() != s.instance->h) return n;
    SubsetMask allowed = (s.kind == SystemKind::PKS || s.kind == SystemKind::RAW) ? s.full() : n;
    if (!e.has_shape(subset_size(n), allowed)) return n;
  }
  return std::nullopt;
}

/// Memoized determinant elements for one instance.
class DetCache {
 public:
  explicit DetCache(const SevenTuple& T) : T_(T) {}

  const GradedElement& D(SubsetMask n, SubsetMask d) {
    auto key = std::make_pair(n, d);
    auto it = full_.find(key);
    if (it == full_.end()) it = full_.emplace(key, det_D(n, d, T_.p)).first;
    return it->second;
  }
  const GradedElement& D_reduced(SubsetMask d) {
    auto it = reduced_.find(d);
    if (it == reduced_.end()) it = reduced_.emplace(d, project(D(d, d), d)).first;
    return it->second;
  }

 private:
  const SevenTuple& T_;
  std::map<std::pair<SubsetMask, SubsetMask>, GradedElement> full_;
  std::map<SubsetMask, GradedElement> reduced_;
};

namespace detail {

constexpr SubsetMask bit(int q) { return SubsetMask{1} << q; }

inline Int sign_of(int k) { return k % 2 ? -1 : 1; }

/// prod_{q in s} pi_{proj(q)}(P_q)
template <class Proj>
GradedElement product_of_p(const SevenTuple& T, SubsetMask s, Proj proj) {
  GradedElement acc = GradedElement::one(T.sites);
  for (int q : members(s)) acc *= project(T.p[q], proj(q));
  return acc;
}

struct Functionals {
  std::vector<Functional> v, u, phi;
  explicit Functionals(const SevenTuple& T) {
    for (int q = 0; q < T.site_count(); ++q) {
      v.push_back(T.v_functional(q));
      u.push_back(T.u_functional(q));
      phi.push_back(T.phi_functional(q));
    }
  }
};

}  // namespace detail

struct AxiomFailure {
  std::string axiom;
  SubsetMask n = 0;
  int q = -1;  ///< -1 when the axiom has no site parameter
};

struct AxiomReport {
  std::size_t checks = 0;
  std::vector<AxiomFailure> failures;
  bool ok() const { return failures.empty(); }
};

/// F_PK(a)_n, also the bracket inside (PK2).
inline WedgeTensor f_pk_entry(const SystemCollection& a, SubsetMask n) {
  const SevenTuple& T = *a.instance;
  WedgeTensor out(T.sites, T.h, a.r);
  for (SubsetMask d : subsets_of(n)) {
    SubsetMask rest = n & ~d;
    auto prod = detail::product_of_p(T, rest, [&](int q) { return n & ~detail::bit(q); });
    WedgeTensor term = project(a[d], n) * prod;
    out += term.scaled(detail::sign_of(subset_size(rest)));
  }
  return out;
}

/// Checks the axioms of the collection's kind exactly. Every (axiom, n, q)
/// instance is checked; failures are listed individually.
inline AxiomReport check_axioms(const SystemCollection& s) {
  if (s.kind == SystemKind::RAW) throw std::invalid_argument("no axioms are defined for RAW collections");
  const SevenTuple& T = *s.instance;
  AxiomReport report;
  auto record = [&](bool pass, const char* axiom, SubsetMask n, int q) {
    ++report.checks;
    if (!pass) report.failures.push_back({axiom, n, q});
  };
  if (auto bad = shape_violation(s)) {
    record(false, "shape", *bad, -1);
    return report;
  }
  detail::Functionals fn(T);
  DetCache dets(T);
  const int N = T.site_count();
  const SubsetMask all = T.sites->full();
  const std::string k = to_string(s.kind);
  const std::string a1 = k.substr(0, k.size() - 2) + "1";
  auto name = [&](int i) {
    static const std::map<SystemKind, std::string> prefix{
        {SystemKind::KS, "K"}, {SystemKind::TKS, "TK"}, {SystemKind::PKS, "PK"}, {SystemKind::DKS, "DK"}};
    return prefix.at(s.kind) + std::to_string(i);
  };

  for (SubsetMask n = 0; n <= all; ++n) {
    const WedgeTensor& e = s[n];
    for (int q = 0; q < N; ++q) {
      const SubsetMask qb = detail::bit(q);
      if (!(n & qb)) {
        // (K1)/(TK1)/(PK1)/(DK1)
        if (s.r >= 1) record(contract(fn.v[q], e).is_zero(), name(1).c_str(), n, q);
        continue;
      }
      const SubsetMask nq = n & ~qb;
      switch (s.kind) {
        case SystemKind::KS:
          if (s.r >= 1) {
            record(contract(fn.u[q], e).is_zero(), "K2", n, q);
            record(contract(fn.v[q], e) == contract(fn.phi[q], s[nq]), "K3", n, q);
          }
          record(project(e, nq).is_zero(), "K4", n, q);
          break;
        case SystemKind::TKS: {
          if (s.r >= 1) {
            WedgeTensor sum(T.sites, T.h, s.r);
            for (SubsetMask d : subsets_of(n)) sum += s[d] * dets.D(n, n & ~d);
            record(contract(fn.u[q], sum).is_zero(), "TK2", n, q);
            WedgeTensor lhs(T.sites, T.h, s.r), rhs(T.sites, T.h, s.r);
            for (SubsetMask d : subsets_of(n))
              lhs += project(e, d).scaled(detail::sign_of(subset_size(n & ~d)));
            for (SubsetMask d : subsets_of(nq))
              rhs += project(s[nq], d).scaled(detail::sign_of(subset_size(nq & ~d)));
            record(contract(fn.v[q], lhs) == contract(fn.phi[q], rhs), "TK3", n, q);
          }
          record(project(e, nq) == s[nq] * project(T.p[q], nq), "TK4", n, q);
          break;
        }
        case SystemKind::PKS:
          if (s.r >= 1) {
            record(contract(fn.u[q], f_pk_entry(s, n)).is_zero(), "PK2", n, q);
            record(contract(fn.v[q], e) == contract(fn.phi[q], s[nq]), "PK3", n, q);
          }
          record(project(e, all & ~qb) == project(s[nq], all & ~qb) * T.p[q], "PK4", n, q);
          break;
        case SystemKind::DKS:
          if (s.r >= 1) {
            WedgeTensor sum(T.sites, T.h, s.r);
            for (SubsetMask d : subsets_of(n)) sum += s[d] * dets.D_reduced(n & ~d);
            record(contract(fn.u[q], sum).is_zero(), "DK2", n, q);
            record(contract(fn.v[q], e) == contract(fn.phi[q], s[nq]), "DK3", n, q);
          }
          record(project(e, nq).is_zero(), "DK4", n, q);
          break;
        case SystemKind::RAW: break;
      }
    }
    if (s.kind == SystemKind::PKS) {
      WedgeTensor rhs(T.sites, T.h, s.r);
      for (SubsetMask d : subsets_of(n))
        rhs += project(s[d], n) *
               detail::product_of_p(T, n & ~d, [&](int) { return all & ~n; });
      record(e == rhs, "PK5", n, -1);
    }
  }
  return report;
}

// ---- transforms ----------------------------------------------------------

namespace detail {

inline SystemKind tag(const SystemCollection& in, SystemKind from, SystemKind to) {
  return in.kind == from ? to : SystemKind::RAW;
}

}  // namespace detail

/// F_PT(a)_n = pi_n(a_n)
inline SystemCollection f_pt(const SystemCollection& a) {
  auto out = SystemCollection::zero(a.instance, a.r, detail::tag(a, SystemKind::PKS, SystemKind::TKS));
  for (SubsetMask n = 0; n < a.entries.size(); ++n) out[n] = project(a[n], n);
  return out;
}

/// F_PK(a)_n = sum_{d in n} (-1)^{nu(n/d)} pi_n(a_d) prod_{q in n/d} pi_{n/q}(P_q)
inline SystemCollection f_pk(const SystemCollection& a) {
  auto out = SystemCollection::zero(a.instance, a.r, detail::tag(a, SystemKind::PKS, SystemKind::KS));
  for (SubsetMask n = 0; n < a.entries.size(); ++n) out[n] = f_pk_entry(a, n);
  return out;
}

/// F_TK(a)_n = sum_{d in n} a_d D_{n,n/d}
inline SystemCollection f_tk(const SystemCollection& a) {
  auto out = SystemCollection::zero(a.instance, a.r, detail::tag(a, SystemKind::TKS, SystemKind::KS));
  DetCache dets(*a.instance);
  for (SubsetMask n = 0; n < a.entries.size(); ++n)
    for (SubsetMask d : subsets_of(n)) out[n] += a[d] * dets.D(n, n & ~d);
  return out;
}

/// F_TD(a)_n = sum_{d in n} (-1)^{nu(n/d)} a_d prod_{q in n/d} pi_d(P_q)
inline SystemCollection f_td(const SystemCollection& a) {
  const SevenTuple& T = *a.instance;
  auto out = SystemCollection::zero(a.instance, a.r, detail::tag(a, SystemKind::TKS, SystemKind::DKS));
  for (SubsetMask n = 0; n < a.entries.size(); ++n)
    for (SubsetMask d : subsets_of(n)) {
      SubsetMask rest = n & ~d;
      auto prod = detail::product_of_p(T, rest, [&](int) { return d; });
      out[n] += (a[d] * prod).scaled(detail::sign_of(subset_size(rest)));
    }
  return out;
}

/// F_DK(a)_n = sum_{d in n} a_d D_{n/d}
inline SystemCollection f_dk(const SystemCollection& a) {
  auto out = SystemCollection::zero(a.instance, a.r, detail::tag(a, SystemKind::DKS, SystemKind::KS));
  DetCache dets(*a.instance);
  for (SubsetMask n = 0; n < a.entries.size(); ++n)
    for (SubsetMask d : subsets_of(n)) out[n] += a[d] * dets.D_reduced(n & ~d);
  return out;
}

/// Inverse of F_PK on Kolyvagin systems:
///   b_1 = k_1,
///   b_n = k_n + sum_{d < n} pi_n(b_d) { prod_{q in n/d} P_q|_{Sigma/n}
///                                       - (-1)^{nu(n/d)} prod_{q in n/d} pi_{n/q}(P_q) }.
/// Subsets are visited in increasing mask order, so every proper subset of n
/// is finished before n.
inline SystemCollection g_pk(const SystemCollection& k) {
  const SevenTuple& T = *k.instance;
  const SubsetMask all = T.sites->full();
  auto out = SystemCollection::zero(k.instance, k.r, detail::tag(k, SystemKind::KS, SystemKind::PKS));
  for (SubsetMask n = 0; n < k.entries.size(); ++n) {
    WedgeTensor acc = k[n];
    for (SubsetMask d : subsets_of(n)) {
      if (d == n) continue;
      SubsetMask rest = n & ~d;
      auto outside = detail::product_of_p(T, rest, [&](int) { return all & ~n; });
      auto inside = detail::product_of_p(T, rest, [&](int q) { return n & ~detail::bit(q); });
      acc += project(out[d], n) * (outside - inside.scaled(detail::sign_of(subset_size(rest))));
    }
    out[n] = std::move(acc);
  }
  return out;
}

/// Inverse of F_TD on the whole product module:
///   t_n = a_n - sum_{d < n} (-1)^{nu(n/d)} t_d prod_{q in n/d} pi_d(P_q).
inline SystemCollection g_td(const SystemCollection& a) {
  const SevenTuple& T = *a.instance;
  auto out = SystemCollection::zero(a.instance, a.r, detail::tag(a, SystemKind::DKS, SystemKind::TKS));
  for (SubsetMask n = 0; n < a.entries.size(); ++n) {
    WedgeTensor acc = a[n];
    for (SubsetMask d : subsets_of(n)) {
      if (d == n) continue;
      SubsetMask rest = n & ~d;
      auto prod = detail::product_of_p(T, rest, [&](int) { return d; });
      acc -= (out[d] * prod).scaled(detail::sign_of(subset_size(rest)));
    }
    out[n] = std::move(acc);
  }
  return out;
}

/// Inverse of F_TK on the whole product module (D_{n,1} = 1 makes F_TK
/// unitriangular): t_n = a_n - sum_{d < n} t_d D_{n,n/d}.
inline SystemCollection g_tk(const SystemCollection& a) {
  auto out = SystemCollection::zero(a.instance, a.r, detail::tag(a, SystemKind::KS, SystemKind::TKS));
  DetCache dets(*a.instance);
  for (SubsetMask n = 0; n < a.entries.size(); ++n) {
    WedgeTensor acc = a[n];
    for (SubsetMask d : subsets_of(n))
      if (d != n) acc -= out[d] * dets.D(n, n & ~d);
    out[n] = std::move(acc);
  }
  return out;
}

/// Random element of prod_n Lambda^r H (x) G(n)_{nu(n)}, or of
/// prod_n Lambda^r H (x) G(Sigma)_{nu(n)} when full_support is set. Each
/// coordinate is present with probability 1/2.
inline SystemCollection random_collection(InstancePtr T, int r, Rng& rng, bool full_support = false) {
  auto out = SystemCollection::zero(T, r, SystemKind::RAW);
  const int N = T->site_count();
  std::vector<BasisMask> bases;
  for (BasisMask b = 0; b < (BasisMask{1} << T->h); ++b)
    if (std::popcount(b) == r) bases.push_back(b);
  for (SubsetMask n = 0; n < out.entries.size(); ++n) {
    auto monos = monomials_of_degree(N, full_support ? T->sites->full() : n, subset_size(n));
    for (BasisMask b : bases) {
      GradedElement c(T->sites);
      for (const auto& mono : monos)
        if (rng.chance(1, 2)) c.add_term(mono, rng.below(T->sites->divisor(monomial_support(mono))));
      out[n].add(b, c);
    }
  }
  return out;
}

// ---- ordered partitions --------------------------------------------------

/// Every tuple (C_1, ..., C_k) of disjoint nonempty blocks covering `set`.
/// The empty set has the single empty partition.
inline std::vector<std::vector<SubsetMask>> ordered_partitions(SubsetMask set) {
  std::vector<std::vector<SubsetMask>> out;
  std::vector<SubsetMask> cur;
  auto rec = [&](auto&& self, SubsetMask left) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (SubsetMask block : subsets_of(left)) {
      if (block == 0) continue;
      cur.push_back(block);
      self(self, left & ~block);
      cur.pop_back();
    }
  };
  rec(rec, set);
  return out;
}

struct PartitionDetResult {
  Int lhs = 0;
  Int rhs = 0;
  bool equal = false;
};

/// Both sides of
///   (-1)^nu |A| = sum_{(C_1..C_k)} (-1)^{|C_k|} prod_{i in C_k} (sum_j a_ij)
///                   prod_{l<k} prod_{i in C_l} (sum_{j in C_{l+1}} a_ij).
inline PartitionDetResult partition_det_identity(const MatrixZm& a) {
  const std::size_t nu = a.rows();
  if (nu == 0 || a.cols() != nu) throw std::invalid_argument("partition_det_identity needs a nonempty square matrix");
  if (nu > 10) throw std::invalid_argument("matrix too large for ordered-partition enumeration");
  const Int m = a.modulus();
  std::vector<std::vector<Residue>> entries(nu);
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nu; ++j) entries[i].emplace_back(a.at(i, j), m);
  Residue det = determinant(entries, Residue(1, m));
  PartitionDetResult res;
  res.lhs = (nu % 2 ? -det : det).value();

  auto block_sum = [&](std::size_t i, SubsetMask cols) {
    Int s = 0;
    for (int j : members(cols)) s += a.at(i, j);
    return mod(s, m);
  };
  const SubsetMask everything = static_cast<SubsetMask>((SubsetMask{1} << nu) - 1);
  Int total = 0;
  for (const auto& blocks : ordered_partitions(everything)) {
    const std::size_t k = blocks.size();
    Int term = subset_size(blocks[k - 1]) % 2 ? m - 1 : 1;
    for (int i : members(blocks[k - 1])) term = mulmod(term, block_sum(i, everything), m);
    for (std::size_t l = 0; l + 1 < k; ++l)
      for (int i : members(blocks[l])) term = mulmod(term, block_sum(i, blocks[l + 1]), m);
    total = mod(total + term, m);
  }
  res.rhs = total;
  res.equal = res.lhs == res.rhs;
  return res;
}

}  // namespace kolyvagin
