#pragma once

// Unit systems along a chain of initial segments of an ordering of Sigma,
// their construction by solving linear membership constraints, and the
// regulator maps R_P, R_T, R_K together with the regulator modules R_n.

#include <algorithm>
#include <bit>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exterior.hpp"
#include "instance.hpp"
#include "ksystems.hpp"
#include "linalg.hpp"

namespace kolyvagin {

/// An ordering q_1..q_N of the sites and the sizes of the chain members
/// n_i = {q_1, ..., q_{levels[i]}}, strictly increasing and ending at N.
struct Chain {
  std::vector<int> ordering;
  std::vector<int> levels;

  /// All initial segments of `ordering`, the empty one included.
  static Chain full(std::vector<int> ordering) {
    Chain c{std::move(ordering), {}};
    for (int k = 0; k <= static_cast<int>(c.ordering.size()); ++k) c.levels.push_back(k);
    return c;
  }
  static Chain identity(int n_sites) {
    std::vector<int> ord(n_sites);
    for (int i = 0; i < n_sites; ++i) ord[i] = i;
    return full(std::move(ord));
  }

  int size() const { return static_cast<int>(ordering.size()); }

  SubsetMask level_mask(std::size_t i) const {
    SubsetMask s = 0;
    for (int j = 0; j < levels.at(i); ++j) s |= SubsetMask{1} << ordering[j];
    return s;
  }

  /// Index of the smallest chain member containing n.
  std::size_t smallest_level_containing(SubsetMask n) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (is_subset(n, level_mask(i))) return i;
    throw std::logic_error("chain does not cover Sigma");
  }

  void validate(int n_sites) const {
    if (static_cast<int>(ordering.size()) != n_sites) throw std::invalid_argument("ordering must list every site once");
    std::vector<int> sorted = ordering;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n_sites; ++i)
      if (sorted[i] != i) throw std::invalid_argument("ordering must be a permutation of the sites");
    if (levels.empty() || levels.back() != n_sites) throw std::invalid_argument("chain must end at Sigma");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i] < 0) throw std::invalid_argument("chain level sizes must be >= 0");
      if (i > 0 && levels[i] <= levels[i - 1]) throw std::invalid_argument("chain must be strictly increasing");
    }
  }

  friend bool operator==(const Chain&, const Chain&) = default;
};

/// The k-fold wedges of the generators of S^n, as elements of Lambda^k H:
/// a spanning set of the image of Lambda^k S^n.
inline std::vector<WedgeTensor> selmer_wedge_generators(const SevenTuple& T, SubsetMask n, int k) {
  if (k < 0) throw std::invalid_argument("negative exterior rank");
  if (k == 0) return {WedgeTensor::scalar(T.sites, T.h, GradedElement::one(T.sites))};
  auto gens = selmer_generators(T, n);
  std::vector<WedgeTensor> out;
  const int g = static_cast<int>(gens.size());
  if (k > g) return out;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    std::vector<Vec> vs;
    for (int i : pick) vs.push_back(gens[i]);
    WedgeTensor w = wedge(T.sites, T.h, vs);
    if (!w.is_zero()) out.push_back(std::move(w));
    int i = k - 1;
    while (i >= 0 && pick[i] == g - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

/// A unit system of rank r: the top element eps_Sigma of Lambda^{N+r} H and
/// its images eps_{n_i} at each chain level.
struct UnitSystem {
  InstancePtr instance;
  Chain chain;
  int r = 1;
  WedgeTensor top;
  std::vector<WedgeTensor> components;  ///< one per chain level

  /// (-v_{q_{k+1}}) ^ ... ^ (-v_{q_N}) applied to `top`.
  static WedgeTensor descend(const SevenTuple& T, const Chain& chain, const WedgeTensor& top, int k) {
    std::vector<Functional> fs;
    for (int j = k; j < chain.size(); ++j) fs.push_back(T.neg_v_functional(chain.ordering[j]));
    return contract_seq(fs, top);
  }

  static UnitSystem from_top(InstancePtr T, Chain chain, int r, WedgeTensor top) {
    chain.validate(T->site_count());
    if (top.rank() != T->site_count() + r || top.h_rank() != T->h)
      throw std::invalid_argument("top element must lie in Lambda^{N+r} H");
    if (!top.has_shape(0, 0)) throw std::invalid_argument("top element must have coefficients in O");
    UnitSystem e{T, std::move(chain), r, std::move(top), {}};
    for (int k : e.chain.levels) e.components.push_back(descend(*T, e.chain, e.top, k));
    return e;
  }

  static UnitSystem zero(InstancePtr T, Chain chain, int r) {
    WedgeTensor top(T->sites, T->h, T->site_count() + r);
    return from_top(std::move(T), std::move(chain), r, std::move(top));
  }
};

namespace detail {

/// Z/m coordinates of a tensor with constant coefficients, indexed by the
/// rank-k basis tuples listed in `bases`.
inline Vec scalar_coordinates(const WedgeTensor& w, const std::vector<BasisMask>& bases) {
  Monomial one(w.ambient()->size(), 0);
  Vec out;
  for (BasisMask b : bases) out.push_back(w.coefficient(b).coefficient(one));
  return out;
}

inline std::vector<BasisMask> basis_tuples(int h, int k) {
  std::vector<BasisMask> out;
  if (k < 0 || k > h) return out;
  for (BasisMask b = 0; b < (BasisMask{1} << h); ++b)
    if (std::popcount(b) == k) out.push_back(b);
  return out;
}

inline WedgeTensor scalar_tensor(const SiteSetPtr& s, int h, int k, const std::vector<BasisMask>& bases, const Vec& x) {
  WedgeTensor w(s, h, k);
  for (std::size_t i = 0; i < bases.size(); ++i)
    if (x[i]) w.add(bases[i], GradedElement::constant(s, x[i]));
  return w;
}

}  // namespace detail

/// Generators of the module of unit systems along `chain`. The condition
/// "eps_{n_i} lies in the image of Lambda^{nu(n_i)+r} S^{n_i}" is linear in
/// eps_Sigma, so the module is the projection to the eps_Sigma coordinates
/// of the kernel of
///   [ L_i | -w_{i,1} ... -w_{i,k_i} ]   (stacked over levels i),
/// L_i the descent map to level i and w_{i,j} the wedge generators there.
/// When N + r > h the top power vanishes and no generators are returned.
inline std::vector<UnitSystem> build_unit_systems(InstancePtr T, const Chain& chain, int r) {
  chain.validate(T->site_count());
  if (r < 0) throw std::invalid_argument("rank must be >= 0");
  const int N = T->site_count(), h = T->h;
  const Int m = T->modulus();
  const auto top_bases = detail::basis_tuples(h, N + r);
  if (top_bases.empty()) return {};

  struct Level {
    std::vector<BasisMask> bases;
    std::vector<Vec> image;  ///< L_i(e_b), one per top basis tuple
    std::vector<Vec> gens;
  };
  std::vector<Level> levels;
  std::size_t unknowns = top_bases.size(), equations = 0;
  for (std::size_t i = 0; i < chain.levels.size(); ++i) {
    const int k = chain.levels[i];
    Level lv;
    lv.bases = detail::basis_tuples(h, k + r);
    for (BasisMask b : top_bases) {
      WedgeTensor e(T->sites, h, N + r);
      e.add(b, GradedElement::one(T->sites));
      lv.image.push_back(detail::scalar_coordinates(UnitSystem::descend(*T, chain, e, k), lv.bases));
    }
    for (const auto& w : selmer_wedge_generators(*T, chain.level_mask(i), k + r))
      lv.gens.push_back(detail::scalar_coordinates(w, lv.bases));
    unknowns += lv.gens.size();
    equations += lv.bases.size();
    levels.push_back(std::move(lv));
  }

  MatrixZm a(m, equations, unknowns);
  std::size_t row = 0, col_offset = top_bases.size();
  for (const auto& lv : levels) {
    for (std::size_t e = 0; e < lv.bases.size(); ++e) {
      for (std::size_t j = 0; j < top_bases.size(); ++j) a.set(row + e, j, lv.image[j][e]);
      for (std::size_t g = 0; g < lv.gens.size(); ++g) a.set(row + e, col_offset + g, -lv.gens[g][e]);
    }
    row += lv.bases.size();
    col_offset += lv.gens.size();
  }

  std::vector<Vec> tops;
  for (const Vec& x : kernel_generators(a)) tops.emplace_back(x.begin(), x.begin() + top_bases.size());
  std::vector<UnitSystem> out;
  for (const Vec& x : compact_span(tops, top_bases.size(), m))
    out.push_back(UnitSystem::from_top(T, chain, r, detail::scalar_tensor(T->sites, h, N + r, top_bases, x)));
  return out;
}

/// O-linear combination of unit systems over the same chain.
inline UnitSystem combine(const std::vector<UnitSystem>& gens, const Vec& coeffs) {
  if (gens.empty()) throw std::invalid_argument("combine needs at least one unit system");
  WedgeTensor top(gens.front().top.ambient(), gens.front().top.h_rank(), gens.front().top.rank());
  for (std::size_t i = 0; i < gens.size(); ++i) top += gens[i].top.scaled(coeffs.at(i));
  return UnitSystem::from_top(gens.front().instance, gens.front().chain, gens.front().r, std::move(top));
}

struct CompatibilityReport {
  bool ok = true;
  std::optional<std::size_t> failing_level;
  std::string reason;
};

/// Both unit-system invariants: stored components are the descents of the
/// top element, and each lies in the image of the Selmer wedge power.
inline CompatibilityReport check_compatibility(const UnitSystem& e) {
  const SevenTuple& T = *e.instance;
  if (e.components.size() != e.chain.levels.size()) return {false, 0, "component count does not match chain"};
  for (std::size_t i = 0; i < e.chain.levels.size(); ++i) {
    const int k = e.chain.levels[i];
    if (!(e.components[i] == UnitSystem::descend(T, e.chain, e.top, k)))
      return {false, i, "component is not the descent of the top element"};
    auto gens = selmer_wedge_generators(T, e.chain.level_mask(i), k + e.r);
    if (!tensor_in_span(gens, e.components[i])) return {false, i, "component is outside the Selmer wedge image"};
  }
  return {};
}

enum class RegulatorFlavor { P, T, K };

inline std::string to_string(RegulatorFlavor f) {
  switch (f) {
    case RegulatorFlavor::P: return "P";
    case RegulatorFlavor::T: return "T";
    case RegulatorFlavor::K: return "K";
  }
  return "P";
}

/// psi_1 ^ ... ^ psi_{nu(n_i)} applied to eps_{n_i}, where psi_j is phi_{q_j},
/// phi_{q_j}^n or phi_{q_j}^{q_j} (by flavor) if q_j is in n and -v_{q_j}
/// otherwise. n_i is the smallest chain member containing n unless `level`
/// names a larger one.
inline WedgeTensor regulator(const UnitSystem& e, SubsetMask n, RegulatorFlavor flavor,
                             std::optional<std::size_t> level = std::nullopt) {
  const SevenTuple& T = *e.instance;
  std::size_t i = e.chain.smallest_level_containing(n);
  if (level) {
    if (*level >= e.chain.levels.size() || !is_subset(n, e.chain.level_mask(*level)))
      throw std::invalid_argument("chain level does not contain n");
    i = *level;
  }
  std::vector<Functional> psi;
  for (int j = 0; j < e.chain.levels[i]; ++j) {
    const int q = e.chain.ordering[j];
    if (!((n >> q) & 1u)) {
      psi.push_back(T.neg_v_functional(q));
      continue;
    }
    switch (flavor) {
      case RegulatorFlavor::P: psi.push_back(T.phi_functional(q)); break;
      case RegulatorFlavor::T: psi.push_back(T.phi_n_functional(q, n)); break;
      case RegulatorFlavor::K: psi.push_back(T.phi_n_functional(q, SubsetMask{1} << q)); break;
    }
  }
  return contract_seq(psi, e.components[i]);
}

/// The collection {R(eps)_n}_n, tagged PKS / TKS / KS for P / T / K.
inline SystemCollection regulator_collection(const UnitSystem& e, RegulatorFlavor flavor) {
  static constexpr SystemKind kinds[] = {SystemKind::PKS, SystemKind::TKS, SystemKind::KS};
  auto out = SystemCollection::zero(e.instance, e.r, kinds[static_cast<int>(flavor)]);
  for (SubsetMask n = 0; n < out.entries.size(); ++n) out[n] = regulator(e, n, flavor);
  return out;
}

/// Spanning set of R_n = Im(phi^n_{q_1} ^ ... ^ phi^n_{q_nu} : Lambda^{nu+r} S^n -> Lambda^r H (x) G(n)).
/// `order` lists the members of n (default increasing).
inline std::vector<WedgeTensor> regulator_module(const SevenTuple& T, SubsetMask n, int r,
                                                 const std::vector<int>& order = {}) {
  std::vector<int> qs = order.empty() ? members(n) : order;
  {
    std::vector<int> sorted = qs;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != members(n)) throw std::invalid_argument("order must list the members of n");
  }
  std::vector<Functional> fs;
  for (int q : qs) fs.push_back(T.phi_n_functional(q, n));
  std::vector<WedgeTensor> out;
  for (const auto& w : selmer_wedge_generators(T, n, subset_size(n) + r)) {
    WedgeTensor img = contract_seq(fs, w);
    if (!img.is_zero()) out.push_back(std::move(img));
  }
  return out;
}

}  // namespace kolyvagin
