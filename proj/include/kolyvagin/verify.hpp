#pragma once

// Property suites over seeded random instances. Every check is an exact
// equality; failures carry the trial seed and the instance so they replay.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclo.hpp"
#include "exterior.hpp"
#include "graded.hpp"
#include "instance.hpp"
#include "ksystems.hpp"
#include "linalg.hpp"
#include "random.hpp"
#include "serialize.hpp"
#include "unitsys.hpp"

namespace kolyvagin::verify {

using json = nlohmann::json;

struct CheckResult {
  std::string name;
  std::size_t total = 0;
  std::size_t passed = 0;
  std::vector<json> failures;  ///< first few only
};

/// Aggregates pass/fail counts per named check in first-seen order.
class Recorder {
 public:
  static constexpr std::size_t kMaxFailures = 10;

  /// Context merged into every failure payload (trial index, seed, ...).
  void set_context(json ctx) { context_ = std::move(ctx); }

  bool check(const std::string& name, bool pass, const std::function<json()>& payload = nullptr) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      it = index_.emplace(name, results_.size()).first;
      results_.push_back({name, 0, 0, {}});
    }
    CheckResult& r = results_[it->second];
    ++r.total;
    if (pass) {
      ++r.passed;
    } else if (r.failures.size() < kMaxFailures) {
      json f = context_.is_null() ? json::object() : context_;
      if (payload) f.update(payload());
      r.failures.push_back(std::move(f));
    }
    return pass;
  }

  bool ok() const {
    return std::all_of(results_.begin(), results_.end(), [](const CheckResult& r) { return r.passed == r.total; });
  }
  const std::vector<CheckResult>& results() const { return results_; }

  json to_json() const {
    json out = json::array();
    for (const auto& r : results_)
      out.push_back({{"name", r.name}, {"total", r.total}, {"passed", r.passed}, {"failures", r.failures}});
    return out;
  }

 private:
  json context_;
  std::vector<CheckResult> results_;
  std::map<std::string, std::size_t> index_;
};

/// Unset fields are drawn per trial.
struct SuiteParams {
  std::uint64_t seed = 1;
  int trials = 20;
  std::optional<Int> m;
  std::optional<int> sites;
  std::vector<Int> t;
  std::optional<int> rank;
  std::optional<int> r;

  json to_json() const {
    json out;
    out["seed"] = seed;
    out["trials"] = trials;
    out["m"] = m ? json(*m) : json(nullptr);
    out["sites"] = sites ? json(*sites) : json(nullptr);
    out["t"] = t;
    out["rank"] = rank ? json(*rank) : json(nullptr);
    out["r"] = r ? json(*r) : json(nullptr);
    return out;
  }
};

struct Sample {
  InstancePtr instance;
  int r = 1;
};

inline const std::vector<Int>& default_moduli() {
  static const std::vector<Int> ms{8, 9, 16, 25, 27};
  return ms;
}

/// Random instance following `params`. t-values default to random divisors
/// (> 1) of m, or m itself, so that O/(t_q) ranges over proper quotients.
inline Sample sample_instance(const SuiteParams& params, Rng& rng) {
  InstanceParams ip;
  ip.m = params.m ? *params.m : default_moduli()[rng.below(static_cast<Int>(default_moduli().size()))];
  const int n = params.sites ? *params.sites : static_cast<int>(rng.between(2, 3));
  if (!params.t.empty()) {
    ip.t = params.t;
  } else {
    std::vector<Int> divisors;
    for (Int d = 2; d <= ip.m; ++d)
      if (ip.m % d == 0) divisors.push_back(d);
    for (int i = 0; i < n; ++i)
      ip.t.push_back(rng.chance(1, 2) ? ip.m : divisors[rng.below(static_cast<Int>(divisors.size()))]);
  }
  ip.h = params.rank ? *params.rank : static_cast<int>(rng.between(4, 6));
  const int N = static_cast<int>(ip.t.size());
  int r = params.r ? *params.r : static_cast<int>(rng.between(1, 2));
  if (!params.r && N + r > ip.h) r = std::max(1, ip.h - N);
  auto T = std::make_shared<const SevenTuple>(random_instance(rng.split(0).seed(), ip));
  return {T, r};
}

// ---- random objects ----

/// Random element of G with monomials supported in `support`; homogeneous of
/// `degree` when given, else of mixed degree up to the cap.
inline GradedElement random_graded(const SiteSetPtr& s, SubsetMask support, Rng& rng,
                                   std::optional<int> degree = std::nullopt) {
  GradedElement g(s);
  const int lo = degree ? *degree : 0, hi = degree ? *degree : s->dmax();
  for (int d = lo; d <= hi; ++d)
    for (const auto& mono : monomials_of_degree(s->size(), support, d))
      if (rng.chance(2, 3)) g.add_term(mono, rng.below(s->divisor(monomial_support(mono))));
  return g;
}

inline Vec random_vec(std::size_t len, Int m, Rng& rng) {
  Vec v(len);
  for (auto& x : v) x = rng.below(m);
  return v;
}

inline SubsetMask random_subset(SubsetMask of, Rng& rng) {
  SubsetMask s = 0;
  for (int q : members(of))
    if (rng.chance(1, 2)) s |= SubsetMask{1} << q;
  return s;
}

namespace detail {

inline json subset_json(SubsetMask n, const SevenTuple& T) { return io::labels(n, *T.sites); }

/// Leibniz determinant of rows f_r, ..., f_1 evaluated on m_1..m_r.
inline Int contraction_det_oracle(const std::vector<Vec>& fs, const std::vector<Vec>& ms, Int m) {
  const std::size_t r = fs.size();
  std::vector<std::vector<Residue>> a(r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      Int s = 0;
      for (std::size_t k = 0; k < ms[j].size(); ++k) s = mod(s + mulmod(fs[r - 1 - i][k], ms[j][k], m), m);
      a[i].emplace_back(s, m);
    }
  return determinant(a, Residue(1, m)).value();
}

}  // namespace detail

// ---- suites ----

/// Exterior determinant formulas, ordered-partition identity, graded lemmas,
/// determinant propositions, and the TD/TK round trips on raw collections.
inline void run_identities(Recorder& rec, const SuiteParams& params) {
  for (int trial = 0; trial < params.trials; ++trial) {
    Rng rng = Rng(params.seed).split(static_cast<std::uint64_t>(trial));
    rec.set_context({{"trial", trial}, {"seed", rng.seed()}});
    Sample smp = sample_instance(params, rng);
    const SevenTuple& T = *smp.instance;
    const SiteSetPtr& S = T.sites;
    const Int m = T.modulus();
    const int N = T.site_count();
    const SubsetMask all = S->full();
    auto with_instance = [&](json j) {
      j["instance"] = io::to_json(T);
      return j;
    };

    {  // ordered-partition determinant identity
      const int nu = static_cast<int>(rng.between(1, 4));
      MatrixZm a(m, nu, nu);
      for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nu; ++j) a.set(i, j, rng.below(m));
      auto res = partition_det_identity(a);
      rec.check("ksystems.partition_det_identity", res.equal, [&] {
        json rows = json::array();
        for (int i = 0; i < nu; ++i) rows.push_back(a.row(i));
        return json{{"matrix", rows}, {"modulus", m}, {"lhs", res.lhs}, {"rhs", res.rhs}};
      });
    }

    {  // exterior determinant formulas
      const int r = static_cast<int>(rng.between(1, std::min(4, T.h)));
      std::vector<Vec> fs, ms;
      std::vector<Functional> funcs;
      for (int i = 0; i < r; ++i) {
        fs.push_back(random_vec(T.h, m, rng));
        ms.push_back(random_vec(T.h, m, rng));
        funcs.push_back(Functional::into_o(S, fs.back()));
      }
      WedgeTensor w = wedge(S, T.h, ms);
      WedgeTensor full = contract_seq(funcs, w);
      Int expect = detail::contraction_det_oracle(fs, ms, m);
      rec.check("exterior.full_contraction_det", full == WedgeTensor::scalar(S, T.h, GradedElement::constant(S, expect)),
                [&] { return json{{"f", fs}, {"m", ms}, {"modulus", m}, {"expected", expect}}; });
      // partial: last row holds the vectors themselves
      std::vector<Functional> first(funcs.begin(), funcs.end() - 1);
      WedgeTensor partial = contract_seq(first, w);
      WedgeTensor expect_partial(S, T.h, 1);
      for (int k = 0; k < T.h; ++k) {
        std::vector<Vec> rows(fs.begin(), fs.end() - 1);
        Vec ek(T.h, 0);
        ek[k] = 1;
        rows.insert(rows.begin(), ek);  // becomes the bottom row
        expect_partial.add(BasisMask{1} << k, GradedElement::constant(S, detail::contraction_det_oracle(rows, ms, m)));
      }
      rec.check("exterior.partial_contraction_det", partial == expect_partial,
                [&] { return json{{"f", fs}, {"m", ms}, {"modulus", m}}; });
      if (r >= 2) {
        rec.check("exterior.anticommute",
                  contract(funcs[0], contract(funcs[1], w)) == -contract(funcs[1], contract(funcs[0], w)),
                  [&] { return json{{"f", fs}, {"m", ms}, {"modulus", m}}; });
        rec.check("exterior.nilpotent", contract(funcs[0], contract(funcs[0], w)).is_zero(),
                  [&] { return json{{"f", fs}, {"m", ms}, {"modulus", m}}; });
      }
    }

    {  // projection laws
      GradedElement a = random_graded(S, all, rng), b = random_graded(S, all, rng);
      SubsetMask s1 = random_subset(all, rng), s2 = random_subset(all, rng);
      rec.check("graded.project_homomorphism", project(a * b, s1) == project(a, s1) * project(b, s1),
                [&] { return with_instance({{"a", io::to_json(a)}, {"b", io::to_json(b)}}); });
      rec.check("graded.project_composition", project(project(a, s1), s2) == project(a, s1 & s2),
                [&] { return with_instance({{"a", io::to_json(a)}}); });
      GradedElement sum(S);
      for (int d = 0; d <= S->dmax(); ++d) sum += graded_piece(a, d);
      rec.check("graded.piece_recomposition", sum == a, [&] { return with_instance({{"a", io::to_json(a)}}); });
    }

    {  // s-operators
      SubsetMask mset = random_subset(all, rng);
      SubsetMask nset = random_subset(mset, rng);
      GradedElement g = random_graded(S, mset, rng);
      GradedElement s = s_operator(g, mset, nset);
      bool killed = true;
      for (int q : members(nset)) killed = killed && project(s, nset & ~(SubsetMask{1} << q)).is_zero();
      bool divisible = true;
      for (const auto& [mono, c] : s.terms()) divisible = divisible && is_subset(nset, monomial_support(mono));
      rec.check("graded.lem1_i", killed && divisible, [&] {
        return with_instance({{"g", io::to_json(g)}, {"m", detail::subset_json(mset, T)}, {"n", detail::subset_json(nset, T)}});
      });

      SubsetMask n2 = random_subset(all, rng), d2 = random_subset(n2, rng);
      GradedElement gg = random_graded(S, d2, rng, subset_size(d2));
      GradedElement hh = random_graded(S, n2, rng, subset_size(n2 & ~d2));
      rec.check("graded.lem1_ii",
                s_operator(gg * hh, n2, n2) == s_operator(gg, d2, d2) * s_operator(hh, n2, n2 & ~d2), [&] {
                  return with_instance({{"g", io::to_json(gg)}, {"h", io::to_json(hh)}, {"n", detail::subset_json(n2, T)},
                                        {"d", detail::subset_json(d2, T)}});
                });

      // Divisibility: build g with the hypothesis via s_{m,n}, then also test
      // the implication on an unconstrained sample.
      for (int variant = 0; variant < 2; ++variant) {
        GradedElement base = random_graded(S, mset, rng, subset_size(nset));
        GradedElement c = variant == 0 ? s_operator(base, mset, nset) : base;
        bool hyp = true;
        for (int q : members(nset)) hyp = hyp && project(c, mset & ~(SubsetMask{1} << q)).is_zero();
        if (!hyp) continue;
        Monomial prod(N, 0);
        for (int q : members(nset)) prod[q] = 1;
        bool multiple = std::all_of(c.terms().begin(), c.terms().end(), [&](const auto& kv) { return kv.first == prod; });
        rec.check("graded.cor1", multiple, [&] {
          return with_instance({{"g", io::to_json(c)}, {"m", detail::subset_json(mset, T)}, {"n", detail::subset_json(nset, T)}});
        });
      }
    }

    {  // determinant propositions
      SubsetMask n = random_subset(all, rng);
      SubsetMask d = random_subset(n, rng);
      GradedElement D = det_D(n, d, T.p);
      auto payload = [&] { return with_instance({{"n", detail::subset_json(n, T)}, {"d", detail::subset_json(d, T)}}); };
      for (int q : members(n)) {
        const SubsetMask qb = SubsetMask{1} << q;
        if (d & qb)
          rec.check("graded.propd_i",
                    project(D, n & ~qb) == -(det_D(n & ~qb, d & ~qb, T.p) * project(T.p[q], n & ~d)), payload);
        else
          rec.check("graded.propd_ii", project(D, n & ~qb) == det_D(n & ~qb, d, T.p), payload);
      }
      rec.check("graded.propd_iii", s_operator(D, n, d) == det_D_reduced(d, T.p), payload);
      std::vector<int> order = members(d);
      std::shuffle(order.begin(), order.end(), rng.engine());
      rec.check("graded.det_order_invariance", det_D(n, d, T.p, order) == D, payload);
    }

    {  // phi decomposition phi^{d u m} = phi^d + phi^m
      const int q = static_cast<int>(rng.below(N));
      SubsetMask n = random_subset(all, rng), d = random_subset(n, rng);
      Vec a = random_vec(T.h, m, rng);
      rec.check("instance.phi_decomposition", phi_n(T, q, n, a) == phi_n(T, q, d, a) + phi_n(T, q, n & ~d, a),
                [&] { return with_instance({{"a", a}}); });
    }

    {  // raw round trips and injectivity
      auto raw = random_collection(smp.instance, smp.r, rng);
      auto payload = [&] { return with_instance({{"collection", io::to_json(raw)}}); };
      rec.check("ksystems.f_td_g_td", f_td(g_td(raw)).same_entries(raw), payload);
      rec.check("ksystems.g_td_f_td", g_td(f_td(raw)).same_entries(raw), payload);
      rec.check("ksystems.f_tk_g_tk", f_tk(g_tk(raw)).same_entries(raw), payload);
      rec.check("ksystems.g_tk_f_tk", g_tk(f_tk(raw)).same_entries(raw), payload);
      bool nonzero = std::any_of(raw.entries.begin(), raw.entries.end(), [](const auto& e) { return !e.is_zero(); });
      if (nonzero) {
        auto is_nonzero = [](const SystemCollection& c) {
          return std::any_of(c.entries.begin(), c.entries.end(), [](const auto& e) { return !e.is_zero(); });
        };
        rec.check("ksystems.injective", is_nonzero(f_tk(raw)) && is_nonzero(f_td(raw)) && is_nonzero(f_dk(raw)), payload);
      }
    }
  }
}

/// Diagram, axiom transport, round trips and the s-relation for the
/// regulator images of every unit-system generator (and one random
/// combination) of the given instance.
inline void check_unit_system_diagram(Recorder& rec, const UnitSystem& e, const std::function<json()>& where) {
  auto rp = regulator_collection(e, RegulatorFlavor::P);
  auto rt = regulator_collection(e, RegulatorFlavor::T);
  auto rk = regulator_collection(e, RegulatorFlavor::K);
  auto payload = [&] {
    json j = where();
    j["unit_system"] = io::to_json(e);
    return j;
  };
  auto axioms = [&](const char* name, const SystemCollection& s) {
    auto report = check_axioms(s);
    rec.check(name, report.ok(), [&] {
      json j = payload();
      j["violations"] = json::array();
      for (const auto& f : report.failures)
        j["violations"].push_back({{"axiom", f.axiom},
                                   {"n", io::labels(f.n, *s.instance->sites)},
                                   {"q", f.q < 0 ? json(nullptr) : json(s.instance->sites->site(f.q).label)}});
      return j;
    });
  };
  auto pt = f_pt(rp), pk = f_pk(rp);
  auto td = f_td(pt);
  rec.check("diagram.f_pt_RP_eq_RT", pt.same_entries(rt), payload);
  rec.check("diagram.f_pk_RP_eq_RK", pk.same_entries(rk), payload);
  rec.check("diagram.f_tk_f_pt_eq_f_pk", f_tk(pt).same_entries(pk), payload);
  rec.check("diagram.f_dk_f_td_eq_f_tk", f_dk(td).same_entries(f_tk(pt)), payload);
  axioms("transport.RP_passes_PK", rp);
  axioms("transport.f_pt_passes_TK", pt);
  axioms("transport.f_pk_passes_K", pk);
  axioms("transport.f_td_passes_DK", td);
  axioms("transport.f_dk_passes_K", f_dk(td));
  rec.check("roundtrip.g_pk_f_pk", g_pk(pk).same_entries(rp), payload);
  rec.check("roundtrip.f_pk_g_pk", f_pk(g_pk(rk)).same_entries(rk), payload);
  rec.check("roundtrip.g_td_f_td", g_td(td).same_entries(pt), payload);
  rec.check("roundtrip.g_tk_f_tk", g_tk(f_tk(pt)).same_entries(pt), payload);
  bool s_rel = true;
  for (SubsetMask n = 0; n < td.entries.size(); ++n) s_rel = s_rel && td[n] == s_operator(pt[n], n, n);
  rec.check("s_relation", s_rel, payload);
}

/// Regulator-specific properties of one unit system.
inline void check_unit_system_regulators(Recorder& rec, const UnitSystem& e, Rng& rng,
                                         const std::function<json()>& where) {
  const SevenTuple& T = *e.instance;
  auto payload = [&] {
    json j = where();
    j["unit_system"] = io::to_json(e);
    return j;
  };
  rec.check("unitsys.compatibility", check_compatibility(e).ok, payload);
  const SubsetMask all = T.sites->full();
  // a coarser chain with the same ordering: the top level plus a random
  // selection of the others
  Chain coarse{e.chain.ordering, {}};
  for (std::size_t i = 0; i + 1 < e.chain.levels.size(); ++i)
    if (rng.chance(1, 2)) coarse.levels.push_back(e.chain.levels[i]);
  coarse.levels.push_back(e.chain.levels.back());
  UnitSystem e2 = UnitSystem::from_top(e.instance, coarse, e.r, e.top);
  for (SubsetMask n = 0; n <= all; ++n) {
    auto at_n = [&] {
      json j = payload();
      j["n"] = io::labels(n, *T.sites);
      return j;
    };
    WedgeTensor rp = regulator(e, n, RegulatorFlavor::P);
    WedgeTensor rt = regulator(e, n, RegulatorFlavor::T);
    bool level_ok = true;
    for (std::size_t i = e.chain.smallest_level_containing(n); i < e.chain.levels.size(); ++i)
      for (auto fl : {RegulatorFlavor::P, RegulatorFlavor::T, RegulatorFlavor::K})
        level_ok = level_ok && regulator(e, n, fl, i) == regulator(e, n, fl);
    rec.check("regulator.level_independence", level_ok, at_n);
    bool chain_ok = true;
    for (auto fl : {RegulatorFlavor::P, RegulatorFlavor::T, RegulatorFlavor::K})
      chain_ok = chain_ok && regulator(e2, n, fl) == regulator(e, n, fl);
    rec.check("regulator.chain_independence", chain_ok, at_n);
    rec.check("regulator.T_is_projected_P", rt == project(rp, n), at_n);
    auto module = regulator_module(T, n, e.r);
    rec.check("regulator.containment", tensor_in_span(module, rt), at_n);
    if (subset_size(n) >= 2) {
      std::vector<int> order = members(n);
      std::shuffle(order.begin(), order.end(), rng.engine());
      auto permuted = regulator_module(T, n, e.r, order);
      bool same = std::all_of(permuted.begin(), permuted.end(), [&](const auto& w) { return tensor_in_span(module, w); }) &&
                  std::all_of(module.begin(), module.end(), [&](const auto& w) { return tensor_in_span(permuted, w); });
      rec.check("regulator.module_order_independence", same, at_n);
    }
  }
}

/// Unit-system generators of the instance along a random ordering, plus one
/// random combination of them.
inline std::vector<UnitSystem> sample_unit_systems(const InstancePtr& T, int r, Rng& rng) {
  std::vector<int> ordering(T->site_count());
  for (int i = 0; i < T->site_count(); ++i) ordering[i] = i;
  std::shuffle(ordering.begin(), ordering.end(), rng.engine());
  auto gens = build_unit_systems(T, Chain::full(ordering), r);
  if (gens.size() >= 2) {
    Vec c = random_vec(gens.size(), T->modulus(), rng);
    gens.push_back(combine(gens, c));
  }
  return gens;
}

inline void run_diagram(Recorder& rec, const SuiteParams& params) {
  for (int trial = 0; trial < params.trials; ++trial) {
    Rng rng = Rng(params.seed).split(static_cast<std::uint64_t>(trial));
    rec.set_context({{"trial", trial}, {"seed", rng.seed()}});
    Sample smp = sample_instance(params, rng);
    auto where = [&] { return json{{"instance", io::to_json(*smp.instance)}}; };
    for (const auto& e : sample_unit_systems(smp.instance, smp.r, rng)) check_unit_system_diagram(rec, e, where);
  }
}

inline void run_regulator(Recorder& rec, const SuiteParams& params) {
  for (int trial = 0; trial < params.trials; ++trial) {
    Rng rng = Rng(params.seed).split(static_cast<std::uint64_t>(trial));
    rec.set_context({{"trial", trial}, {"seed", rng.seed()}});
    Sample smp = sample_instance(params, rng);
    auto where = [&] { return json{{"instance", io::to_json(*smp.instance)}}; };
    for (const auto& e : sample_unit_systems(smp.instance, smp.r, rng)) check_unit_system_regulators(rec, e, rng, where);
  }
}

/// Axioms of a given collection; one check per (axiom, n, q) instance.
inline void run_axioms_on(Recorder& rec, const SystemCollection& s) {
  auto report = check_axioms(s);
  const SiteSet& sites = *s.instance->sites;
  for (const auto& f : report.failures)
    rec.check("axiom." + f.axiom, false, [&] {
      return json{{"axiom", f.axiom}, {"n", io::labels(f.n, sites)},
                  {"q", f.q < 0 ? json(nullptr) : json(sites.site(f.q).label)}};
    });
  rec.check("axioms." + to_string(s.kind), report.ok(), [&] {
    return json{{"checked", report.checks}, {"violations", report.failures.size()}};
  });
}

/// Random mode: regulator images must satisfy their axioms.
inline void run_axioms_random(Recorder& rec, const SuiteParams& params) {
  for (int trial = 0; trial < params.trials; ++trial) {
    Rng rng = Rng(params.seed).split(static_cast<std::uint64_t>(trial));
    rec.set_context({{"trial", trial}, {"seed", rng.seed()}});
    Sample smp = sample_instance(params, rng);
    for (const auto& e : sample_unit_systems(smp.instance, smp.r, rng)) {
      auto rp = regulator_collection(e, RegulatorFlavor::P);
      auto pt = f_pt(rp);
      for (const auto& s : {rp, pt, f_pk(rp), f_td(pt), regulator_collection(e, RegulatorFlavor::K)}) {
        auto report = check_axioms(s);
        rec.check("axioms." + to_string(s.kind), report.ok(), [&] {
          json v = json::array();
          for (const auto& f : report.failures)
            v.push_back({{"axiom", f.axiom}, {"n", io::labels(f.n, *s.instance->sites)},
                         {"q", f.q < 0 ? json(nullptr) : json(s.instance->sites->site(f.q).label)}});
          return json{{"instance", io::to_json(*smp.instance)}, {"unit_system", io::to_json(e)}, {"violations", v}};
        });
      }
    }
    for (auto kind : {SystemKind::KS, SystemKind::TKS, SystemKind::PKS, SystemKind::DKS})
      rec.check("axioms.zero_collection_passes", check_axioms(SystemCollection::zero(smp.instance, smp.r, kind)).ok());
  }
}

// ---- cyclotomic ----

inline cyclo::CycloConfig default_cyclo_config() {
  cyclo::CycloConfig c;
  c.p = 3;
  c.k = 1;
  c.sigma = {7, 13, 31};
  c.roots = {{7, 3}, {13, 2}, {31, 3}};
  c.generators = {{2, 1}, {5, 1}};
  return c;
}

/// Fixed arithmetic facts of the cyclotomic instantiation, homomorphism
/// properties on random rationals, and the full diagram/regulator checks on
/// the built instance (and on its restrictions to single Sigma-primes).
inline void run_cyclo(Recorder& rec, const SuiteParams& params, const std::optional<cyclo::CycloConfig>& given) {
  using cyclo::Rational;
  rec.set_context(json::object());
  rec.check("cyclo.sigma_primes", cyclo::sigma_primes(3, 1, 20) == std::vector<Int>{7, 13, 19} &&
                                      cyclo::sigma_primes(3, 2, 20) == std::vector<Int>{19} &&
                                      cyclo::sigma_primes(5, 1, 10).empty());
  rec.check("cyclo.u_ell_example", cyclo::u_ell({2, 1}, 7, 3, 3) == 2 && cyclo::u_ell({7, 1}, 7, 3, 3) == 0);
  rec.check("cyclo.v_ell_example", cyclo::v_ell({63, 1}, 7, 3) == 1 && cyclo::v_ell({1, 49}, 7, 3) == 1);

  std::vector<cyclo::CycloConfig> configs;
  if (given) {
    configs.push_back(*given);
  } else {
    auto base = default_cyclo_config();
    configs.push_back(base);
    for (Int l : base.sigma) {  // h = 2 leaves room for N + r <= h only when N = 1
      auto one = base;
      one.sigma = {l};
      one.roots = {{l, base.roots.at(l)}};
      configs.push_back(one);
    }
    auto wide = base;
    wide.generators = {{2, 1}, {5, 1}, {7, 1}, {13, 1}, {31, 1}};
    configs.push_back(wide);
  }

  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    const auto& cfg = configs[ci];
    const Int M = cfg.M();
    rec.set_context({{"config", io::to_json(cfg)}});
    for (Int l : cfg.sigma) {
      auto q = cyclo::compute_Q({1, -l}, M);
      rec.check("cyclo.Q_is_minus_one", q.size() == 1 && q[0] == M - 1, [&] { return json{{"l", l}, {"Q", q}}; });
      rec.check("cyclo.sigma_condition", (l - 1) % M == 0 && l != cfg.p, [&] { return json{{"l", l}}; });
    }
    std::optional<SevenTuple> built;
    try {
      built = cyclo::build_cyclotomic_instance(cfg);
      built->validate();
    } catch (const std::invalid_argument& e) {
      rec.check("cyclo.instance_invariants", false, [&] { return json{{"error", e.what()}}; });
      continue;
    }
    rec.check("cyclo.instance_invariants", true);
    auto T = std::make_shared<const SevenTuple>(std::move(*built));

    Rng rng = Rng(params.seed).split(1000 + ci);
    for (int trial = 0; trial < params.trials; ++trial) {
      // a = prod g_i^{e_i}, b likewise; exponents in [-3, 3]
      auto draw = [&](Vec& exps) {
        Rational a{1, 1};
        exps.assign(cfg.generators.size(), 0);
        for (std::size_t i = 0; i < cfg.generators.size(); ++i) {
          exps[i] = rng.between(-3, 3);
          for (Int k = 0; k < (exps[i] < 0 ? -exps[i] : exps[i]); ++k) (exps[i] < 0 ? a.den : a.num) *= cfg.generators[i].num;
        }
        return a;
      };
      Vec ea, eb;
      Rational a = draw(ea), b = draw(eb);
      Rational ab{a.num * b.num, a.den * b.den};
      for (std::size_t i = 0; i < cfg.sigma.size(); ++i) {
        const Int l = cfg.sigma[i], g = cfg.root(l);
        auto payload = [&] { return json{{"l", l}, {"a", a.str()}, {"b", b.str()}}; };
        rec.check("cyclo.v_additive", cyclo::v_ell(ab, l, M) == mod(cyclo::v_ell(a, l, M) + cyclo::v_ell(b, l, M), M), payload);
        rec.check("cyclo.u_additive",
                  cyclo::u_ell(ab, l, M, g) == mod(cyclo::u_ell(a, l, M, g) + cyclo::u_ell(b, l, M, g), M), payload);
        Rational p{1, 1};  // a^M, computed exactly when small
        bool small = true;
        for (Int k = 0; k < M && small; ++k) {
          if (std::abs(p.num) > (Int{1} << 30) / std::max<Int>(1, std::abs(a.num)) || p.den > (Int{1} << 30) / a.den) small = false;
          else {
            p.num *= a.num;
            p.den *= a.den;
          }
        }
        if (small)
          rec.check("cyclo.mth_powers_vanish", cyclo::v_ell(p, l, M) == 0 && cyclo::u_ell(p, l, M, g) == 0, payload);
        // phi from the instance against -u x_l - v P_l from the raw rational
        GradedElement raw = -GradedElement::generator(T->sites, static_cast<int>(i), cyclo::u_ell(a, l, M, g)) -
                            T->p[i].scaled(cyclo::v_ell(a, l, M));
        Vec coords(ea.size());
        for (std::size_t k = 0; k < ea.size(); ++k) coords[k] = mod(ea[k], M);
        rec.check("cyclo.phi_agreement", phi(*T, static_cast<int>(i), coords) == raw, payload);
      }
    }

    for (int r = 1; r <= 2; ++r) {
      if (T->site_count() + r > T->h) continue;
      Rng urng = Rng(params.seed).split(2000 + 10 * ci + r);
      auto where = [&] { return json{{"instance", io::to_json(*T)}, {"r", r}}; };
      for (const auto& e : sample_unit_systems(T, r, urng)) {
        check_unit_system_diagram(rec, e, where);
        check_unit_system_regulators(rec, e, urng, where);
      }
    }
  }
}

}  // namespace kolyvagin::verify
