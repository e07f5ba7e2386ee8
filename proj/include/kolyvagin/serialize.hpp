#pragma once

// JSON forms of every data type. Keys are emitted sorted and all numbers
// are exact integers, so equal values serialize to equal bytes.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclo.hpp"
#include "exterior.hpp"
#include "graded.hpp"
#include "instance.hpp"
#include "ksystems.hpp"
#include "unitsys.hpp"

namespace kolyvagin::io {

using json = nlohmann::json;

/// Thrown for well-formed JSON that does not describe a valid object.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline Int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw FormatError(std::string(what) + " must be an integer");
  return j.get<Int>();
}

inline Vec int_vector(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  Vec out;
  for (const auto& x : j) out.push_back(integer(x, what));
  return out;
}

inline SubsetMask subset_from_labels(const json& j, const SiteSet& s) {
  if (!j.is_array()) throw FormatError("subset must be an array of labels");
  SubsetMask n = 0;
  for (const auto& x : j) {
    if (!x.is_string()) throw FormatError("site labels must be strings");
    try {
      n |= SubsetMask{1} << s.index_of(x.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  return n;
}

}  // namespace detail

inline json labels(SubsetMask n, const SiteSet& s) {
  json out = json::array();
  for (int q : members(n)) out.push_back(s.site(q).label);
  return out;
}

// ---- graded elements and tensors ----

inline json to_json(const GradedElement& g) {
  const SiteSet& s = *g.ambient();
  json out = json::array();
  for (const auto& [mono, c] : g.terms()) {
    json m = json::object();
    for (int q = 0; q < s.size(); ++q)
      if (mono[q]) m[s.site(q).label] = mono[q];
    out.push_back({{"monomial", m}, {"coeff", c}});
  }
  return out;
}

inline GradedElement graded_from_json(const json& j, const SiteSetPtr& s) {
  if (!j.is_array()) throw FormatError("graded element must be an array of terms");
  GradedElement g(s);
  for (const auto& term : j) {
    const json& m = detail::field(term, "monomial");
    if (!m.is_object()) throw FormatError("monomial must be an object");
    Monomial mono(s->size(), 0);
    for (const auto& [label, e] : m.items()) {
      Int exp = detail::integer(e, "exponent");
      if (exp < 0 || exp > 255) throw FormatError("exponent out of range");
      int q;
      try {
        q = s->index_of(label);
      } catch (const std::invalid_argument& err) {
        throw FormatError(err.what());
      }
      mono[q] = static_cast<std::uint8_t>(exp);
    }
    g.add_term(mono, detail::integer(detail::field(term, "coeff"), "coeff"));
  }
  return g;
}

inline json to_json(const WedgeTensor& w) {
  json out = json::array();
  for (const auto& [b, c] : w.coefficients()) out.push_back({{"basis", basis_indices(b)}, {"value", to_json(c)}});
  return out;
}

inline WedgeTensor tensor_from_json(const json& j, const SiteSetPtr& s, int h, int rank) {
  if (!j.is_array()) throw FormatError("wedge tensor must be an array");
  WedgeTensor w(s, h, rank);
  for (const auto& entry : j) {
    Vec idx = detail::int_vector(detail::field(entry, "basis"), "basis index");
    if (static_cast<int>(idx.size()) != rank) throw FormatError("basis tuple has the wrong length");
    BasisMask b = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || idx[i] >= h) throw FormatError("basis index out of range");
      if (i > 0 && idx[i] <= idx[i - 1]) throw FormatError("basis indices must be strictly increasing");
      b |= BasisMask{1} << idx[i];
    }
    w.add(b, graded_from_json(detail::field(entry, "value"), s));
  }
  return w;
}

// ---- instances ----

inline json to_json(const SevenTuple& T) {
  const SiteSet& s = *T.sites;
  json out;
  out["modulus"] = T.modulus();
  out["hRank"] = T.h;
  out["sites"] = json::array();
  out["v"] = json::object();
  out["u"] = json::object();
  out["P"] = json::object();
  for (int q = 0; q < s.size(); ++q) {
    const auto& label = s.site(q).label;
    out["sites"].push_back({{"label", label}, {"t", s.site(q).t}});
    out["v"][label] = T.v[q];
    out["u"][label] = T.u[q];
    out["P"][label] = to_json(T.p[q]);
  }
  if (s.dmax() != s.size()) out["dmax"] = s.dmax();
  if (!T.meta.empty()) out["meta"] = T.meta;
  return out;
}

inline SevenTuple instance_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("instance must be an object");
  SevenTuple T;
  std::vector<Site> sites;
  const json& js = detail::field(j, "sites");
  if (!js.is_array()) throw FormatError("sites must be an array");
  for (const auto& x : js) {
    const json& label = detail::field(x, "label");
    if (!label.is_string()) throw FormatError("site label must be a string");
    sites.push_back({label.get<std::string>(), detail::integer(detail::field(x, "t"), "t")});
  }
  std::optional<int> dmax;
  if (j.contains("dmax")) dmax = static_cast<int>(detail::integer(j.at("dmax"), "dmax"));
  try {
    T.sites = make_sites(detail::integer(detail::field(j, "modulus"), "modulus"), std::move(sites), dmax);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  Int h = detail::integer(detail::field(j, "hRank"), "hRank");
  if (h < 0 || h > 30) throw FormatError("hRank must lie in [0, 30]");
  T.h = static_cast<int>(h);
  for (const auto& site : T.sites->sites()) {
    T.v.push_back(detail::int_vector(detail::field(detail::field(j, "v"), site.label.c_str()), "v"));
    T.u.push_back(detail::int_vector(detail::field(detail::field(j, "u"), site.label.c_str()), "u"));
    T.p.push_back(graded_from_json(detail::field(detail::field(j, "P"), site.label.c_str()), T.sites));
  }
  if (j.contains("meta")) {
    if (!j.at("meta").is_object()) throw FormatError("meta must be an object");
    for (const auto& [k, v] : j.at("meta").items()) {
      if (!v.is_string()) throw FormatError("meta values must be strings");
      T.meta[k] = v.get<std::string>();
    }
  }
  try {
    T.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid instance: ") + e.what());
  }
  return T;
}

// ---- system collections ----

inline json to_json(const SystemCollection& sys) {
  const SiteSet& s = *sys.instance->sites;
  json out;
  out["kind"] = to_string(sys.kind);
  out["r"] = sys.r;
  out["entries"] = json::array();
  for (SubsetMask n = 0; n < sys.entries.size(); ++n)
    out["entries"].push_back({{"n", labels(n, s)}, {"value", to_json(sys.entries[n])}});
  return out;
}

/// Subsets missing from "entries" are zero. Entry shapes are not checked
/// here; check_axioms reports them.
inline SystemCollection system_from_json(const json& j, InstancePtr T) {
  SystemKind kind;
  const json& k = detail::field(j, "kind");
  if (!k.is_string()) throw FormatError("kind must be a string");
  try {
    kind = parse_kind(k.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  Int r = detail::integer(detail::field(j, "r"), "r");
  if (r < 0 || r > T->h) throw FormatError("r must lie in [0, hRank]");
  auto sys = SystemCollection::zero(T, static_cast<int>(r), kind);
  const json& entries = detail::field(j, "entries");
  if (!entries.is_array()) throw FormatError("entries must be an array");
  std::vector<bool> seen(sys.entries.size(), false);
  for (const auto& e : entries) {
    SubsetMask n = detail::subset_from_labels(detail::field(e, "n"), *T->sites);
    if (seen[n]) throw FormatError("duplicate entry for a subset");
    seen[n] = true;
    sys[n] = tensor_from_json(detail::field(e, "value"), T->sites, T->h, sys.r);
  }
  return sys;
}

// ---- unit systems ----

inline json to_json(const UnitSystem& e) {
  const SiteSet& s = *e.instance->sites;
  json out;
  out["ordering"] = json::array();
  for (int q : e.chain.ordering) out["ordering"].push_back(s.site(q).label);
  out["chain"] = json::array();
  for (std::size_t i = 0; i < e.chain.levels.size(); ++i) out["chain"].push_back(labels(e.chain.level_mask(i), s));
  out["r"] = e.r;
  out["epsTop"] = to_json(e.top);
  return out;
}

inline UnitSystem unit_system_from_json(const json& j, InstancePtr T) {
  const SiteSet& s = *T->sites;
  Chain chain;
  const json& ord = detail::field(j, "ordering");
  if (!ord.is_array()) throw FormatError("ordering must be an array");
  for (const auto& x : ord) {
    if (!x.is_string()) throw FormatError("ordering entries must be labels");
    try {
      chain.ordering.push_back(s.index_of(x.get<std::string>()));
    } catch (const std::invalid_argument& err) {
      throw FormatError(err.what());
    }
  }
  const json& ch = detail::field(j, "chain");
  if (!ch.is_array()) throw FormatError("chain must be an array");
  for (const auto& level : ch) {
    SubsetMask n = detail::subset_from_labels(level, s);
    const int k = subset_size(n);
    SubsetMask expect = 0;
    for (int i = 0; i < k && i < static_cast<int>(chain.ordering.size()); ++i) expect |= SubsetMask{1} << chain.ordering[i];
    if (n != expect) throw FormatError("chain members must be initial segments of the ordering");
    chain.levels.push_back(k);
  }
  Int r = detail::integer(detail::field(j, "r"), "r");
  if (r < 0 || r > 30) throw FormatError("r out of range");
  try {
    chain.validate(s.size());
    return UnitSystem::from_top(T, chain, static_cast<int>(r),
                                tensor_from_json(detail::field(j, "epsTop"), T->sites, T->h, s.size() + static_cast<int>(r)));
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

// ---- cyclotomic configurations ----

inline json to_json(const cyclo::CycloConfig& c) {
  json out;
  out["p"] = c.p;
  out["k"] = c.k;
  out["sigma"] = c.sigma;
  out["roots"] = json::object();
  for (const auto& [l, g] : c.roots) out["roots"][std::to_string(l)] = g;
  out["generators"] = json::array();
  for (const auto& a : c.generators) out["generators"].push_back(a.str());
  return out;
}

inline cyclo::CycloConfig cyclo_config_from_json(const json& j) {
  cyclo::CycloConfig c;
  c.p = detail::integer(detail::field(j, "p"), "p");
  c.k = static_cast<int>(detail::integer(detail::field(j, "k"), "k"));
  c.sigma = detail::int_vector(detail::field(j, "sigma"), "sigma");
  if (j.contains("roots")) {
    if (!j.at("roots").is_object()) throw FormatError("roots must be an object");
    for (const auto& [l, g] : j.at("roots").items()) {
      Int prime;
      try {
        prime = std::stoll(l);
      } catch (const std::exception&) {
        throw FormatError("roots keys must be primes");
      }
      c.roots[prime] = detail::integer(g, "root");
    }
  }
  const json& gens = detail::field(j, "generators");
  if (!gens.is_array()) throw FormatError("generators must be an array");
  for (const auto& g : gens) {
    if (g.is_number_integer()) {
      c.generators.push_back({g.get<Int>(), 1});
      continue;
    }
    if (!g.is_string()) throw FormatError("generators must be \"num/den\" strings");
    try {
      c.generators.push_back(cyclo::Rational::parse(g.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid cyclotomic config: ") + e.what());
  }
  return c;
}

}  // namespace kolyvagin::io
