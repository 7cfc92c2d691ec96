#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "exterior.hpp"
#include "graph.hpp"
#include "indicators.hpp"
#include "transform.hpp"

namespace nfg {

// One local function: axis k of `table` is variable vars[k].
struct LocalFunction {
  std::string name;
  Factor table;
  std::vector<std::string> vars;
};

// Variables and local functions. The same shape describes factor graphs (product
// semantics), convolutional factor graphs (convolution) and CDNs (product of CDFs).
struct ModelDesc {
  std::vector<std::pair<std::string, Alphabet>> variables;
  std::vector<LocalFunction> functions;

  const Alphabet& alphabet_of(const std::string& v) const {
    for (auto& [n, a] : variables)
      if (n == v) return a;
    throw ValidationError("unknown variable '" + v + "'");
  }
  std::vector<std::string> variable_names() const {
    std::vector<std::string> out;
    for (auto& [n, a] : variables) out.push_back(n);
    return out;
  }
  std::size_t degree(const std::string& v) const {
    std::size_t d = 0;
    for (auto& f : functions)
      for (auto& x : f.vars) d += x == v;
    return d;
  }
};

using FactorGraphDesc = ModelDesc;
using CfgDesc = ModelDesc;
using CdnDesc = ModelDesc;

inline void check_desc(const ModelDesc& d) {
  std::set<std::string> names;
  for (auto& [n, a] : d.variables)
    if (!names.insert(n).second) throw ValidationError("duplicate variable '" + n + "'");
  std::set<std::string> fnames;
  for (auto& f : d.functions) {
    if (!fnames.insert(f.name).second) throw ValidationError("duplicate function '" + f.name + "'");
    if (f.table.rank() != f.vars.size())
      throw ValidationError("function '" + f.name + "' has " + std::to_string(f.table.rank()) + " axes but " +
                            std::to_string(f.vars.size()) + " neighbors");
    std::set<std::string> seen;
    for (std::size_t k = 0; k < f.vars.size(); ++k) {
      if (!seen.insert(f.vars[k]).second)
        throw ValidationError("function '" + f.name + "' lists variable '" + f.vars[k] + "' twice");
      if (!(f.table.domain().axis(k).alphabet == d.alphabet_of(f.vars[k])))
        throw ValidationError("function '" + f.name + "' disagrees on the alphabet of '" + f.vars[k] + "'");
    }
  }
}

inline Factor table_on_vars(const LocalFunction& f) { return with_labels(f.table, f.vars); }

inline ProductDomain variable_domain(const ModelDesc& d) {
  std::vector<Axis> axes;
  for (auto& [n, a] : d.variables) axes.push_back({n, a});
  return ProductDomain(axes);
}

// Pointwise product of the local functions over all variables.
inline Factor fg_product(const ModelDesc& d) {
  check_desc(d);
  std::vector<Factor> tabs;
  for (auto& f : d.functions) tabs.push_back(table_on_vars(f));
  tabs.push_back(Factor::constant(variable_domain(d), 1.0));
  std::vector<const Factor*> ps;
  for (auto& t : tabs) ps.push_back(&t);
  return aligned_to(combine(ps, {}), d.variable_names());
}

// Convolutional product by direct definition: F(x) is the sum over all (s_j) with
// x = sum_j s_j (each s_j zero-extended to all variables) of prod_j f_j(s_j).
inline Factor cfg_product(const ModelDesc& d) {
  check_desc(d);
  for (auto& [n, a] : d.variables)
    if (!a.is_group()) throw ValidationError("convolutional model needs group alphabets ('" + n + "')");
  ProductDomain dom = variable_domain(d);
  Factor acc(dom);
  acc[0] = 1.0;
  for (auto& f : d.functions) {
    std::vector<std::size_t> pos;
    for (auto& v : f.vars) pos.push_back(dom.index_of(v));
    Factor next(dom);
    for (std::size_t x = 0; x < dom.size(); ++x) {
      if (acc[x] == Complex{}) continue;
      auto xc = dom.coords(x);
      for (std::size_t s = 0; s < f.table.size(); ++s) {
        if (f.table[s] == Complex{}) continue;
        auto sc = f.table.domain().coords(s);
        auto yc = xc;
        for (std::size_t k = 0; k < pos.size(); ++k) yc[pos[k]] = dom.axis(pos[k]).alphabet.add(yc[pos[k]], sc[k]);
        next[dom.linear(yc)] += acc[x] * f.table[s];
      }
    }
    acc = std::move(next);
  }
  return acc;
}

inline Factor cdn_product(const ModelDesc& d) { return fg_product(d); }

// ---------------------------------------------------------------------------
// Factor graphs and constrained models

namespace detail {

// Interfaces of kind `kind` (arg1 on the half edge), one latent per function.
inline Graph desc_to_nfg(const ModelDesc& d, IndicatorKind kind, const std::string& prefix) {
  check_desc(d);
  std::vector<Vertex> vs;
  std::vector<InternalEdge> in;
  std::vector<HalfEdge> hs;
  for (auto& [x, a] : d.variables) {
    std::vector<std::string> labels{"out"};
    for (auto& f : d.functions)
      for (auto& v : f.vars)
        if (v == x) labels.push_back(f.name);
    Factor t;
    if (labels.size() == 1) {
      if (kind != IndicatorKind::eq) throw ValidationError("variable '" + x + "' has no local function");
      t = make_indicator(IndicatorKind::one, a, 1);
    } else {
      t = make_indicator(kind, a, labels.size());
    }
    vs.push_back({prefix + x, with_labels(t, labels)});
    hs.push_back({x, a, {prefix + x, "out"}, x});
  }
  for (auto& f : d.functions) {
    vs.push_back({f.name, f.table});
    for (std::size_t k = 0; k < f.vars.size(); ++k)
      in.push_back({f.name + ":" + f.vars[k], d.alphabet_of(f.vars[k]), {prefix + f.vars[k], f.name},
                    {f.name, f.table.domain().axis(k).label}});
  }
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

// Inverse of desc_to_nfg once interfaces are known to be of the right kind.
inline ModelDesc nfg_to_desc(const Graph& g, const ClassFlags& flags) {
  ModelDesc d;
  std::map<std::string, std::string> var_of;
  for (auto& h : g.half_edges()) {
    d.variables.push_back({h.external, h.alphabet});
    var_of[h.end.vertex] = h.external;
  }
  for (auto& j : flags.latents) {
    const Factor& f = g.vertex(j).factor;
    LocalFunction lf{j, f, {}};
    for (auto& ax : f.domain().axes()) {
      const auto& e = g.internal(g.edge_of_axis(j, ax.label));
      lf.vars.push_back(var_of.at(Graph::other(e, j)));
    }
    std::set<std::string> seen;
    for (auto& v : lf.vars)
      if (!seen.insert(v).second)
        throw ValidationError("latent '" + j + "' has parallel edges to the interface of '" + v + "'");
    d.functions.push_back(std::move(lf));
  }
  return d;
}

}  // namespace detail

inline Graph fg_to_nfg(const FactorGraphDesc& d) { return detail::desc_to_nfg(d, IndicatorKind::eq, "eq_"); }

inline FactorGraphDesc nfg_to_fg(const Graph& g, double tol = default_tol) {
  auto flags = classify(g, tol);
  if (!flags.nfg_model) throw ValidationError("graph is not an NFG model");
  for (auto& i : flags.interfaces) {
    const Factor& f = g.vertex(i).factor;
    const std::string pivot = g.half_at(i)[0]->end.axis;
    IndicatorKind want = f.rank() == 1 ? IndicatorKind::one : IndicatorKind::eq;
    if (!is_indicator_on(f, want, pivot, tol))
      throw ValidationError("interface '" + i + "' is not an equality indicator; normalize the model first");
  }
  return detail::nfg_to_desc(g, flags);
}

// Equality interfaces with each split bivariate absorbed into the adjacent latent.
// Unary interfaces have no latent to absorb into and are kept as they are.
inline Graph normalize_constrained(const Graph& g, double tol = default_tol) {
  auto flags = classify(g, tol);
  if (!flags.nfg_model || !flags.constrained) throw ValidationError("graph is not a constrained NFG model");
  std::map<std::string, Factor> lat;
  for (auto& j : flags.latents) lat[j] = detail::by_edge_id(g, j);
  std::vector<Vertex> vs;
  std::map<std::string, Alphabet> new_alpha;
  for (auto& v : g.vertices()) {
    if (lat.count(v.id)) continue;
    const Factor& f = v.factor;
    if (f.rank() < 2) {
      vs.push_back(v);
      continue;
    }
    const HalfEdge& h = *g.half_at(v.id)[0];
    const std::string pivot = h.end.axis;
    auto parts = split_decompose(f, pivot, tol);
    for (auto& part : *parts) {
      const std::string axis = part.domain().axis(1).label;
      const auto& e = g.internal(g.edge_of_axis(v.id, axis));
      const std::string j = Graph::other(e, v.id);
      Factor b = with_labels(part, {"~tmp", e.id});
      lat[j] = relabel(contract(lat[j], b), "~tmp", e.id);
      new_alpha[e.id] = h.alphabet;
    }
    std::vector<Axis> axes;
    for (auto& ax : f.domain().axes()) axes.push_back({ax.label, h.alphabet});
    vs.push_back({v.id, Factor(ProductDomain(axes), make_indicator(IndicatorKind::eq, h.alphabet, f.rank()).values())});
  }
  for (auto& j : flags.latents) {
    const Factor& f = g.vertex(j).factor;
    auto names = detail::edge_id_names(g, j);
    std::map<std::string, std::string> back;
    std::vector<std::string> order;
    for (auto& ax : f.domain().axes()) {
      order.push_back(names.at(ax.label));
      back[order.back()] = ax.label;
    }
    vs.push_back({j, relabel(aligned_to(lat[j], order), back)});
  }
  std::vector<InternalEdge> in = g.internal_edges();
  for (auto& e : in)
    if (new_alpha.count(e.id)) e.alphabet = new_alpha.at(e.id);
  return Graph(std::move(vs), std::move(in), g.half_edges());
}

// ---------------------------------------------------------------------------
// Convolutional factor graphs

inline Graph cfg_to_nfg(const CfgDesc& d) {
  for (auto& [n, a] : d.variables)
    if (!a.is_group()) throw ValidationError("convolutional model needs group alphabets ('" + n + "')");
  return detail::desc_to_nfg(d, IndicatorKind::sum, "sum_");
}

inline CfgDesc nfg_to_cfg(const Graph& g, double tol = default_tol) {
  auto flags = classify(g, tol);
  if (!flags.nfg_model || !flags.generative) throw ValidationError("graph is not a generative NFG model");
  for (auto& i : flags.interfaces) {
    const Factor& f = g.vertex(i).factor;
    if (f.rank() < 2 || !is_indicator_on(f, IndicatorKind::sum, g.half_at(i)[0]->end.axis, tol))
      throw ValidationError("interface '" + i + "' is not a sum indicator generated on its half edge");
  }
  return detail::nfg_to_desc(g, flags);
}

// ---------------------------------------------------------------------------
// Max models, cumulus transforms and CDNs

// Max interfaces (arg1 on the half edge) over probability-distribution latents.
inline Graph max_to_nfg(const ModelDesc& d) {
  for (auto& [n, a] : d.variables)
    if (!a.is_ordered()) throw ValidationError("max model needs ordered alphabets ('" + n + "')");
  return detail::desc_to_nfg(d, IndicatorKind::max, "max_");
}

// External cumulus transformer [x <= y]: x faces the interface, y is the new external.
inline Factor external_cumulus(const Alphabet& a) { return aligned_to(with_labels(make_cumulus(a), {"y", "x"}), {"x", "y"}); }

inline HolographicSpec cumulus_externals(const Graph& g) {
  HolographicSpec spec;
  for (auto& h : g.half_edges()) spec.external[h.id] = external_cumulus(h.alphabet);
  return spec;
}

// Graph whose exterior is the CDF of the base model's exterior.
inline Graph cumulus_transformed(const Graph& g, double tol = default_tol) {
  return holographic_transform(g, cumulus_externals(g), tol);
}

// Max vertex whose generated argument passes through A toward external x1 while the
// other arguments pass through D toward x2..xn. Its exterior is the equality indicator.
inline Graph max_lemma_graph(const Alphabet& a, std::size_t n) {
  if (n < 2) throw ValidationError("max lemma needs degree >= 2");
  std::vector<Vertex> vs{{"max", make_indicator(IndicatorKind::max, a, n)}};
  std::vector<InternalEdge> in;
  std::vector<HalfEdge> hs;
  vs.push_back({"A", make_cumulus(a)});  // A(x1, s1)
  in.push_back({"s1", a, {"max", "arg1"}, {"A", "arg2"}});
  hs.push_back({"x1", a, {"A", "arg1"}, "x1"});
  for (std::size_t k = 2; k <= n; ++k) {
    const std::string id = "D" + std::to_string(k), s = "s" + std::to_string(k), x = "x" + std::to_string(k);
    vs.push_back({id, make_difference(a)});  // D(s_k, x_k)
    in.push_back({s, a, {"max", "arg" + std::to_string(k)}, {id, "arg1"}});
    hs.push_back({x, a, {id, "arg2"}, x});
  }
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

// Problems that keep a table from being a CDF; empty means it passes.
inline std::vector<std::string> cdf_violations(const Factor& f, double tol = default_tol) {
  std::vector<std::string> out;
  const auto& d = f.domain();
  if (!f.is_real(tol)) out.push_back("complex values");
  for (std::size_t k = 0; k < f.size(); ++k)
    if (f[k].real() < -tol) {
      out.push_back("negative value");
      break;
    }
  for (std::size_t i = 0; i < d.rank(); ++i) {
    const Alphabet& a = d.axis(i).alphabet;
    if (!a.is_ordered()) {
      out.push_back("axis '" + d.axis(i).label + "' is not ordered");
      continue;
    }
    bool ok = true;
    for (std::size_t lin = 0; lin < f.size() && ok; ++lin) {
      auto c = d.coords(lin);
      auto comp = a.decode(c[i]);
      for (std::size_t r = 0; r < comp.size() && ok; ++r) {
        if (comp[r] + 1 >= a.radices()[r]) continue;
        auto up = comp;
        ++up[r];
        auto c2 = c;
        c2[i] = a.encode(up);
        if (f.at(c2).real() < f[lin].real() - tol) ok = false;
      }
    }
    if (!ok) out.push_back("decreasing along '" + d.axis(i).label + "'");
  }
  std::vector<std::size_t> top;
  for (auto& ax : d.axes()) top.push_back(ax.alphabet.top());
  if (std::abs(f.at(top) - Complex{1.0, 0.0}) > tol) out.push_back("value at the top corner is not 1");
  return out;
}

namespace detail {

inline bool is_distribution(const Factor& f, double tol) {
  if (!f.is_real(tol)) return false;
  for (auto& v : f.values())
    if (v.real() < -tol) return false;
  return std::abs(f.total() - Complex{1.0, 0.0}) <= tol;
}

}  // namespace detail

// The transformed model must be a cumulus-transformed max model (as produced by
// cumulus_transformed) with distribution latents. Local functions are the latent CDFs.
inline CdnDesc to_cdn(const Graph& g, double tol = default_tol) {
  auto flags = classify(g, tol);
  if (!flags.nfg_model) throw ValidationError("graph is not an NFG model");
  std::vector<std::string> problems;
  for (auto& i : flags.interfaces) {
    const Factor& f = g.vertex(i).factor;
    const HalfEdge& h = *g.half_at(i)[0];
    if (f.rank() < 2) {
      problems.push_back("interface '" + i + "' has no hidden argument");
      continue;
    }
    bool alph_ok = true;
    for (auto& ax : f.domain().axes()) alph_ok = alph_ok && ax.alphabet == h.alphabet;
    if (!alph_ok || !h.alphabet.is_ordered()) {
      problems.push_back("interface '" + i + "' is not a max indicator over one ordered alphabet");
      continue;
    }
    std::vector<std::string> order{h.end.axis};
    for (auto& l : f.labels())
      if (l != h.end.axis) order.push_back(l);
    Factor base = with_labels(make_indicator(IndicatorKind::max, h.alphabet, f.rank()), order);
    Factor transformed =
        contract(relabel(base, h.end.axis, "~x"), with_labels(external_cumulus(h.alphabet), {"~x", h.end.axis}));
    if (max_abs_diff(f, transformed) <= tol) continue;
    if (max_abs_diff(f, base) <= tol)
      problems.push_back("interface '" + i + "' lacks the cumulus external transformer");
    else
      problems.push_back("interface '" + i + "' is not a cumulus-transformed max indicator");
  }
  for (auto& j : flags.latents)
    if (!detail::is_distribution(g.vertex(j).factor, tol))
      problems.push_back("latent '" + j + "' is not a probability distribution");
  if (!problems.empty()) {
    std::string msg = "not a CDN-convertible model:";
    for (auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  CdnDesc d = detail::nfg_to_desc(g, flags);
  for (auto& f : d.functions) {
    f.table = fast_axis_transform(f.table, Kernel::cumulus, f.table.labels());
    auto v = cdf_violations(f.table, tol);
    if (!v.empty()) throw NumericalError("CDF of '" + f.name + "' fails: " + v.front());
  }
  return d;
}

// A CDN back to its NFG: latents are the mass functions recovered by differencing each
// CDF, interfaces are cumulus-transformed max indicators.
inline Graph cdn_to_nfg(const CdnDesc& d, double tol = default_tol) {
  check_desc(d);
  ModelDesc base = d;
  for (auto& f : base.functions) {
    auto v = cdf_violations(f.table, tol);
    if (!v.empty()) throw ValidationError("function '" + f.name + "' is not a CDF: " + v.front());
    f.table = fast_axis_transform(f.table, Kernel::difference, f.table.labels());
  }
  return cumulus_transformed(max_to_nfg(base), tol);
}

// ---------------------------------------------------------------------------
// Independence

enum class IndependenceKind { conditional, marginal, unknown };

inline const char* independence_name(IndependenceKind k) {
  switch (k) {
    case IndependenceKind::conditional: return "conditional";
    case IndependenceKind::marginal: return "marginal";
    case IndependenceKind::unknown: return "unknown";
  }
  return "?";
}

struct IndependenceVerdict {
  IndependenceKind kind = IndependenceKind::unknown;
  std::set<std::string> witness;  // separating interface set
  bool also_marginal = false;
  std::string reason;
};

// A, B, S name interface vertices or their external variables.
inline IndependenceVerdict independence(const Graph& g, const std::set<std::string>& A, const std::set<std::string>& B,
                                        const std::set<std::string>& S, double tol = default_tol) {
  auto flags = classify(g, tol);
  if (!flags.nfg_model) throw ValidationError("graph is not an NFG model");
  std::set<std::string> iset(flags.interfaces.begin(), flags.interfaces.end());
  auto resolve = [&](const std::set<std::string>& in) {
    std::set<std::string> out;
    for (auto& n : in) {
      std::string v = n;
      if (!iset.count(v)) {
        bool found = false;
        for (auto& h : g.half_edges())
          if (h.external == n) {
            v = h.end.vertex;
            found = true;
          }
        if (!found) throw ValidationError("'" + n + "' is neither an interface vertex nor an external variable");
      }
      out.insert(v);
    }
    return out;
  };
  auto a = resolve(A), b = resolve(B), s = resolve(S);
  IndependenceVerdict v;
  if (!separated(g, a, b, s)) {
    v.reason = "not separated";
    return v;
  }
  v.witness = s;
  if (flags.constrained) {
    v.kind = s.empty() ? IndependenceKind::marginal : IndependenceKind::conditional;
    v.also_marginal = flags.generative || (flags.extended_generative && s.empty());
    v.reason = "separated in a constrained model";
  } else if (flags.generative) {
    v.kind = IndependenceKind::marginal;
    v.reason = "separated in a generative model";
  } else if (flags.extended_generative && s.empty()) {
    v.kind = IndependenceKind::marginal;
    v.reason = "separated in an extended generative model";
  } else {
    v.reason = "separated, but the model class supports no claim";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Sampling

enum class SamplerMode { automatic, constrained, generative };

struct SampleResult {
  std::vector<std::string> externals;
  std::vector<std::vector<std::size_t>> samples;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  std::string mode;

  double acceptance_rate() const { return proposals ? double(accepted) / double(proposals) : 0.0; }

  // Empirical law as a table over the externals.
  Factor histogram(const Graph& g) const {
    std::vector<Axis> axes;
    for (auto& n : externals) axes.push_back({n, g.half_by_external(n).alphabet});
    Factor h{ProductDomain(axes)};
    for (auto& s : samples) h.at(s) += 1.0;
    return scaled(h, 1.0 / double(std::max<std::size_t>(samples.size(), 1)));
  }
};

// Exterior scaled to total 1; requires a nonnegative real exterior with positive mass.
inline Factor normalized_exterior(const Graph& g) {
  Factor z = exterior_bruteforce(g);
  const Complex t = z.total();
  if (!z.is_real() || t.real() <= 0.0) throw NumericalError("exterior has no positive real mass");
  return scaled(z, 1.0 / t.real());
}

inline double total_variation(const Factor& p, const Factor& q) {
  Factor qq = aligned_to(q, p.labels());
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - qq[k]);
  return s / 2.0;
}

namespace detail {

inline void require_nonnegative(const Factor& f, const std::string& who, double tol) {
  if (!f.is_real(tol)) throw ValidationError("'" + who + "' is complex-valued; sampling needs nonnegative reals");
  for (auto& v : f.values())
    if (v.real() < -tol) throw ValidationError("'" + who + "' has negative values; sampling needs nonnegative reals");
}

inline std::discrete_distribution<std::size_t> weights_of(const std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += std::max(x, 0.0);
  if (s <= 0.0) return {};
  std::vector<double> c;
  for (double x : w) c.push_back(std::max(x, 0.0));
  return std::discrete_distribution<std::size_t>(c.begin(), c.end());
}

inline std::vector<double> real_parts(const Factor& f) {
  std::vector<double> w;
  for (auto& v : f.values()) w.push_back(v.real());
  return w;
}

}  // namespace detail

// Constrained path: draw each interface's x_i from its split marginal and the hidden
// arguments from the conditionals, then accept with prod_j f_j / prod_j max f_j.
// Generative path: draw each latent's arguments jointly, then each x_i from its
// interface conditional. Extended generative interfaces hand their marginal's
// univariate factors to the adjacent latents first.
inline SampleResult sample(const Graph& g, std::size_t count, std::uint64_t seed, SamplerMode mode = SamplerMode::automatic,
                           std::uint64_t max_rejects = 1000000, double tol = default_tol) {
  auto flags = classify(g, tol);
  if (!flags.nfg_model) throw ValidationError("graph is not an NFG model");
  for (auto& v : g.vertices()) detail::require_nonnegative(v.factor, v.id, tol);
  if (mode == SamplerMode::automatic)
    mode = flags.extended_generative ? SamplerMode::generative
           : flags.constrained       ? SamplerMode::constrained
                                     : throw ValidationError("model is neither constrained nor extended generative");
  if (mode == SamplerMode::generative && !flags.extended_generative)
    throw ValidationError("generative sampling needs an (extended) generative model");
  if (mode == SamplerMode::constrained && !flags.constrained)
    throw ValidationError("rejection sampling needs a constrained model");

  std::mt19937_64 rng(seed);
  SampleResult out;
  out.externals = g.external_names();
  out.mode = mode == SamplerMode::generative ? "generative" : "constrained";
  std::map<std::string, std::size_t> ext_pos;
  for (std::size_t k = 0; k < out.externals.size(); ++k) ext_pos[g.half_by_external(out.externals[k]).end.vertex] = k;

  std::map<std::string, Factor> lat;  // edge-id labeled latents
  for (auto& j : flags.latents) lat[j] = detail::by_edge_id(g, j);
  std::map<std::string, std::size_t> edge_value;

  if (mode == SamplerMode::generative) {
    struct Iface {
      std::string id;
      Factor f;  // edge-id labeled, pivot = half id
      std::string pivot;
      std::vector<std::string> edges;
      std::vector<std::discrete_distribution<std::size_t>> cond;  // per edge assignment
      std::vector<bool> has_mass;
    };
    std::vector<Iface> ifs;
    for (auto& i : flags.interfaces) {
      Iface it{i, detail::by_edge_id(g, i), g.half_at(i)[0]->id, {}, {}, {}};
      if (it.f.rank() >= 2) {
        Factor m = marginalize_sum(it.f, it.pivot);
        auto prof = rank_one_profiles(m, tol);
        for (std::size_t k = 0; k < m.rank(); ++k) {
          const std::string e = m.domain().axis(k).label;
          const std::string j = Graph::other(g.internal(e), i);
          lat[j] = multiply(lat[j], (*prof)[k]);
        }
      }
      for (auto& l : it.f.labels())
        if (l != it.pivot) it.edges.push_back(l);
      std::vector<std::string> order = it.edges;
      order.push_back(it.pivot);
      Factor a = aligned_to(it.f, order);
      const std::size_t nx = g.half(it.pivot).alphabet.size();
      for (std::size_t base = 0; base < a.size(); base += nx) {
        std::vector<double> w;
        double mass = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
          w.push_back(a[base + x].real());
          mass += std::max(w.back(), 0.0);
        }
        it.cond.push_back(detail::weights_of(w));
        it.has_mass.push_back(mass > 0.0);
      }
      ifs.push_back(std::move(it));
    }
    struct Lat {
      Factor f;
      std::discrete_distribution<std::size_t> dist;
    };
    std::vector<Lat> lats;
    for (auto& j : flags.latents) {
      if (lat[j].rank() == 0) continue;
      lats.push_back({lat[j], detail::weights_of(detail::real_parts(lat[j]))});
      if (lats.back().f.total().real() <= 0.0) throw ValidationError("latent '" + j + "' has empty support");
    }
    for (std::size_t n = 0; n < count; ++n) {
      for (auto& l : lats) {
        auto c = l.f.domain().coords(l.dist(rng));
        for (std::size_t k = 0; k < c.size(); ++k) edge_value[l.f.domain().axis(k).label] = c[k];
      }
      std::vector<std::size_t> s(out.externals.size());
      for (auto& it : ifs) {
        std::size_t row = 0;
        for (auto& e : it.edges) row = row * g.internal(e).alphabet.size() + edge_value.at(e);
        if (!it.has_mass[row]) throw NumericalError("interface '" + it.id + "' has no mass for a sampled hidden state");
        s[ext_pos.at(it.id)] = it.cond[row](rng);
      }
      ++out.proposals;
      ++out.accepted;
      out.samples.push_back(std::move(s));
    }
    return out;
  }

  struct Part {
    std::string edge;
    std::vector<std::discrete_distribution<std::size_t>> given_x;
  };
  struct Iface {
    std::string id;
    std::discrete_distribution<std::size_t> px;
    std::vector<Part> parts;
  };
  std::vector<Iface> ifs;
  for (auto& i : flags.interfaces) {
    Factor f = detail::by_edge_id(g, i);
    const std::string pivot = g.half_at(i)[0]->id;
    const std::size_t nx = g.half(pivot).alphabet.size();
    Iface it{i, {}, {}};
    std::vector<double> px(nx, 1.0);
    if (f.rank() == 1) {
      px = detail::real_parts(f);
    } else {
      auto parts = split_decompose(f, pivot, tol);
      for (auto& p : *parts) {
        detail::require_nonnegative(p, i, tol);
        Part part{p.domain().axis(1).label, {}};
        const std::size_t ns = p.domain().dim(1);
        for (std::size_t x = 0; x < nx; ++x) {
          std::vector<double> w;
          double row = 0.0;
          for (std::size_t s = 0; s < ns; ++s) {
            w.push_back(p.at({x, s}).real());
            row += w.back();
          }
          px[x] *= row;
          part.given_x.push_back(detail::weights_of(w));
        }
        it.parts.push_back(std::move(part));
      }
    }
    double mass = 0.0;
    for (double w : px) mass += std::max(w, 0.0);
    if (mass <= 0.0) throw ValidationError("interface '" + i + "' has empty support");
    it.px = detail::weights_of(px);
    ifs.push_back(std::move(it));
  }
  struct Lat {
    Factor f;
    double peak;
  };
  std::vector<Lat> lats;
  for (auto& j : flags.latents) {
    if (lat[j].rank() == 0) continue;
    double peak = lat[j].max_abs();
    if (peak <= 0.0) throw ValidationError("latent '" + j + "' has empty support");
    lats.push_back({lat[j], peak});
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t n = 0; n < count; ++n) {
    std::uint64_t rejects = 0;
    while (true) {
      ++out.proposals;
      std::vector<std::size_t> s(out.externals.size());
      for (auto& it : ifs) {
        std::size_t x = it.px(rng);
        s[ext_pos.at(it.id)] = x;
        for (auto& p : it.parts) edge_value[p.edge] = p.given_x[x](rng);
      }
      double h = 1.0;
      for (auto& l : lats) {
        std::vector<std::size_t> c;
        for (auto& ax : l.f.domain().axes()) c.push_back(edge_value.at(ax.label));
        h *= l.f.at(c).real() / l.peak;
      }
      if (unif(rng) < h) {
        ++out.accepted;
        out.samples.push_back(std::move(s));
        break;
      }
      if (++rejects > max_rejects) throw NumericalError("rejection sampler exceeded " + std::to_string(max_rejects) + " rejects");
    }
  }
  return out;
}

}  // namespace nfg
