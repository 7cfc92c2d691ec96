#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "exterior.hpp"
#include "graph.hpp"
#include "indicators.hpp"

namespace nfg {

namespace detail {

// Factor of v with axes named by edge id (half edges included, loops as id@a / id@b).
inline std::map<std::string, std::string> edge_id_names(const Graph& g, const std::string& v) {
  std::map<std::string, std::string> names;
  for (auto* e : g.internal_at(v)) {
    if (e->is_loop()) {
      names[e->a.axis] = e->id + "@a";
      names[e->b.axis] = e->id + "@b";
    } else {
      names[e->a.vertex == v ? e->a.axis : e->b.axis] = e->id;
    }
  }
  for (auto* h : g.half_at(v)) names[h->end.axis] = h->id;
  return names;
}

inline Factor by_edge_id(const Graph& g, const std::string& v) { return relabel(g.vertex(v).factor, edge_id_names(g, v)); }

}  // namespace detail

// Replace adjacent u, v by one vertex carrying their contraction over all shared edges.
inline Graph merge_vertices(const Graph& g, const std::string& u, const std::string& v, std::string new_id = "") {
  if (u == v) throw ValidationError("cannot merge a vertex with itself");
  if (new_id.empty()) new_id = u + "+" + v;
  std::set<std::string> shared;
  for (auto* e : g.internal_at(u))
    if (!e->is_loop() && Graph::other(*e, u) == v) shared.insert(e->id);
  if (shared.empty()) throw ValidationError("vertices '" + u + "' and '" + v + "' are not adjacent");

  Factor fu = detail::by_edge_id(g, u), fv = detail::by_edge_id(g, v);
  Factor merged = contract(fu, fv);

  std::vector<Vertex> vs;
  for (auto& x : g.vertices())
    if (x.id != u && x.id != v) vs.push_back(x);
  vs.push_back({new_id, merged});
  std::vector<InternalEdge> in;
  for (auto e : g.internal_edges()) {
    if (shared.count(e.id)) continue;
    for (auto* ep : {&e.a, &e.b})
      if (ep->vertex == u || ep->vertex == v) {
        ep->axis = e.is_loop() ? (ep == &e.a ? e.id + "@a" : e.id + "@b") : e.id;
        ep->vertex = new_id;
      }
    in.push_back(e);
  }
  std::vector<HalfEdge> hs = g.half_edges();
  for (auto& h : hs)
    if (h.end.vertex == u || h.end.vertex == v) h.end = {new_id, h.id};
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

// Guided split: `parts` with `new_edges` among them replace vertex v. Each of v's edges is
// rebound through `rebind` (edge id -> endpoint in parts). The parts must contract to f_v.
struct SplitSpec {
  std::vector<Vertex> parts;
  std::vector<InternalEdge> new_edges;
  std::map<std::string, Endpoint> rebind;
};

inline Graph split_vertex(const Graph& g, const std::string& v, const SplitSpec& spec, double tol = default_tol) {
  std::map<std::string, Factor> labeled;
  for (auto& p : spec.parts) labeled[p.id] = p.factor;
  std::map<std::string, std::map<std::string, std::string>> names;
  for (auto& e : spec.new_edges) {
    names[e.a.vertex][e.a.axis] = "new:" + e.id;
    names[e.b.vertex][e.b.axis] = "new:" + e.id;
  }
  Factor orig = detail::by_edge_id(g, v);
  for (auto& l : orig.labels()) {
    auto it = spec.rebind.find(l);
    if (it == spec.rebind.end()) throw ValidationError("split leaves edge '" + l + "' of '" + v + "' unbound");
    names[it->second.vertex][it->second.axis] = l;
  }
  std::vector<Factor> parts;
  for (auto& p : spec.parts) parts.push_back(relabel(p.factor, names[p.id]));
  Factor rec = contract(parts);
  if (relative_error(orig, rec) > tol) throw ValidationError("split parts do not contract to the vertex function of '" + v + "'");

  std::vector<Vertex> vs;
  for (auto& x : g.vertices())
    if (x.id != v) vs.push_back(x);
  for (auto& p : spec.parts) vs.push_back(p);
  std::vector<InternalEdge> in;
  for (auto e : g.internal_edges()) {
    if (e.a.vertex == v) e.a = spec.rebind.at(e.is_loop() ? e.id + "@a" : e.id);
    if (e.b.vertex == v) e.b = spec.rebind.at(e.is_loop() ? e.id + "@b" : e.id);
    in.push_back(e);
  }
  for (auto& e : spec.new_edges) in.push_back(e);
  std::vector<HalfEdge> hs = g.half_edges();
  for (auto& h : hs)
    if (h.end.vertex == v) h.end = spec.rebind.at(h.id);
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

// Subdivide internal edge e with forward (facing `forward_end`) and inverse transformer vertices.
// The middle edge keeps the id e; the outer pieces are e~u and e~v.
inline Graph insert_transformer_pair(const Graph& g, const std::string& edge, const TransformerPair& pair,
                                     const std::string& forward_end, double tol = default_tol) {
  const InternalEdge& e = g.internal(edge);
  if (e.is_loop()) throw ValidationError("transformer insertion on loop '" + edge + "' is not supported");
  if (forward_end != e.a.vertex && forward_end != e.b.vertex)
    throw ValidationError("'" + forward_end + "' is not an endpoint of '" + edge + "'");
  if (pair.forward.domain().axis(0).alphabet.size() != e.alphabet.size())
    throw ValidationError("transformer alphabet does not match edge '" + edge + "'");
  auto res = pair.residual();
  if (res > tol) throw ValidationError("transformers on '" + edge + "' are not an inverse pair (residual " + std::to_string(res) + ")");
  const Endpoint near = forward_end == e.a.vertex ? e.a : e.b;
  const Endpoint far = forward_end == e.a.vertex ? e.b : e.a;
  const std::string fid = edge + ":fwd", iid = edge + ":inv";

  std::vector<Vertex> vs = g.vertices();
  vs.push_back({fid, with_labels(pair.forward, {"near", "mid"})});
  vs.push_back({iid, with_labels(pair.inverse, {"mid", "far"})});
  std::vector<InternalEdge> in;
  for (auto& x : g.internal_edges())
    if (x.id != edge) in.push_back(x);
  in.push_back({edge + "~u", e.alphabet, near, {fid, "near"}});
  in.push_back({edge, e.alphabet, {fid, "mid"}, {iid, "mid"}});
  in.push_back({edge + "~v", e.alphabet, {iid, "far"}, far});
  return Graph(std::move(vs), std::move(in), g.half_edges());
}

// Put bivariate g(x, y) on half edge h: x faces the old endpoint, y stays external.
inline Graph insert_on_half_edge(const Graph& g, const std::string& half_id, const Factor& t) {
  const HalfEdge& h = g.half(half_id);
  if (t.rank() != 2) throw ValidationError("half-edge transformer must be bivariate");
  if (t.domain().axis(0).alphabet.size() != h.alphabet.size())
    throw ValidationError("transformer alphabet does not match half edge '" + half_id + "'");
  const std::string tid = half_id + ":t";
  std::vector<Vertex> vs = g.vertices();
  vs.push_back({tid, with_labels(t, {"in", "out"})});
  std::vector<InternalEdge> in = g.internal_edges();
  in.push_back({half_id + "~t", h.alphabet, h.end, {tid, "in"}});
  std::vector<HalfEdge> hs = g.half_edges();
  for (auto& x : hs)
    if (x.id == half_id) {
      x.end = {tid, "out"};
      x.alphabet = t.domain().axis(1).alphabet;
    }
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

struct OrientedPair {
  TransformerPair pair;
  std::string forward_end;
};

struct HolographicSpec {
  std::map<std::string, Factor> external;      // half edge id -> g(x, y)
  std::map<std::string, OrientedPair> internal;  // internal edge id -> pair
};

namespace detail {

inline void check_spec(const Graph& g, const HolographicSpec& spec, double tol) {
  for (auto& [id, t] : spec.external) {
    const auto& h = g.half(id);
    if (t.rank() != 2 || t.domain().axis(0).alphabet.size() != h.alphabet.size())
      throw ValidationError("external transformer on '" + id + "' does not fit the edge");
  }
  for (auto& [id, op] : spec.internal) {
    const auto& e = g.internal(id);
    if (e.is_loop()) throw ValidationError("holographic transform on loop '" + id + "' is not supported");
    if (op.forward_end != e.a.vertex && op.forward_end != e.b.vertex)
      throw ValidationError("'" + op.forward_end + "' is not an endpoint of '" + id + "'");
    if (op.pair.forward.domain().axis(0).alphabet.size() != e.alphabet.size())
      throw ValidationError("transformer alphabet does not match edge '" + id + "'");
    auto res = op.pair.residual();
    if (res > tol) throw ValidationError("transformers on '" + id + "' are not an inverse pair");
  }
}

}  // namespace detail

// Each vertex absorbs the transformers on its incident edges; topology is unchanged.
inline Graph holographic_transform(const Graph& g, const HolographicSpec& spec, double tol = default_tol) {
  detail::check_spec(g, spec, tol);
  std::vector<Vertex> vs;
  for (auto& v : g.vertices()) {
    Factor f = detail::by_edge_id(g, v.id);
    for (auto* e : g.internal_at(v.id)) {
      auto it = spec.internal.find(e->id);
      if (it == spec.internal.end()) continue;
      Factor t = it->second.forward_end == v.id ? with_labels(it->second.pair.forward, {e->id, "~tmp"})
                                                  : with_labels(it->second.pair.inverse, {"~tmp", e->id});
      f = relabel(contract(f, t), "~tmp", e->id);
    }
    for (auto* h : g.half_at(v.id)) {
      auto it = spec.external.find(h->id);
      if (it == spec.external.end()) continue;
      f = relabel(contract(f, with_labels(it->second, {h->id, "~tmp"})), "~tmp", h->id);
    }
    // Back to the vertex's own axis names and order.
    auto names = detail::edge_id_names(g, v.id);
    std::map<std::string, std::string> back;
    std::vector<std::string> order;
    for (auto& ax : v.factor.domain().axes()) {
      order.push_back(names.at(ax.label));
      back[order.back()] = ax.label;
    }
    vs.push_back({v.id, relabel(aligned_to(f, order), back)});
  }
  std::vector<HalfEdge> hs = g.half_edges();
  for (auto& h : hs) {
    auto it = spec.external.find(h.id);
    if (it != spec.external.end()) h.alphabet = it->second.domain().axis(1).alphabet;
  }
  for (auto& v : vs)
    for (auto& h : hs)
      if (h.end.vertex == v.id) {
        auto ax = v.factor.domain().axes();
        auto i = v.factor.domain().index_of(h.end.axis);
        ax[i].alphabet = h.alphabet;
        v.factor = Factor(ProductDomain(ax), v.factor.values());
      }
  return Graph(std::move(vs), g.internal_edges(), std::move(hs));
}

// The same transform by literal insertion (H1, H2) followed by merging (H3).
inline Graph holographic_transform_literal(const Graph& g, const HolographicSpec& spec, double tol = default_tol) {
  detail::check_spec(g, spec, tol);
  Graph cur = g;
  for (auto& [id, op] : spec.internal) cur = insert_transformer_pair(cur, id, op.pair, op.forward_end, tol);
  for (auto& [id, t] : spec.external) cur = insert_on_half_edge(cur, id, t);
  for (auto& v : g.vertices()) {
    std::string at = v.id;
    for (auto& [id, op] : spec.internal) {
      const auto& e = g.internal(id);
      if (e.a.vertex != v.id && e.b.vertex != v.id) continue;
      cur = merge_vertices(cur, at, op.forward_end == v.id ? id + ":fwd" : id + ":inv", at + "'");
      at += "'";
    }
    for (auto& [id, t] : spec.external)
      if (g.half(id).end.vertex == v.id) {
        cur = merge_vertices(cur, at, id + ":t", at + "'");
        at += "'";
      }
  }
  return cur;
}

// Right-hand side of the generalized Holant identity: <Z_in(x), prod g_i(x_i, y_i)>.
inline Factor ght_rhs(const Graph& g, const Factor& z_in, const HolographicSpec& spec) {
  Factor acc = z_in;
  for (auto& h : g.half_edges()) {
    auto it = spec.external.find(h.id);
    if (it == spec.external.end()) continue;
    acc = relabel(contract(acc, with_labels(it->second, {h.external, "~tmp"})), "~tmp", h.external);
  }
  return aligned_to(acc, g.external_names());
}

// ---------------------------------------------------------------------------
// Per-axis transforms

enum class Kernel { cumulus, difference, fourier, fourier_inv };

inline const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::cumulus: return "cumulus";
    case Kernel::difference: return "difference";
    case Kernel::fourier: return "fourier";
    case Kernel::fourier_inv: return "fourier_inv";
  }
  return "?";
}

// K(out, in) so that the transform is out(y) = sum_x K(y, x) f(x).
inline Factor kernel_matrix(Kernel k, const Alphabet& a) {
  switch (k) {
    case Kernel::cumulus: return make_cumulus(a);
    case Kernel::difference: return make_difference(a);
    case Kernel::fourier: {
      Factor kap = make_fourier_kernel(a);
      return aligned_to(with_labels(kap, {"in", "out"}), {"out", "in"});
    }
    case Kernel::fourier_inv: {
      Factor inv = make_inverse_fourier_kernel(a);  // N(xhat, x)
      return aligned_to(with_labels(inv, {"in", "out"}), {"out", "in"});
    }
  }
  throw ValidationError("unknown kernel");
}

// Reference path: contract the dense kernel on each axis.
inline Factor dense_axis_transform(const Factor& f, Kernel k, const std::vector<std::string>& axes,
                                   std::uint64_t* ops = nullptr) {
  Factor out = f;
  for (auto& l : axes) {
    const Alphabet& a = out.domain().axis(out.domain().index_of(l)).alphabet;
    Factor km = with_labels(kernel_matrix(k, a), {"~out", l});
    out = relabel(contract(out, km, ops), "~out", l);
  }
  return aligned_to(out, f.labels());
}

namespace detail {

// Apply a 1-D update along one radix component of one axis, in place.
template <class Fn>
void along_component(Factor& f, std::size_t axis, std::size_t comp, Fn fn) {
  const auto& d = f.domain();
  const auto& radices = d.axis(axis).alphabet.radices();
  std::size_t sub = 1;
  for (std::size_t c = comp + 1; c < radices.size(); ++c) sub *= radices[c];
  const std::size_t step = d.stride(axis) * sub, len = radices[comp];
  const std::size_t block = step * len;
  for (std::size_t base = 0; base < f.size(); base += block)
    for (std::size_t off = 0; off < step; ++off) fn(&f[base + off], step, len);
}

}  // namespace detail

// Running-sum cumulus, subtraction difference, and per-component DFTs along the named axes.
// ops counts additions for cumulus/difference and multiply-adds for the Fourier kernels.
inline Factor fast_axis_transform(const Factor& f, Kernel k, const std::vector<std::string>& axes,
                                  std::uint64_t* ops = nullptr) {
  Factor out = f;
  std::uint64_t count = 0;
  for (auto& l : axes) {
    auto i = out.domain().index_of(l);
    const Alphabet& a = out.domain().axis(i).alphabet;
    if ((k == Kernel::cumulus || k == Kernel::difference) && !a.is_ordered())
      throw ValidationError(std::string(kernel_name(k)) + " transform needs an ordered alphabet on '" + l + "'");
    if ((k == Kernel::fourier || k == Kernel::fourier_inv) && !a.is_group())
      throw ValidationError(std::string(kernel_name(k)) + " transform needs a group alphabet on '" + l + "'");
    for (std::size_t c = 0; c < a.radices().size(); ++c) {
      const std::size_t m = a.radices()[c];
      detail::along_component(out, i, c, [&](Complex* p, std::size_t step, std::size_t len) {
        if (k == Kernel::cumulus) {
          for (std::size_t j = 1; j < len; ++j) p[j * step] += p[(j - 1) * step];
          count += len - 1;
        } else if (k == Kernel::difference) {
          for (std::size_t j = len - 1; j >= 1; --j) p[j * step] -= p[(j - 1) * step];
          count += len - 1;
        } else {
          std::vector<Complex> src(len), dst(len);
          for (std::size_t j = 0; j < len; ++j) src[j] = p[j * step];
          const Alphabet cyc = Alphabet::cyclic(m);
          for (std::size_t y = 0; y < len; ++y)
            for (std::size_t x = 0; x < len; ++x)
              dst[y] += (k == Kernel::fourier ? cyc.character(x, y) : cyc.dual_character(y, x)) * src[x];
          count += len * len;
          for (std::size_t j = 0; j < len; ++j) p[j * step] = dst[j];
        }
      });
    }
  }
  if (ops) *ops += count;
  return out;
}

// ---------------------------------------------------------------------------
// Fourier dual of a generative model whose interfaces are sum indicators.

// Sign inverters plus a Fourier holographic transform turn sum interfaces into exact
// equality interfaces and latents into their Fourier transforms. The exterior becomes
// the Fourier transform of the original exterior.
inline Graph fourier_dual_generative_sum(const Graph& g, double tol = default_tol) {
  auto flags = classify(g, tol);
  if (!flags.generative) throw ValidationError("input is not a generative model");
  // 1) sum interface -> parity interface plus a sign inverter on the half edge.
  std::vector<Vertex> vs = g.vertices();
  std::map<std::string, std::string> half_of;
  for (auto& i : flags.interfaces) {
    const HalfEdge& h = *g.half_at(i)[0];
    Factor& f = vs[g.vertex_index(i)].factor;
    if (!is_indicator_on(f, IndicatorKind::sum, h.end.axis, tol))
      throw ValidationError("interface '" + i + "' is not a sum indicator generated on its half edge");
    f = with_labels(make_indicator(IndicatorKind::parity, h.alphabet, f.rank()), f.labels());
    half_of[i] = h.id;
  }
  Graph step1(std::move(vs), g.internal_edges(), g.half_edges());
  for (auto& [i, hid] : half_of) {
    const Alphabet& a = g.half(hid).alphabet;
    step1 = insert_on_half_edge(step1, hid, make_indicator(IndicatorKind::parity, a, 2));
  }
  // 2) Fourier pairs with kappa next to hidden functions and sign inverters.
  HolographicSpec spec;
  std::set<std::string> iset(flags.interfaces.begin(), flags.interfaces.end());
  for (auto& e : step1.internal_edges()) {
    std::string fwd = iset.count(e.a.vertex) ? e.b.vertex : e.a.vertex;
    spec.internal[e.id] = {make_fourier_pair(e.alphabet), fwd};
  }
  for (auto& h : step1.half_edges()) spec.external[h.id] = make_fourier_kernel(h.alphabet);
  Graph step2 = holographic_transform(step1, spec, tol);
  // 3) Absorb each sign inverter (now a scaled equality) into its interface.
  Graph cur = step2;
  for (auto& [i, hid] : half_of) cur = merge_vertices(cur, i, hid + ":t", i);
  std::vector<Vertex> out = cur.vertices();
  for (auto& v : out) {
    if (!iset.count(v.id)) continue;
    Factor exact = with_labels(make_indicator(IndicatorKind::eq, v.factor.domain().axis(0).alphabet, v.factor.rank()),
                               v.factor.labels());
    if (relative_error(v.factor, exact) > tol)
      throw NumericalError("transformed interface '" + v.id + "' is not an equality indicator");
    v.factor = exact;
  }
  return Graph(std::move(out), cur.internal_edges(), cur.half_edges());
}

}  // namespace nfg
