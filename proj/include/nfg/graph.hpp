#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "factor.hpp"
#include "indicators.hpp"

namespace nfg {

struct Endpoint {
  std::string vertex;
  std::string axis;
};

struct InternalEdge {
  std::string id;
  Alphabet alphabet;
  Endpoint a, b;
  bool is_loop() const { return a.vertex == b.vertex; }
};

struct HalfEdge {
  std::string id;
  Alphabet alphabet;
  Endpoint end;
  std::string external;
};

struct Vertex {
  std::string id;
  Factor factor;
};

// Validated normal factor graph. Every axis of every vertex factor is bound by
// exactly one edge; internal edge ids and external names share one namespace so
// edge-labeled factors can be contracted directly.
class Graph {
 public:
  Graph() = default;
  Graph(std::vector<Vertex> vertices, std::vector<InternalEdge> internal, std::vector<HalfEdge> half)
      : vertices_(std::move(vertices)), internal_(std::move(internal)), half_(std::move(half)) {
    validate();
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<InternalEdge>& internal_edges() const { return internal_; }
  const std::vector<HalfEdge>& half_edges() const { return half_; }

  bool has_vertex(const std::string& id) const { return vindex_.count(id) != 0; }
  const Vertex& vertex(const std::string& id) const { return vertices_.at(vertex_index(id)); }
  std::size_t vertex_index(const std::string& id) const {
    auto it = vindex_.find(id);
    if (it == vindex_.end()) throw ValidationError("unknown vertex '" + id + "'");
    return it->second;
  }

  bool has_internal(const std::string& id) const { return eindex_.count(id) != 0; }
  const InternalEdge& internal(const std::string& id) const {
    auto it = eindex_.find(id);
    if (it == eindex_.end()) throw ValidationError("unknown internal edge '" + id + "'");
    return internal_[it->second];
  }
  bool has_half(const std::string& id) const { return hindex_.count(id) != 0; }
  const HalfEdge& half(const std::string& id) const {
    auto it = hindex_.find(id);
    if (it == hindex_.end()) throw ValidationError("unknown half edge '" + id + "'");
    return half_[it->second];
  }
  const HalfEdge& half_by_external(const std::string& name) const {
    for (auto& h : half_)
      if (h.external == name) return h;
    throw ValidationError("unknown external variable '" + name + "'");
  }

  std::vector<std::string> external_names() const {
    std::vector<std::string> out;
    for (auto& h : half_) out.push_back(h.external);
    return out;
  }

  std::vector<const InternalEdge*> internal_at(const std::string& v) const {
    std::vector<const InternalEdge*> out;
    for (auto& e : internal_)
      if (e.a.vertex == v || e.b.vertex == v) out.push_back(&e);
    return out;
  }
  std::vector<const HalfEdge*> half_at(const std::string& v) const {
    std::vector<const HalfEdge*> out;
    for (auto& h : half_)
      if (h.end.vertex == v) out.push_back(&h);
    return out;
  }

  std::size_t degree(const std::string& v) const { return vertex(v).factor.rank(); }

  // Distinct neighbor ids (loops excluded), sorted.
  std::vector<std::string> neighbors(const std::string& v) const {
    std::set<std::string> s;
    for (auto* e : internal_at(v))
      if (!e->is_loop()) s.insert(e->a.vertex == v ? e->b.vertex : e->a.vertex);
    return {s.begin(), s.end()};
  }

  static std::string other(const InternalEdge& e, const std::string& v) { return e.a.vertex == v ? e.b.vertex : e.a.vertex; }

  // Vertex factor with each axis renamed to the id of its internal edge or the
  // external name of its half edge. Loop axes become id@a and id@b.
  Factor edge_labeled(const std::string& v) const {
    const Factor& f = vertex(v).factor;
    std::map<std::string, std::string> names;
    for (auto* e : internal_at(v)) {
      if (e->is_loop()) {
        names[e->a.axis] = e->id + "@a";
        names[e->b.axis] = e->id + "@b";
      } else {
        names[e->a.vertex == v ? e->a.axis : e->b.axis] = e->id;
      }
    }
    for (auto* h : half_at(v)) names[h->end.axis] = h->external;
    return relabel(f, names);
  }

  // edge_labeled with loops summed out.
  Factor edge_labeled_traced(const std::string& v) const {
    Factor f = edge_labeled(v);
    for (auto* e : internal_at(v))
      if (e->is_loop()) f = trace(f, e->id + "@a", e->id + "@b");
    return f;
  }

  // Which edge binds axis `axis` of vertex `v`: internal edge id or half edge id.
  std::string edge_of_axis(const std::string& v, const std::string& axis) const {
    for (auto* e : internal_at(v))
      if ((e->a.vertex == v && e->a.axis == axis) || (e->b.vertex == v && e->b.axis == axis)) return e->id;
    for (auto* h : half_at(v))
      if (h->end.axis == axis) return h->id;
    throw ValidationError("axis '" + axis + "' of '" + v + "' is unbound");
  }

  std::size_t total_states() const {
    std::size_t s = 1;
    for (auto& e : internal_) s *= e.alphabet.size();
    for (auto& h : half_) s *= h.alphabet.size();
    return s;
  }

 private:
  void validate() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      if (!vindex_.emplace(vertices_[i].id, i).second) throw ValidationError("duplicate vertex id '" + vertices_[i].id + "'");
    std::map<std::pair<std::string, std::string>, std::string> bound;
    auto bind = [&](const Endpoint& ep, const Alphabet& a, const std::string& edge) {
      auto it = vindex_.find(ep.vertex);
      if (it == vindex_.end()) throw ValidationError("edge '" + edge + "' references unknown vertex '" + ep.vertex + "'");
      const auto& d = vertices_[it->second].factor.domain();
      if (!d.has(ep.axis))
        throw ValidationError("edge '" + edge + "' binds missing axis '" + ep.axis + "' of vertex '" + ep.vertex + "'");
      const auto& ax = d.axis(d.index_of(ep.axis));
      if (!ax.alphabet.compatible(a))
        throw ValidationError("edge '" + edge + "' alphabet " + a.describe() + " does not match axis '" + ep.axis +
                              "' of vertex '" + ep.vertex + "' (" + ax.alphabet.describe() + ")");
      auto key = std::make_pair(ep.vertex, ep.axis);
      auto [pos, fresh] = bound.emplace(key, edge);
      if (!fresh)
        throw ValidationError("axis '" + ep.axis + "' of vertex '" + ep.vertex + "' bound by both '" + pos->second +
                              "' and '" + edge + "'");
    };
    std::set<std::string> edge_ids;
    for (std::size_t i = 0; i < internal_.size(); ++i) {
      auto& e = internal_[i];
      if (!edge_ids.insert(e.id).second) throw ValidationError("duplicate edge id '" + e.id + "'");
      if (e.a.vertex == e.b.vertex && e.a.axis == e.b.axis)
        throw ValidationError("edge '" + e.id + "' binds the same axis twice");
      bind(e.a, e.alphabet, e.id);
      bind(e.b, e.alphabet, e.id);
      eindex_[e.id] = i;
    }
    std::set<std::string> externals;
    for (std::size_t i = 0; i < half_.size(); ++i) {
      auto& h = half_[i];
      if (!edge_ids.insert(h.id).second) throw ValidationError("duplicate edge id '" + h.id + "'");
      if (!externals.insert(h.external).second) throw ValidationError("duplicate external name '" + h.external + "'");
      bind(h.end, h.alphabet, h.id);
      hindex_[h.id] = i;
    }
    for (auto& e : internal_)
      if (externals.count(e.id))
        throw ValidationError("internal edge id '" + e.id + "' collides with an external variable name");
    for (auto& v : vertices_)
      for (auto& ax : v.factor.domain().axes())
        if (!bound.count({v.id, ax.label}))
          throw ValidationError("axis '" + ax.label + "' of vertex '" + v.id + "' is not bound by any edge");
  }

  std::vector<Vertex> vertices_;
  std::vector<InternalEdge> internal_;
  std::vector<HalfEdge> half_;
  std::map<std::string, std::size_t> vindex_, eindex_, hindex_;
};

// Build a graph from named factors: a label shared by two factors becomes an internal
// edge with that id, a label used once becomes a half edge with that external name.
inline Graph from_factors(const std::vector<std::pair<std::string, Factor>>& fs) {
  std::map<std::string, std::vector<std::pair<std::string, Alphabet>>> uses;
  std::vector<std::string> order;
  std::vector<Vertex> vs;
  for (auto& [id, f] : fs) {
    vs.push_back({id, f});
    for (auto& ax : f.domain().axes()) {
      if (!uses.count(ax.label)) order.push_back(ax.label);
      uses[ax.label].push_back({id, ax.alphabet});
    }
  }
  std::vector<InternalEdge> in;
  std::vector<HalfEdge> half;
  for (auto& l : order) {
    auto& u = uses[l];
    if (u.size() == 1) {
      half.push_back({l, u[0].second, {u[0].first, l}, l});
    } else if (u.size() == 2) {
      in.push_back({l, u[0].second, {u[0].first, l}, {u[1].first, l}});
    } else {
      throw ValidationError("label '" + l + "' used by more than two factors");
    }
  }
  return Graph(std::move(vs), std::move(in), std::move(half));
}

struct ClassFlags {
  bool simple = false;
  bool bipartite = false;
  bool nfg_model = false;
  bool constrained = false;
  bool generative = false;
  bool extended_generative = false;
  bool tree = false;
  std::vector<std::string> interfaces;
  std::vector<std::string> latents;
  std::map<std::string, Complex> conditional_constants;
};

namespace detail {

inline std::vector<std::vector<std::string>> components(const Graph& g) {
  std::set<std::string> seen;
  std::vector<std::vector<std::string>> out;
  for (auto& v : g.vertices()) {
    if (seen.count(v.id)) continue;
    std::vector<std::string> comp;
    std::deque<std::string> q{v.id};
    seen.insert(v.id);
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      comp.push_back(u);
      for (auto& w : g.neighbors(u))
        if (seen.insert(w).second) q.push_back(w);
    }
    out.push_back(comp);
  }
  return out;
}

}  // namespace detail

inline bool is_connected(const Graph& g) { return detail::components(g).size() <= 1; }

inline bool is_tree(const Graph& g) {
  return !g.vertices().empty() && is_connected(g) && g.internal_edges().size() + 1 == g.vertices().size();
}

// A vertex cycle if one exists (loops and parallel edges count).
inline std::optional<std::vector<std::string>> find_cycle(const Graph& g) {
  for (auto& e : g.internal_edges())
    if (e.is_loop()) return std::vector<std::string>{e.a.vertex, e.a.vertex};
  std::map<std::string, std::string> parent_edge, parent;
  std::set<std::string> seen;
  for (auto& root : g.vertices()) {
    if (seen.count(root.id)) continue;
    std::vector<std::string> stack{root.id};
    seen.insert(root.id);
    parent_edge[root.id] = "";
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto* e : g.internal_at(u)) {
        if (e->id == parent_edge[u]) continue;
        auto w = Graph::other(*e, u);
        if (seen.count(w)) {
          // Walk both ancestries to their meeting point.
          std::vector<std::string> pu{u}, pw{w};
          while (!parent[pu.back()].empty()) pu.push_back(parent[pu.back()]);
          while (!parent[pw.back()].empty()) pw.push_back(parent[pw.back()]);
          std::set<std::string> su(pu.begin(), pu.end());
          std::vector<std::string> cyc;
          std::string meet;
          for (auto& x : pw)
            if (su.count(x)) {
              meet = x;
              break;
            }
          for (auto& x : pu) {
            cyc.push_back(x);
            if (x == meet) break;
          }
          std::vector<std::string> tail;
          for (auto& x : pw) {
            if (x == meet) break;
            tail.push_back(x);
          }
          cyc.insert(cyc.end(), tail.rbegin(), tail.rend());
          return cyc;
        }
        seen.insert(w);
        parent[w] = u;
        parent_edge[w] = e->id;
        stack.push_back(w);
      }
    }
  }
  return std::nullopt;
}

inline ClassFlags classify(const Graph& g, double tol = default_tol) {
  ClassFlags c;
  c.simple = true;
  std::set<std::pair<std::string, std::string>> pairs;
  for (auto& e : g.internal_edges()) {
    if (e.is_loop()) {
      c.simple = false;
      continue;
    }
    auto p = std::minmax(e.a.vertex, e.b.vertex);
    if (!pairs.insert({p.first, p.second}).second) c.simple = false;
  }

  std::map<std::string, int> color;
  c.bipartite = true;
  for (auto& e : g.internal_edges())
    if (e.is_loop()) c.bipartite = false;
  for (auto& v : g.vertices()) {
    if (color.count(v.id)) continue;
    color[v.id] = 0;
    std::deque<std::string> q{v.id};
    while (!q.empty() && c.bipartite) {
      auto u = q.front();
      q.pop_front();
      for (auto& w : g.neighbors(u)) {
        if (!color.count(w)) {
          color[w] = 1 - color[u];
          q.push_back(w);
        } else if (color[w] == color[u]) {
          c.bipartite = false;
        }
      }
    }
  }

  c.tree = is_tree(g);

  bool model = c.bipartite;
  for (auto& v : g.vertices()) {
    auto h = g.half_at(v.id).size();
    if (h == 1) c.interfaces.push_back(v.id);
    else if (h == 0) c.latents.push_back(v.id);
    else model = false;
  }
  std::set<std::string> iset(c.interfaces.begin(), c.interfaces.end());
  for (auto& e : g.internal_edges())
    if (iset.count(e.a.vertex) == iset.count(e.b.vertex)) model = false;
  c.nfg_model = model;
  if (!model) return c;

  c.constrained = true;
  c.generative = true;
  c.extended_generative = true;
  for (auto& i : c.interfaces) {
    const Factor& f = g.vertex(i).factor;
    const std::string pivot = g.half_at(i)[0]->end.axis;
    if (f.rank() >= 2 && !split_decompose(f, pivot, tol)) c.constrained = false;
    auto cc = conditional_constant(f, pivot, tol);
    if (cc) {
      c.conditional_constants[i] = *cc;
    } else {
      c.generative = false;
      if (!rank_one_profiles(marginalize_sum(f, pivot), tol)) c.extended_generative = false;
    }
  }
  if (!c.generative) c.conditional_constants.clear();
  return c;
}

// True iff every path from A to B passes through S.
inline bool separated(const Graph& g, const std::set<std::string>& A, const std::set<std::string>& B,
                      const std::set<std::string>& S) {
  for (auto* set : {&A, &B, &S})
    for (auto& v : *set) g.vertex_index(v);
  for (auto& a : A)
    if (B.count(a) || S.count(a)) throw ValidationError("vertex sets overlap at '" + a + "'");
  for (auto& b : B)
    if (S.count(b)) throw ValidationError("vertex sets overlap at '" + b + "'");
  std::set<std::string> seen(A.begin(), A.end());
  std::deque<std::string> q(A.begin(), A.end());
  while (!q.empty()) {
    auto u = q.front();
    q.pop_front();
    if (B.count(u)) return false;
    for (auto& w : g.neighbors(u))
      if (!S.count(w) && seen.insert(w).second) q.push_back(w);
  }
  return true;
}

// Move half edge `half_id` onto a new bivariate equality vertex joined to the old endpoint.
inline Graph insert_equality_on_half_edge(const Graph& g, const std::string& half_id, const std::string& new_vertex) {
  const HalfEdge& h = g.half(half_id);
  std::vector<Vertex> vs = g.vertices();
  vs.push_back({new_vertex, make_indicator(IndicatorKind::eq, h.alphabet, 2)});
  std::vector<InternalEdge> in = g.internal_edges();
  in.push_back({half_id + "~eq", h.alphabet, h.end, {new_vertex, "arg1"}});
  std::vector<HalfEdge> hs = g.half_edges();
  for (auto& x : hs)
    if (x.id == half_id) x.end = {new_vertex, "arg2"};
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

}  // namespace nfg
