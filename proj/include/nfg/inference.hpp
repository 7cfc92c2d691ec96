#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "exterior.hpp"
#include "graph.hpp"
#include "indicators.hpp"
#include "models.hpp"

namespace nfg {

enum class Engine { bruteforce, eliminate, spa };

inline const char* engine_name(Engine e) {
  switch (e) {
    case Engine::bruteforce: return "bruteforce";
    case Engine::eliminate: return "eliminate";
    case Engine::spa: return "spa";
  }
  return "?";
}

inline Engine parse_engine(const std::string& s) {
  for (auto e : {Engine::bruteforce, Engine::eliminate, Engine::spa})
    if (s == engine_name(e)) return e;
  throw ValidationError("unknown engine '" + s + "'");
}

// Targets R, marginalized M and evidence N over external names. An empty target list
// means every external not in M or N, in external order.
struct Query {
  std::vector<std::string> targets;
  std::set<std::string> marginalize;
  std::map<std::string, std::size_t> evidence;
  Engine engine = Engine::eliminate;
  bool normalize = false;
  bool shortcuts = false;
};

inline std::vector<std::string> resolve_targets(const Graph& g, const Query& q) {
  std::set<std::string> ext;
  for (auto& n : g.external_names()) ext.insert(n);
  std::set<std::string> seen;
  auto claim = [&](const std::string& n, const char* role) {
    if (!ext.count(n)) throw ValidationError(std::string(role) + " '" + n + "' is not an external variable");
    if (!seen.insert(n).second) throw ValidationError("external '" + n + "' appears in more than one query role");
  };
  for (auto& n : q.targets) claim(n, "target");
  for (auto& n : q.marginalize) claim(n, "marginalized variable");
  for (auto& [n, v] : q.evidence) {
    claim(n, "evidence variable");
    g.half_by_external(n).alphabet.check(v);
  }
  if (!q.targets.empty()) {
    if (seen.size() != ext.size()) {
      for (auto& n : g.external_names())
        if (!seen.count(n)) throw ValidationError("external '" + n + "' has no query role");
    }
    return q.targets;
  }
  std::vector<std::string> out;
  for (auto& n : g.external_names())
    if (!seen.count(n)) out.push_back(n);
  return out;
}

// Glue a constant-one vertex onto each marginalized half edge and an evaluation vertex
// onto each evidence half edge. The exterior is sum over M of p sliced at N.
inline Graph reduce_star(const Graph& g, const Query& q) {
  resolve_targets(g, q);
  std::vector<Vertex> vs = g.vertices();
  std::vector<InternalEdge> in = g.internal_edges();
  std::vector<HalfEdge> hs;
  for (auto& h : g.half_edges()) {
    if (q.marginalize.count(h.external)) {
      vs.push_back({"one:" + h.external, make_indicator(IndicatorKind::one, h.alphabet, 1)});
      in.push_back({h.id, h.alphabet, h.end, {"one:" + h.external, "arg1"}});
    } else if (auto it = q.evidence.find(h.external); it != q.evidence.end()) {
      vs.push_back({"eval:" + h.external, make_indicator(IndicatorKind::eval, h.alphabet, 1, it->second)});
      in.push_back({h.id, h.alphabet, h.end, {"eval:" + h.external, "arg1"}});
    } else {
      hs.push_back(h);
    }
  }
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

// Evidence on a constrained model: after normalizing to equality interfaces, an observed
// interface fixes all its edges, so neighbors are sliced and the interface is deleted.
inline Graph constrained_evidence_shortcut(const Graph& g, const std::map<std::string, std::size_t>& evidence,
                                           double tol = default_tol) {
  if (evidence.empty()) return g;
  Graph n = normalize_constrained(g, tol);
  std::map<std::string, Factor> fs;
  for (auto& v : n.vertices()) fs[v.id] = v.factor;
  std::set<std::string> drop, dropped_edges;
  std::vector<Vertex> extra;
  for (auto& [name, x] : evidence) {
    const HalfEdge& h = n.half_by_external(name);
    const std::string i = h.end.vertex;
    drop.insert(i);
    if (n.vertex(i).factor.rank() == 1) {
      extra.push_back({"evidence:" + name, Factor::scalar(n.vertex(i).factor[x])});
      continue;
    }
    for (auto* e : n.internal_at(i)) {
      const std::string j = Graph::other(*e, i);
      const std::string axis = e->a.vertex == j ? e->a.axis : e->b.axis;
      fs[j] = evaluate(fs[j], axis, x);
      dropped_edges.insert(e->id);
    }
  }
  std::vector<Vertex> vs;
  for (auto& v : n.vertices())
    if (!drop.count(v.id)) vs.push_back({v.id, fs[v.id]});
  for (auto& v : extra) vs.push_back(v);
  std::vector<InternalEdge> in;
  for (auto& e : n.internal_edges())
    if (!dropped_edges.count(e.id)) in.push_back(e);
  std::vector<HalfEdge> hs;
  for (auto& h : n.half_edges())
    if (!evidence.count(h.external)) hs.push_back(h);
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

// Marginalization on a generative model: an interface summed over its half edge is the
// constant c_i, so it is deleted, the neighbors sum out the freed edges and the first
// neighbor absorbs c_i.
inline Graph generative_marginal_shortcut(const Graph& g, const std::set<std::string>& marginalize,
                                          double tol = default_tol) {
  if (marginalize.empty()) return g;
  auto flags = classify(g, tol);
  if (!flags.nfg_model || !flags.generative) throw ValidationError("marginalization shortcut needs a generative model");
  std::map<std::string, Factor> fs;
  for (auto& v : g.vertices()) fs[v.id] = v.factor;
  std::set<std::string> drop, dropped_edges;
  std::vector<Vertex> extra;
  for (auto& name : marginalize) {
    const HalfEdge& h = g.half_by_external(name);
    const std::string i = h.end.vertex;
    const Complex c = g.vertex(i).factor.rank() == 1 ? g.vertex(i).factor.total() : flags.conditional_constants.at(i);
    drop.insert(i);
    auto edges = g.internal_at(i);
    if (edges.empty()) {
      extra.push_back({"marginal:" + name, Factor::scalar(c)});
      continue;
    }
    for (auto* e : edges) {
      const std::string j = Graph::other(*e, i);
      fs[j] = marginalize_sum(fs[j], e->a.vertex == j ? e->a.axis : e->b.axis);
      dropped_edges.insert(e->id);
    }
    const std::string first = Graph::other(*edges.front(), i);
    fs[first] = scaled(fs[first], c);
  }
  std::vector<Vertex> vs;
  for (auto& v : g.vertices())
    if (!drop.count(v.id)) vs.push_back({v.id, fs[v.id]});
  for (auto& v : extra) vs.push_back(v);
  std::vector<InternalEdge> in;
  for (auto& e : g.internal_edges())
    if (!dropped_edges.count(e.id)) in.push_back(e);
  std::vector<HalfEdge> hs;
  for (auto& h : g.half_edges())
    if (!marginalize.count(h.external)) hs.push_back(h);
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

struct QueryResult {
  Factor table;   // p_R(x_R, xbar_N), unnormalized unless `normalized`
  Complex total;  // sum of the unnormalized table: the evidence mass p(N = xbar)
  bool normalized = false;
  std::vector<std::string> shortcuts;  // shortcuts that were applied
};

inline Factor run_engine(const Graph& g, Engine e) {
  switch (e) {
    case Engine::bruteforce: return exterior_bruteforce(g);
    case Engine::eliminate: return eliminate(g).result;
    case Engine::spa: return spa_exterior(g);
  }
  throw ValidationError("unknown engine");
}

inline QueryResult query(const Graph& g, const Query& q, double tol = default_tol) {
  auto targets = resolve_targets(g, q);
  QueryResult r;
  Graph cur = g;
  std::set<std::string> rest_m = q.marginalize;
  std::map<std::string, std::size_t> rest_n = q.evidence;
  if (q.shortcuts) {
    auto flags = classify(cur, tol);
    if (flags.nfg_model && flags.constrained && !rest_n.empty()) {
      cur = constrained_evidence_shortcut(cur, rest_n, tol);
      rest_n.clear();
      r.shortcuts.push_back("constrained evidence");
    }
    flags = classify(cur, tol);
    if (flags.nfg_model && flags.generative && !rest_m.empty()) {
      cur = generative_marginal_shortcut(cur, rest_m, tol);
      rest_m.clear();
      r.shortcuts.push_back("generative marginalization");
    }
  }
  Query rq = q;
  rq.targets.clear();
  rq.marginalize = rest_m;
  rq.evidence = rest_n;
  Graph star = reduce_star(cur, rq);
  r.table = aligned_to(run_engine(star, q.engine), targets);
  r.total = r.table.total();
  if (q.normalize) {
    if (std::abs(r.total) <= 1e-12) throw NumericalError("cannot normalize: evidence mass is zero");
    r.table = scaled(r.table, 1.0 / r.total);
    r.normalized = true;
  }
  return r;
}

}  // namespace nfg
