#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "indicators.hpp"

namespace nfg {

inline constexpr std::size_t default_state_cap = std::size_t{1} << 24;

// Z_G by enumerating every joint edge assignment. Axes follow half-edge order.
inline Factor exterior_bruteforce(const Graph& g, std::size_t cap = default_state_cap) {
  std::vector<Alphabet> alph;
  std::map<std::string, std::size_t> slot;
  for (auto& h : g.half_edges()) {
    slot[h.id] = alph.size();
    alph.push_back(h.alphabet);
  }
  const std::size_t nh = alph.size();
  for (auto& e : g.internal_edges()) {
    slot[e.id] = alph.size();
    alph.push_back(e.alphabet);
  }
  long double states = 1;
  for (auto& a : alph) states *= static_cast<long double>(a.size());
  if (states > static_cast<long double>(cap))
    throw NumericalError("brute force refused: " + std::to_string(static_cast<double>(states)) +
                         " joint states exceed the cap of " + std::to_string(cap));

  struct Binding {
    const Factor* f;
    std::vector<std::size_t> slots;
  };
  std::vector<Binding> binds;
  for (auto& v : g.vertices()) {
    Binding b{&v.factor, {}};
    for (auto& ax : v.factor.domain().axes()) b.slots.push_back(slot.at(g.edge_of_axis(v.id, ax.label)));
    binds.push_back(std::move(b));
  }

  std::vector<Axis> out_axes;
  for (auto& h : g.half_edges()) out_axes.push_back({h.external, h.alphabet});
  Factor out{ProductDomain(out_axes)};
  std::size_t inner = 1;
  for (std::size_t k = nh; k < alph.size(); ++k) inner *= alph[k].size();

  std::vector<std::size_t> digit(alph.size(), 0), coords;
  const auto total = static_cast<std::size_t>(states);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t r = lin;
    for (std::size_t k = alph.size(); k-- > 0;) {
      digit[k] = r % alph[k].size();
      r /= alph[k].size();
    }
    Complex p{1.0, 0.0};
    for (auto& b : binds) {
      coords.resize(b.slots.size());
      for (std::size_t i = 0; i < b.slots.size(); ++i) coords[i] = digit[b.slots[i]];
      p *= b.f->at(coords);
      if (p == Complex{}) break;
    }
    out[lin / inner] += p;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Indicator star kernels

namespace detail {

// Univariate tables over one alphabet, combined through the indicator's operation.
inline std::vector<Complex> op_convolve(IndicatorKind kind, const Alphabet& a, const std::vector<Complex>& x,
                                        const std::vector<Complex>& y, std::uint64_t& ops) {
  const std::size_t n = a.size();
  std::vector<Complex> z(n);
  if (kind == IndicatorKind::eq) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
    ops += n;
    return z;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t k = kind == IndicatorKind::sum ? a.add(i, j) : a.join(i, j);
      z[k] += x[i] * y[j];
    }
  ops += n * n;
  return z;
}

}  // namespace detail

// Exterior of an eq/sum/max indicator star whose leaves are univariate tables at the
// given argument positions, leaving argument `free_pos` open. Leaves are keyed by position.
inline std::vector<Complex> indicator_star(IndicatorKind kind, const Alphabet& a, std::size_t distinguished,
                                           const std::map<std::size_t, std::vector<Complex>>& leaves,
                                           std::size_t free_pos, std::uint64_t& ops) {
  if (leaves.empty()) throw ValidationError("indicator star needs at least one leaf");
  const bool generated_free = kind == IndicatorKind::eq || free_pos == distinguished;
  if (generated_free) {
    std::optional<std::vector<Complex>> acc;
    for (auto& [pos, t] : leaves) acc = acc ? detail::op_convolve(kind, a, *acc, t, ops) : t;
    return *acc;
  }
  // Free argument is an operand: fold the other operands, then pair with the generated leaf.
  const auto& head = leaves.at(distinguished);
  std::optional<std::vector<Complex>> rest;
  for (auto& [pos, t] : leaves)
    if (pos != distinguished) rest = rest ? detail::op_convolve(kind, a, *rest, t, ops) : t;
  const std::size_t n = a.size();
  std::vector<Complex> out(n);
  if (!rest) {
    for (std::size_t x = 0; x < n; ++x) out[x] = head[x];
    return out;
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t k = kind == IndicatorKind::sum ? a.add(x, s) : a.join(x, s);
      out[x] += (*rest)[s] * head[k];
    }
  ops += n * n;
  return out;
}

// ---------------------------------------------------------------------------
// Elimination

struct EliminationStep {
  std::string kind;  // merge, kernel, trace, join
  std::vector<std::string> nodes;
  std::string result;
  std::vector<std::string> eliminated;
  std::uint64_t ops = 0;
};

struct EliminationReport {
  Factor result;
  std::vector<EliminationStep> steps;
  std::uint64_t total_ops = 0;
};

enum class Strategy { greedy, given };

struct EliminationOptions {
  Strategy strategy = Strategy::greedy;
  std::vector<std::pair<std::string, std::string>> order;
  bool indicator_kernels = false;
};

namespace detail {

struct ElimNode {
  std::string id;
  std::set<std::string> members;
  Factor f;
  bool original = true;
};

inline std::set<std::string> internal_labels(const ElimNode& n, const std::set<std::string>& internal) {
  std::set<std::string> s;
  for (auto& l : n.f.labels())
    if (internal.count(l)) s.insert(l);
  return s;
}

inline std::vector<std::string> shared_labels(const ElimNode& a, const ElimNode& b, const std::set<std::string>& internal) {
  std::vector<std::string> out;
  for (auto& l : a.f.labels())
    if (internal.count(l) && b.f.has(l)) out.push_back(l);
  return out;
}

inline std::uint64_t merge_cost(const ElimNode& a, const ElimNode& b) {
  std::uint64_t c = 1;
  std::set<std::string> seen;
  for (auto* n : {&a, &b})
    for (auto& ax : n->f.domain().axes())
      if (seen.insert(ax.label).second) c *= ax.alphabet.size();
  return c;
}

}  // namespace detail

inline EliminationReport eliminate(const Graph& g, const EliminationOptions& opt = {}) {
  using detail::ElimNode;
  EliminationReport rep;
  std::set<std::string> internal;
  for (auto& e : g.internal_edges())
    if (!e.is_loop()) internal.insert(e.id);

  std::vector<ElimNode> nodes;
  for (auto& v : g.vertices()) {
    ElimNode n{v.id, {v.id}, g.edge_labeled(v.id), true};
    for (auto* e : g.internal_at(v.id)) {
      if (!e->is_loop()) continue;
      EliminationStep s{"trace", {v.id}, v.id, {e->id}, n.f.size()};
      n.f = trace(n.f, e->id + "@a", e->id + "@b");
      n.original = false;
      rep.steps.push_back(s);
    }
    nodes.push_back(std::move(n));
  }

  auto find_node = [&](const std::string& member) -> std::size_t {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].members.count(member)) return i;
    throw ValidationError("elimination order names unknown vertex '" + member + "'");
  };

  auto merge = [&](std::size_t i, std::size_t j) {
    auto shared = detail::shared_labels(nodes[i], nodes[j], internal);
    std::uint64_t ops = 0;
    Factor f = contract(nodes[i].f, nodes[j].f, &ops);
    ElimNode n{nodes[i].id + "+" + nodes[j].id, nodes[i].members, std::move(f), false};
    n.members.insert(nodes[j].members.begin(), nodes[j].members.end());
    rep.steps.push_back({"merge", {nodes[i].id, nodes[j].id}, n.id, shared, ops});
    if (i > j) std::swap(i, j);
    nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(j));
    nodes[i] = std::move(n);
  };

  // Collapse an unmerged indicator vertex with all its univariate leaf neighbours.
  auto try_kernel = [&]() -> bool {
    std::vector<std::size_t> idx(nodes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return nodes[a].id < nodes[b].id; });
    for (auto i : idx) {
      auto& n = nodes[i];
      if (!n.original) continue;
      auto det = detect_indicator(n.f);
      if (!det || det->kind == IndicatorKind::parity) continue;
      const auto labels = n.f.labels();
      std::map<std::size_t, std::size_t> leaf_of;  // argument position -> node index
      std::vector<std::size_t> open;
      for (std::size_t p = 0; p < labels.size(); ++p) {
        std::optional<std::size_t> leaf;
        if (internal.count(labels[p]))
          for (std::size_t j = 0; j < nodes.size(); ++j)
            if (j != i && nodes[j].f.has(labels[p]) && nodes[j].f.rank() == 1) leaf = j;
        if (leaf) leaf_of[p] = *leaf;
        else open.push_back(p);
      }
      if (open.size() != 1 || leaf_of.empty()) continue;
      const Alphabet& a = n.f.domain().axis(0).alphabet;
      std::map<std::size_t, std::vector<Complex>> leaves;
      std::vector<std::string> members{n.id}, eliminated;
      for (auto& [p, j] : leaf_of) {
        leaves[p] = nodes[j].f.values();
        members.push_back(nodes[j].id);
        eliminated.push_back(labels[p]);
      }
      std::uint64_t ops = 0;
      auto table = indicator_star(det->kind, a, det->distinguished, leaves, open[0], ops);
      ElimNode out{n.id, n.members, Factor(ProductDomain({n.f.domain().axis(open[0])}), table), false};
      std::string rid = n.id;
      std::vector<std::size_t> drop;
      for (auto& [p, j] : leaf_of) {
        out.members.insert(nodes[j].members.begin(), nodes[j].members.end());
        rid += "+" + nodes[j].id;
        drop.push_back(j);
      }
      out.id = rid;
      rep.steps.push_back({"kernel", members, rid, eliminated, ops});
      nodes[i] = std::move(out);
      std::sort(drop.rbegin(), drop.rend());
      for (auto j : drop) nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(j));
      return true;
    }
    return false;
  };

  if (opt.strategy == Strategy::given) {
    for (auto& [u, v] : opt.order) {
      auto i = find_node(u), j = find_node(v);
      if (i == j) throw ValidationError("elimination order pairs '" + u + "' and '" + v + "' are already merged");
      if (detail::shared_labels(nodes[i], nodes[j], internal).empty())
        throw ValidationError("elimination order pair '" + u + "', '" + v + "' is not adjacent");
      merge(i, j);
    }
  }

  while (true) {
    if (opt.indicator_kernels && try_kernel()) continue;
    std::optional<std::pair<std::size_t, std::size_t>> best;
    std::uint64_t best_cost = 0;
    std::pair<std::string, std::string> best_key;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (detail::shared_labels(nodes[i], nodes[j], internal).empty()) continue;
        auto cost = detail::merge_cost(nodes[i], nodes[j]);
        auto key = std::minmax(nodes[i].id, nodes[j].id);
        std::pair<std::string, std::string> k{key.first, key.second};
        if (!best || cost < best_cost || (cost == best_cost && k < best_key)) {
          best = {i, j};
          best_cost = cost;
          best_key = k;
        }
      }
    if (!best) break;
    merge(best->first, best->second);
  }

  // Disconnected components combine by outer product.
  std::sort(nodes.begin(), nodes.end(), [](auto& a, auto& b) { return a.id < b.id; });
  Factor acc = Factor::scalar(1.0);
  std::vector<std::string> names;
  for (auto& n : nodes) names.push_back(n.id);
  for (auto& n : nodes) {
    if (nodes.size() == 1) {
      acc = n.f;
      break;
    }
    std::uint64_t ops = 0;
    acc = multiply(acc, n.f, &ops);
    if (&n != &nodes.front()) rep.steps.push_back({"join", {n.id}, "", {}, ops});
  }
  rep.result = aligned_to(acc, g.external_names());
  for (auto& s : rep.steps) rep.total_ops += s.ops;
  return rep;
}

// Given-order preset that eliminates an interface vertex together with its neighbours.
inline std::vector<std::pair<std::string, std::string>> block_order(const Graph& g, const std::string& center) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& w : g.neighbors(center)) out.push_back({center, w});
  return out;
}

// ---------------------------------------------------------------------------
// Sum-product

struct SpaOptions {
  bool indicator_kernels = false;
  bool extract_scale = false;
  bool allow_half_edges = false;
};

struct EdgeMarginals {
  std::map<std::pair<std::string, std::string>, Factor> messages;
  std::map<std::pair<std::string, std::string>, double> log_scales;
  std::vector<std::pair<std::string, std::string>> schedule;
  std::map<std::string, Factor> marginals;
  std::uint64_t ops = 0;

  const Factor& message(const std::string& from, const std::string& to) const {
    auto it = messages.find({from, to});
    if (it == messages.end()) throw ValidationError("no message from '" + from + "' to '" + to + "'");
    return it->second;
  }
};

inline EdgeMarginals sum_product(const Graph& g, const SpaOptions& opt = {}) {
  if (!opt.allow_half_edges && !g.half_edges().empty())
    throw ValidationError("sum-product needs a closed graph; enable half edges for the accumulating variant");
  if (auto cyc = find_cycle(g)) {
    std::string s;
    for (auto& v : *cyc) s += (s.empty() ? "" : " -> ") + v;
    throw ValidationError("sum-product needs a tree; cycle: " + s);
  }
  if (!is_connected(g)) throw ValidationError("sum-product needs a connected graph");

  EdgeMarginals out;
  if (g.vertices().empty()) return out;
  std::string root = g.vertices()[0].id;
  for (auto& v : g.vertices()) root = std::min(root, v.id);

  std::map<std::string, std::string> parent;
  std::vector<std::string> order{root};
  parent[root] = "";
  for (std::size_t k = 0; k < order.size(); ++k)
    for (auto& w : g.neighbors(order[k]))
      if (!parent.count(w)) {
        parent[w] = order[k];
        order.push_back(w);
      }

  auto edge_between = [&](const std::string& u, const std::string& v) -> const InternalEdge& {
    for (auto* e : g.internal_at(u))
      if (Graph::other(*e, u) == v) return *e;
    throw ValidationError("no edge between '" + u + "' and '" + v + "'");
  };

  auto send = [&](const std::string& u, const std::string& v) {
    const auto& e = edge_between(u, v);
    Factor fu = g.edge_labeled(u);
    std::vector<const Factor*> parts{&fu};
    double ls = 0.0;
    bool univariate_in = true;
    for (auto& w : g.neighbors(u)) {
      if (w == v) continue;
      parts.push_back(&out.messages.at({w, u}));
      ls += out.log_scales[{w, u}];
      if (parts.back()->rank() != 1) univariate_in = false;
    }
    Factor m;
    bool done = false;
    if (opt.indicator_kernels && univariate_in && g.half_at(u).empty() && parts.size() > 1) {
      if (auto det = detect_indicator(fu); det && det->kind != IndicatorKind::parity) {
        auto labels = fu.labels();
        std::map<std::size_t, std::vector<Complex>> leaves;
        std::size_t free_pos = 0;
        for (std::size_t p = 0; p < labels.size(); ++p) {
          if (labels[p] == e.id) {
            free_pos = p;
            continue;
          }
          for (std::size_t k = 1; k < parts.size(); ++k)
            if (parts[k]->has(labels[p])) leaves[p] = parts[k]->values();
        }
        auto t = indicator_star(det->kind, fu.domain().axis(0).alphabet, det->distinguished, leaves, free_pos, out.ops);
        m = Factor(ProductDomain({fu.domain().axis(free_pos)}), t);
        done = true;
      }
    }
    if (!done) m = contract(parts, &out.ops);
    if (opt.extract_scale) {
      double s = m.max_abs();
      if (s > 0.0) {
        m = scaled(m, 1.0 / s);
        ls += std::log(s);
      }
    } else {
      ls = 0.0;
    }
    out.messages[{u, v}] = std::move(m);
    out.log_scales[{u, v}] = ls;
    out.schedule.push_back({u, v});
  };

  for (std::size_t k = order.size(); k-- > 1;) send(order[k], parent[order[k]]);
  for (auto& u : order)
    for (auto& w : g.neighbors(u))
      if (parent[w] == u) send(u, w);

  for (auto& e : g.internal_edges()) {
    const Factor& m1 = out.messages.at({e.a.vertex, e.b.vertex});
    const Factor& m2 = out.messages.at({e.b.vertex, e.a.vertex});
    Factor z = multiply(m1, m2, &out.ops);
    double ls = out.log_scales[{e.a.vertex, e.b.vertex}] + out.log_scales[{e.b.vertex, e.a.vertex}];
    if (ls != 0.0) z = scaled(z, std::exp(ls));
    out.marginals[e.id] = std::move(z);
  }
  return out;
}

// Subgraph on a vertex set; edges leaving the set are not allowed.
inline Graph induced_subgraph(const Graph& g, const std::set<std::string>& keep) {
  std::vector<Vertex> vs;
  for (auto& v : g.vertices())
    if (keep.count(v.id)) vs.push_back(v);
  std::vector<InternalEdge> in;
  for (auto& e : g.internal_edges()) {
    bool a = keep.count(e.a.vertex), b = keep.count(e.b.vertex);
    if (a != b) throw ValidationError("edge '" + e.id + "' leaves the vertex set");
    if (a) in.push_back(e);
  }
  std::vector<HalfEdge> hs;
  for (auto& h : g.half_edges())
    if (keep.count(h.end.vertex)) hs.push_back(h);
  return Graph(std::move(vs), std::move(in), std::move(hs));
}

// Exterior of a forest via the accumulating sum-product variant, one tree at a time.
inline Factor spa_exterior(const Graph& g, const SpaOptions& base = {}, std::uint64_t* ops = nullptr) {
  SpaOptions opt = base;
  opt.allow_half_edges = true;
  Factor acc = Factor::scalar(1.0);
  for (auto& comp : detail::components(g)) {
    Graph sub = induced_subgraph(g, {comp.begin(), comp.end()});
    Factor z;
    if (sub.internal_edges().empty()) {
      z = sub.edge_labeled(comp[0]);
    } else {
      auto em = sum_product(sub, opt);
      if (ops) *ops += em.ops;
      const auto& e = sub.internal_edges()[0];
      z = marginalize_sum(em.marginals.at(e.id), e.id);
    }
    acc = multiply(acc, z);
  }
  return aligned_to(acc, g.external_names());
}

// ---------------------------------------------------------------------------
// Derivative-sum-product

struct DerivativeResult {
  Graph dressed;
  EdgeMarginals spa;
  std::map<std::string, Factor> to_evaluator;  // mu(d_i -> u_i) over x_i
  std::map<std::string, Factor> to_interface;  // mu(d_i -> q_i) over x_i
};

// Glue D(x_i, y_i) on each half edge and an evaluation vertex (evidence) or a
// constant-one vertex (all other variables) beyond it, then run sum-product.
inline DerivativeResult derivative_sum_product(const Graph& g, const std::map<std::string, std::size_t>& evidence,
                                               double tol = default_tol) {
  auto flags = classify(g, tol);
  if (!flags.constrained) throw ValidationError("derivative sum-product needs a constrained model");
  if (!is_tree(g)) throw ValidationError("derivative sum-product needs a tree");
  for (auto& [name, v] : evidence) g.half_by_external(name).alphabet.check(v);

  std::vector<Vertex> vs = g.vertices();
  std::vector<InternalEdge> in = g.internal_edges();
  for (auto& h : g.half_edges()) {
    if (!h.alphabet.is_ordered())
      throw ValidationError("derivative sum-product needs ordered alphabets; '" + h.external + "' is " +
                            h.alphabet.describe());
    const std::string d = "d:" + h.external, u = "u:" + h.external;
    vs.push_back({d, make_difference(h.alphabet)});
    auto ev = evidence.find(h.external);
    vs.push_back({u, ev == evidence.end() ? make_indicator(IndicatorKind::one, h.alphabet, 1)
                                          : make_indicator(IndicatorKind::eval, h.alphabet, 1, ev->second)});
    in.push_back({"y:" + h.external, h.alphabet, h.end, {d, "arg2"}});
    in.push_back({"x:" + h.external, h.alphabet, {d, "arg1"}, {u, "arg1"}});
  }
  DerivativeResult r{Graph(std::move(vs), std::move(in), {}), {}, {}, {}};
  r.spa = sum_product(r.dressed);
  for (auto& h : g.half_edges()) {
    const std::string d = "d:" + h.external;
    r.to_evaluator[h.external] = relabel(r.spa.message(d, "u:" + h.external), "x:" + h.external, h.external);
    r.to_interface[h.external] = relabel(r.spa.message(d, h.end.vertex), "y:" + h.external, h.external);
  }
  return r;
}

}  // namespace nfg
