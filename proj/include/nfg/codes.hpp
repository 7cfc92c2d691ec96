#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "exterior.hpp"
#include "graph.hpp"
#include "indicators.hpp"
#include "transform.hpp"

namespace nfg {

using Matrix = std::vector<std::vector<std::size_t>>;

// Whitespace-separated integer rows; '#' starts a comment; blank lines are skipped.
inline Matrix parse_matrix(const std::string& text) {
  Matrix m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    std::istringstream ls(line);
    std::vector<std::size_t> row;
    long long v;
    while (ls >> v) {
      if (v < 0) throw ValidationError("matrix entries must be nonnegative");
      row.push_back(static_cast<std::size_t>(v));
    }
    if (!ls.eof()) throw ValidationError("matrix row '" + line + "' is not a list of integers");
    if (row.empty()) continue;
    if (!m.empty() && row.size() != m[0].size()) throw ValidationError("matrix rows have different lengths");
    m.push_back(std::move(row));
  }
  if (m.empty()) throw ValidationError("empty matrix");
  return m;
}

struct CodeFile {
  std::size_t p = 2;
  Matrix rows;
};

// Header line "p n k" (p prime), then k rows of n residues mod p.
inline CodeFile parse_code_file(const std::string& text) {
  std::istringstream in(text);
  std::string line, body;
  std::optional<std::vector<long long>> header;
  while (std::getline(in, line)) {
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    if (header) {
      body += line + "\n";
      continue;
    }
    std::istringstream ls(line);
    std::vector<long long> h;
    long long v;
    while (ls >> v) h.push_back(v);
    if (!ls.eof()) throw ValidationError("code header '" + line + "' is not 'p n k'");
    if (h.empty()) continue;
    if (h.size() != 3 || h[0] < 2 || h[1] < 1 || h[2] < 1) throw ValidationError("code header must be 'p n k' with p >= 2");
    header = h;
  }
  if (!header) throw ValidationError("missing 'p n k' header");
  CodeFile f;
  f.p = static_cast<std::size_t>((*header)[0]);
  for (std::size_t d = 2; d * d <= f.p; ++d)
    if (f.p % d == 0) throw ValidationError("code alphabet size " + std::to_string(f.p) + " is not prime");
  f.rows = parse_matrix(body);
  const auto n = static_cast<std::size_t>((*header)[1]), k = static_cast<std::size_t>((*header)[2]);
  if (f.rows.size() != k || f.rows[0].size() != n)
    throw ValidationError("matrix is " + std::to_string(f.rows.size()) + "x" + std::to_string(f.rows[0].size()) +
                          ", header says " + std::to_string(k) + "x" + std::to_string(n));
  for (auto& r : f.rows)
    for (auto x : r)
      if (x >= f.p) throw ValidationError("entry " + std::to_string(x) + " is not a residue mod " + std::to_string(f.p));
  return f;
}

// [7,4] Hamming code: generator rows and parity checks by support.
inline Matrix hamming_generator() {
  return {{1, 1, 1, 0, 0, 0, 0}, {0, 1, 1, 0, 1, 1, 0}, {0, 0, 1, 1, 1, 0, 0}, {0, 0, 0, 1, 1, 1, 1}};
}

inline Matrix hamming_parity() { return {{1, 1, 0, 1, 1, 0, 0}, {1, 0, 1, 1, 0, 1, 0}, {0, 1, 1, 1, 0, 0, 1}}; }

inline std::string code_symbol(std::size_t j) { return "y" + std::to_string(j); }

namespace detail {

struct CodeBuilder {
  const Alphabet& a;
  std::vector<Vertex> vs;
  std::vector<InternalEdge> in;
  std::vector<HalfEdge> hs;
  std::map<std::string, std::vector<std::string>> axes;  // vertex -> axis labels in order

  // Edge between `from` (toward the scaled side's source) and `to`; a != 1 puts an
  // interposer [to = a * from] in between.
  void link(const std::string& from, const std::string& to, std::size_t coef) {
    const std::string id = from + "-" + to;
    if (coef == 1) {
      in.push_back({id, a, {from, id}, {to, id}});
    } else {
      const std::string mid = "scale:" + id;
      vs.push_back({mid, with_labels(make_scaling(a, coef), {"to", "from"})});
      in.push_back({id, a, {from, id}, {mid, "from"}});
      in.push_back({id + "~scaled", a, {mid, "to"}, {to, id}});
    }
    axes[from].push_back(id);
    axes[to].push_back(id);
  }
};

inline void check_code_matrix(const Matrix& m, const Alphabet& a) {
  if (!a.is_group()) throw ValidationError("codes need a group alphabet");
  if (m.empty() || m[0].empty()) throw ValidationError("empty matrix");
  for (auto& r : m)
    if (r.size() != m[0].size()) throw ValidationError("matrix rows have different lengths");
}

}  // namespace detail

// Information symbols as equality latents feeding sum interfaces: exterior is the
// codeword indicator times the multiplicity |ker G|.
inline Graph generator_realization(const Matrix& G, const Alphabet& a) {
  detail::check_code_matrix(G, a);
  const std::size_t k = G.size(), n = G[0].size();
  detail::CodeBuilder b{a, {}, {}, {}, {}};
  for (std::size_t j = 0; j < n; ++j) b.axes["sum_" + code_symbol(j)].push_back("out");
  for (std::size_t i = 0; i < k; ++i) {
    const std::string u = "u" + std::to_string(i);
    b.axes[u];
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t c = G[i][j] % a.size();
      if (c != 0) b.link(u, "sum_" + code_symbol(j), c);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::string u = "u" + std::to_string(i);
    const auto& ax = b.axes[u];
    Factor t = ax.size() >= 2  ? make_indicator(IndicatorKind::eq, a, ax.size())
               : ax.size() == 1 ? make_indicator(IndicatorKind::one, a, 1)
                                : Factor::scalar(double(a.size()));
    b.vs.push_back({u, with_labels(t, ax)});
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::string v = "sum_" + code_symbol(j);
    const auto& ax = b.axes[v];
    Factor t = ax.size() >= 2 ? make_indicator(IndicatorKind::sum, a, ax.size())
                              : make_indicator(IndicatorKind::eval, a, 1, 0);
    b.vs.push_back({v, with_labels(t, ax)});
    b.hs.push_back({code_symbol(j), a, {v, "out"}, code_symbol(j)});
  }
  return Graph(std::move(b.vs), std::move(b.in), std::move(b.hs));
}

// Symbols as equality interfaces feeding parity-check latents: exterior is the codeword indicator.
inline Graph parity_realization(const Matrix& H, const Alphabet& a) {
  detail::check_code_matrix(H, a);
  const std::size_t m = H.size(), n = H[0].size();
  detail::CodeBuilder b{a, {}, {}, {}, {}};
  for (std::size_t j = 0; j < n; ++j) b.axes["eq_" + code_symbol(j)].push_back("out");
  for (std::size_t c = 0; c < m; ++c) b.axes["check" + std::to_string(c)];
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t h = H[c][j] % a.size();
      if (h != 0) b.link("eq_" + code_symbol(j), "check" + std::to_string(c), h);
    }
  for (std::size_t j = 0; j < n; ++j) {
    const std::string v = "eq_" + code_symbol(j);
    const auto& ax = b.axes[v];
    Factor t = ax.size() >= 2 ? make_indicator(IndicatorKind::eq, a, ax.size()) : make_indicator(IndicatorKind::one, a, 1);
    b.vs.push_back({v, with_labels(t, ax)});
    b.hs.push_back({code_symbol(j), a, {v, "out"}, code_symbol(j)});
  }
  for (std::size_t c = 0; c < m; ++c) {
    const std::string v = "check" + std::to_string(c);
    const auto& ax = b.axes[v];
    Factor t = ax.size() >= 2  ? make_indicator(IndicatorKind::parity, a, ax.size())
               : ax.size() == 1 ? make_indicator(IndicatorKind::eval, a, 1, 0)
                                : Factor::scalar(1.0);
    b.vs.push_back({v, with_labels(t, ax)});
  }
  return Graph(std::move(b.vs), std::move(b.in), std::move(b.hs));
}

// Fourier holographic transform: kappa on every half edge and a Fourier pair on every
// internal edge, forward kernel at the endpoint farther from the interfaces (ties: larger id).
// The exterior becomes the Fourier transform of the code indicator, |C| [y in C-dual].
inline Graph dual_via_fourier(const Graph& g, double tol = default_tol) {
  std::map<std::string, std::size_t> dist;
  std::deque<std::string> q;
  for (auto& h : g.half_edges())
    if (dist.emplace(h.end.vertex, 0).second) q.push_back(h.end.vertex);
  while (!q.empty()) {
    auto u = q.front();
    q.pop_front();
    for (auto& w : g.neighbors(u))
      if (dist.emplace(w, dist[u] + 1).second) q.push_back(w);
  }
  auto far = [&](const std::string& v) { return dist.count(v) ? dist[v] : std::size_t(-1); };
  HolographicSpec spec;
  for (auto& h : g.half_edges()) spec.external[h.id] = make_fourier_kernel(h.alphabet);
  for (auto& e : g.internal_edges()) {
    const auto da = far(e.a.vertex), db = far(e.b.vertex);
    const std::string fwd = da != db ? (da > db ? e.a.vertex : e.b.vertex) : std::max(e.a.vertex, e.b.vertex);
    spec.internal[e.id] = {make_fourier_pair(e.alphabet), fwd};
  }
  return holographic_transform(g, spec, tol);
}

struct CodeWords {
  std::vector<std::string> symbols;
  std::vector<std::vector<std::size_t>> words;
  Complex scale;  // common exterior value on the support
};

// Support of an exterior that is a scaled indicator; any other shape is an error.
inline CodeWords codewords_of(const Factor& z, double tol = default_tol) {
  CodeWords out;
  out.symbols = z.labels();
  const double peak = z.max_abs();
  for (std::size_t lin = 0; lin < z.size(); ++lin) {
    if (std::abs(z[lin]) <= tol * std::max(peak, 1.0)) continue;
    if (out.words.empty()) out.scale = z[lin];
    else if (std::abs(z[lin] - out.scale) > tol * std::max(peak, 1.0))
      throw NumericalError("exterior is not a scaled indicator function");
    out.words.push_back(z.domain().coords(lin));
  }
  return out;
}

inline CodeWords codewords(const Graph& g, double tol = default_tol) { return codewords_of(eliminate(g).result, tol); }

// counts[w] = number of words with w nonzero symbols.
inline std::vector<std::size_t> weight_distribution(const CodeWords& c) {
  std::vector<std::size_t> counts(c.symbols.size() + 1, 0);
  for (auto& w : c.words) {
    std::size_t k = 0;
    for (auto s : w) k += s != 0;
    ++counts[k];
  }
  return counts;
}

}  // namespace nfg
