#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graph.hpp"
#include "indicators.hpp"
#include "inference.hpp"
#include "models.hpp"
#include "transform.hpp"

namespace nfg {

using json = nlohmann::ordered_json;

// A model file: named alphabets and factors, an optional graph, and optional
// transform, query and model-description sections.
struct Document {
  std::map<std::string, Alphabet> alphabets;
  std::map<std::string, Factor> factors;
  std::optional<Graph> graph;
  std::optional<HolographicSpec> transform;
  std::optional<Query> query;
  std::optional<ModelDesc> fg, cfg, cdn;
  std::string description;
};

// Canonical alphabet name: P4, O2x3, Z2x3.
inline std::string alphabet_key(const Alphabet& a) {
  std::string s = a.kind() == AlphabetKind::plain ? "P" : a.is_ordered() ? "O" : "Z";
  for (std::size_t i = 0; i < a.radices().size(); ++i) s += (i ? "x" : "") + std::to_string(a.radices()[i]);
  return s;
}

namespace detail {

[[noreturn]] inline void doc_error(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) doc_error(where, std::string("missing '") + key + "'");
  return j.at(key);
}

inline std::string need_string(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_string()) doc_error(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::size_t need_size(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    doc_error(where, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

inline std::vector<std::size_t> size_list(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) doc_error(where, "expected a nonempty integer list");
  std::vector<std::size_t> out;
  for (auto& x : v) out.push_back(need_size(x, where));
  return out;
}

inline std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) doc_error(where, "expected a list of strings");
  std::vector<std::string> out;
  for (auto& x : v) {
    if (!x.is_string()) doc_error(where, "expected a list of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

inline Alphabet parse_alphabet(const json& j, const std::string& where) {
  const std::string kind = need_string(j, "kind", where);
  if (kind == "plain") return Alphabet::plain(need_size(need(j, "size", where), where));
  if (kind == "ordered") {
    if (j.contains("sizes")) return Alphabet::ordered_product(size_list(j.at("sizes"), where));
    return Alphabet::ordered(need_size(need(j, "size", where), where));
  }
  if (kind == "group") {
    if (j.contains("moduli")) return Alphabet::group(size_list(j.at("moduli"), where));
    return Alphabet::cyclic(need_size(need(j, "size", where), where));
  }
  doc_error(where, "unknown alphabet kind '" + kind + "'");
}

inline json alphabet_json(const std::string& name, const Alphabet& a) {
  json j;
  j["name"] = name;
  j["kind"] = kind_name(a.kind());
  if (a.radices().size() == 1) j["size"] = a.size();
  else if (a.is_group()) j["moduli"] = a.radices();
  else j["sizes"] = a.radices();
  return j;
}

inline Complex parse_value(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  doc_error(where, "values must be numbers or [re, im] pairs");
}

inline json value_json(Complex c) {
  if (c.imag() == 0.0) return c.real();
  return json::array({c.real(), c.imag()});
}

}  // namespace detail

inline const Alphabet& lookup_alphabet(const Document& d, const std::string& name, const std::string& where) {
  auto it = d.alphabets.find(name);
  if (it == d.alphabets.end()) detail::doc_error(where, "unknown alphabet '" + name + "'");
  return it->second;
}

inline const Factor& lookup_factor(const Document& d, const std::string& name, const std::string& where) {
  auto it = d.factors.find(name);
  if (it == d.factors.end()) detail::doc_error(where, "unknown factor '" + name + "'");
  return it->second;
}

namespace detail {

inline Factor parse_factor(const Document& d, const json& j, const std::string& where) {
  if (j.contains("indicator")) {
    const std::string kname = need_string(j, "indicator", where);
    auto kind = parse_indicator(kname);
    if (!kind) doc_error(where, "unknown indicator '" + kname + "'");
    const Alphabet& a = lookup_alphabet(d, need_string(j, "alphabet", where), where);
    std::size_t degree = j.contains("degree") ? need_size(j.at("degree"), where) : 1;
    std::size_t value = j.contains("value") ? need_size(j.at("value"), where) : 0;
    Factor f = make_indicator(*kind, a, degree, value);
    if (j.contains("axes")) {
      auto labels = string_list(j.at("axes"), where + ".axes");
      if (labels.size() != degree) doc_error(where, "axis count differs from the degree");
      f = with_labels(f, labels);
    }
    return f;
  }
  std::vector<Axis> axes;
  const json& ax = need(j, "axes", where);
  if (!ax.is_array()) doc_error(where, "'axes' must be a list");
  for (auto& a : ax) axes.push_back({need_string(a, "label", where), lookup_alphabet(d, need_string(a, "alphabet", where), where)});
  ProductDomain dom(axes);
  const json& vals = need(j, "values", where);
  if (!vals.is_array()) doc_error(where, "'values' must be a list");
  if (vals.size() != dom.size())
    doc_error(where, "expected " + std::to_string(dom.size()) + " values, found " + std::to_string(vals.size()));
  std::vector<Complex> v;
  for (auto& x : vals) v.push_back(parse_value(x, where));
  return Factor(dom, std::move(v));
}

inline ModelDesc parse_model(const Document& d, const json& j, const std::string& where) {
  ModelDesc m;
  for (auto& v : need(j, "variables", where))
    m.variables.push_back({need_string(v, "name", where), lookup_alphabet(d, need_string(v, "alphabet", where), where)});
  for (auto& f : need(j, "functions", where)) {
    const std::string name = need_string(f, "name", where);
    const std::string w = where + "." + name;
    m.functions.push_back({name, lookup_factor(d, need_string(f, "factor", w), w), string_list(need(f, "vars", w), w)});
  }
  check_desc(m);
  return m;
}

inline Factor external_transformer(const Document& d, const std::string& name, const Alphabet& a,
                                   const std::string& where) {
  if (name == "cumulus") return external_cumulus(a);
  if (name == "fourier") return make_fourier_kernel(a);
  if (name == "identity") return make_indicator(IndicatorKind::eq, a, 2);
  return lookup_factor(d, name, where);
}

inline TransformerPair named_pair(const Document& d, const json& p, const Alphabet& a, const std::string& where) {
  if (p.is_string()) {
    const std::string s = p.get<std::string>();
    if (s == "cumulus") return make_cumulus_pair(a);
    if (s == "difference") return make_cumulus_pair(a).swapped();
    if (s == "fourier") return make_fourier_pair(a);
    if (s == "fourier_inv") return make_fourier_pair(a).swapped();
    doc_error(where, "unknown transformer pair '" + s + "'");
  }
  return {lookup_factor(d, need_string(p, "forward", where), where), lookup_factor(d, need_string(p, "inverse", where), where)};
}

}  // namespace detail

inline Document parse_document(const json& j) {
  Document d;
  if (!j.is_object()) throw ValidationError("document must be a JSON object");
  if (j.contains("description") && j.at("description").is_string()) d.description = j.at("description").get<std::string>();
  if (j.contains("alphabets"))
    for (auto& a : j.at("alphabets")) {
      const std::string name = detail::need_string(a, "name", "alphabets");
      if (!d.alphabets.emplace(name, detail::parse_alphabet(a, "alphabet '" + name + "'")).second)
        detail::doc_error("alphabets", "duplicate name '" + name + "'");
    }
  if (j.contains("factors"))
    for (auto& f : j.at("factors")) {
      const std::string name = detail::need_string(f, "name", "factors");
      if (!d.factors.emplace(name, detail::parse_factor(d, f, "factor '" + name + "'")).second)
        detail::doc_error("factors", "duplicate name '" + name + "'");
    }
  if (j.contains("vertices")) {
    std::vector<Vertex> vs;
    for (auto& v : j.at("vertices")) {
      const std::string id = detail::need_string(v, "id", "vertices");
      const std::string where = "vertex '" + id + "'";
      vs.push_back({id, lookup_factor(d, detail::need_string(v, "factor", where), where)});
    }
    std::vector<InternalEdge> in;
    std::vector<HalfEdge> hs;
    if (j.contains("edges"))
      for (auto& e : j.at("edges")) {
        const std::string id = detail::need_string(e, "id", "edges");
        const std::string where = "edge '" + id + "'";
        const std::string kind = detail::need_string(e, "kind", where);
        const Alphabet& a = lookup_alphabet(d, detail::need_string(e, "alphabet", where), where);
        const json& eps = detail::need(e, "endpoints", where);
        auto ep = [&](std::size_t k) {
          return Endpoint{detail::need_string(eps.at(k), "vertex", where), detail::need_string(eps.at(k), "axis", where)};
        };
        if (kind == "internal") {
          if (!eps.is_array() || eps.size() != 2) detail::doc_error(where, "internal edges need two endpoints");
          in.push_back({id, a, ep(0), ep(1)});
        } else if (kind == "half") {
          if (!eps.is_array() || eps.size() != 1) detail::doc_error(where, "half edges need one endpoint");
          hs.push_back({id, a, ep(0), e.contains("external") ? detail::need_string(e, "external", where) : id});
        } else {
          detail::doc_error(where, "unknown edge kind '" + kind + "'");
        }
      }
    d.graph = Graph(std::move(vs), std::move(in), std::move(hs));
  }
  if (j.contains("transform")) {
    if (!d.graph) detail::doc_error("transform", "needs a graph");
    HolographicSpec spec;
    const json& t = j.at("transform");
    if (t.contains("external"))
      for (auto& x : t.at("external")) {
        const std::string edge = detail::need_string(x, "edge", "transform.external");
        const std::string where = "transform of '" + edge + "'";
        if (!d.graph->has_half(edge)) detail::doc_error(where, "no such half edge");
        spec.external[edge] = detail::external_transformer(d, detail::need_string(x, "transformer", where),
                                                            d.graph->half(edge).alphabet, where);
      }
    if (t.contains("internal"))
      for (auto& x : t.at("internal")) {
        const std::string edge = detail::need_string(x, "edge", "transform.internal");
        const std::string where = "transform of '" + edge + "'";
        if (!d.graph->has_internal(edge)) detail::doc_error(where, "no such internal edge");
        spec.internal[edge] = {detail::named_pair(d, detail::need(x, "pair", where), d.graph->internal(edge).alphabet, where),
                               detail::need_string(x, "forward_at", where)};
      }
    d.transform = spec;
  }
  if (j.contains("query")) {
    const json& q = j.at("query");
    Query qq;
    if (q.contains("targets")) qq.targets = detail::string_list(q.at("targets"), "query.targets");
    if (q.contains("marginalize"))
      for (auto& s : detail::string_list(q.at("marginalize"), "query.marginalize")) qq.marginalize.insert(s);
    if (q.contains("evidence"))
      for (auto& [k, v] : q.at("evidence").items()) qq.evidence[k] = detail::need_size(v, "query.evidence");
    if (q.contains("engine")) qq.engine = parse_engine(detail::need_string(q, "engine", "query"));
    if (q.contains("normalize")) qq.normalize = q.at("normalize").get<bool>();
    d.query = qq;
  }
  if (j.contains("fg")) d.fg = detail::parse_model(d, j.at("fg"), "fg");
  if (j.contains("cfg")) d.cfg = detail::parse_model(d, j.at("cfg"), "cfg");
  if (j.contains("cdn")) d.cdn = detail::parse_model(d, j.at("cdn"), "cdn");
  return d;
}

inline Document load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_document(j);
}

// ---------------------------------------------------------------------------
// Writing

class DocumentWriter {
 public:
  std::string alphabet(const Alphabet& a) {
    const std::string k = alphabet_key(a);
    alphabets_.emplace(k, a);
    return k;
  }

  // Stores f under `name`, in indicator form when it is one with arg1 first.
  std::string factor(const std::string& name, const Factor& f) {
    json j;
    j["name"] = name;
    const auto& d = f.domain();
    std::optional<IndicatorKind> kind;
    std::size_t value = 0;
    if (d.rank() == 1 && is_indicator_on(f, IndicatorKind::one, d.axis(0).label)) {
      kind = IndicatorKind::one;
    } else if (d.rank() == 1) {
      std::size_t ones = 0;
      for (std::size_t k = 0; k < f.size(); ++k)
        if (f[k] == Complex{1.0, 0.0}) ++ones, value = k;
        else if (f[k] != Complex{}) ones = 2;
      if (ones == 1) kind = IndicatorKind::eval;
    } else if (auto det = detect_indicator(f, 0.0); det && det->distinguished == 0) {
      kind = det->kind;
    }
    if (kind) {
      j["indicator"] = indicator_name(*kind);
      j["alphabet"] = alphabet(d.axis(0).alphabet);
      j["degree"] = d.rank();
      if (*kind == IndicatorKind::eval) j["value"] = value;
      j["axes"] = f.labels();
    } else {
      json axes = json::array();
      for (auto& ax : d.axes()) axes.push_back({{"label", ax.label}, {"alphabet", alphabet(ax.alphabet)}});
      j["axes"] = axes;
      json vals = json::array();
      for (auto& v : f.values()) vals.push_back(detail::value_json(v));
      j["values"] = vals;
    }
    factors_[name] = j;
    return name;
  }

  void graph(const Graph& g) {
    std::vector<Vertex> vs = g.vertices();
    std::sort(vs.begin(), vs.end(), [](auto& a, auto& b) { return a.id < b.id; });
    vertices_ = json::array();
    for (auto& v : vs) vertices_.push_back({{"id", v.id}, {"factor", factor(v.id, v.factor)}});
    std::vector<json> es;
    for (auto& e : g.internal_edges())
      es.push_back({{"id", e.id},
                    {"kind", "internal"},
                    {"alphabet", alphabet(e.alphabet)},
                    {"endpoints", json::array({{{"vertex", e.a.vertex}, {"axis", e.a.axis}},
                                               {{"vertex", e.b.vertex}, {"axis", e.b.axis}}})}});
    for (auto& h : g.half_edges())
      es.push_back({{"id", h.id},
                    {"kind", "half"},
                    {"alphabet", alphabet(h.alphabet)},
                    {"endpoints", json::array({{{"vertex", h.end.vertex}, {"axis", h.end.axis}}})},
                    {"external", h.external}});
    std::sort(es.begin(), es.end(), [](auto& a, auto& b) { return a["id"] < b["id"]; });
    edges_ = es;
  }

  void model(const std::string& section, const ModelDesc& m) {
    json j;
    j["variables"] = json::array();
    for (auto& [n, a] : m.variables) j["variables"].push_back({{"name", n}, {"alphabet", alphabet(a)}});
    j["functions"] = json::array();
    for (auto& f : m.functions)
      j["functions"].push_back({{"name", f.name}, {"factor", factor(section + ":" + f.name, f.table)}, {"vars", f.vars}});
    sections_[section] = j;
  }

  void section(const std::string& key, json j) { sections_[key] = std::move(j); }
  void description(std::string s) { description_ = std::move(s); }

  json to_json() const {
    json j;
    if (!description_.empty()) j["description"] = description_;
    j["alphabets"] = json::array();
    for (auto& [n, a] : alphabets_) j["alphabets"].push_back(detail::alphabet_json(n, a));
    j["factors"] = json::array();
    for (auto& [n, f] : factors_) j["factors"].push_back(f);
    if (!vertices_.is_null()) {
      j["vertices"] = vertices_;
      j["edges"] = edges_;
    }
    for (auto& [k, v] : sections_) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, Alphabet> alphabets_;
  std::map<std::string, json> factors_;
  json vertices_, edges_;
  std::map<std::string, json> sections_;
  std::string description_;
};

// Table as axis metadata plus values nested by axis (first axis outermost). With digits > 0
// values are rounded to that many significant digits and entries below 10^-digits of the
// peak become 0, so engines that differ only by rounding print identical tables.
inline json factor_json(const Factor& f, int digits = 0) {
  const double peak = f.max_abs();
  auto round = [&](double x) {
    if (digits <= 0 || x == 0.0) return x;
    if (std::abs(x) <= peak * std::pow(10.0, -digits)) return 0.0;
    std::ostringstream s;
    s.precision(digits);
    s << x;
    double r = std::stod(s.str());
    return r == 0.0 ? 0.0 : r;
  };
  json j;
  json axes = json::array();
  for (auto& ax : f.domain().axes()) axes.push_back({{"label", ax.label}, {"alphabet", alphabet_key(ax.alphabet)}});
  j["axes"] = axes;
  const auto& d = f.domain();
  std::function<json(std::size_t, std::size_t)> nest = [&](std::size_t axis, std::size_t base) -> json {
    if (axis == d.rank()) {
      const Complex v = f[base];
      return detail::value_json({round(v.real()), round(v.imag())});
    }
    json arr = json::array();
    for (std::size_t x = 0; x < d.dim(axis); ++x) arr.push_back(nest(axis + 1, base + x * d.stride(axis)));
    return arr;
  };
  j["values"] = nest(0, 0);
  return j;
}

}  // namespace nfg
