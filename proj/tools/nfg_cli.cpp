// Command-line driver. Output is JSON on stdout; diagnostics go to stderr.
// Exit status: 0 success, 1 validation error, 2 numerical failure, 64 usage error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <nfg/nfg.hpp>

using namespace nfg;

namespace {

constexpr int kValidation = 1, kNumerical = 2, kUsage = 64;

struct Common {
  std::string file;
  int digits = 12;
};

Document load(const std::string& path) { return load_document(path); }

const Graph& need_graph(const Document& d) {
  if (!d.graph) throw ValidationError("document has no graph (vertices/edges sections)");
  return *d.graph;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json complex_json(Complex c, int digits) {
  return factor_json(Factor::scalar(c), digits)["values"];
}

Engine engine_of(const std::string& s) { return parse_engine(s); }

json graph_document(const Graph& g, const std::string& description) {
  DocumentWriter w;
  w.description(description);
  w.graph(g);
  return w.to_json();
}

// ---------------------------------------------------------------------------

int cmd_validate(const Common& c) {
  Document d = load(c.file);
  json j;
  j["valid"] = true;
  if (d.graph) {
    const Graph& g = *d.graph;
    j["vertices"] = g.vertices().size();
    j["internal_edges"] = g.internal_edges().size();
    j["half_edges"] = g.half_edges().size();
    j["externals"] = g.external_names();
    j["total_states"] = g.total_states();
  }
  json sections = json::array();
  if (d.transform) sections.push_back("transform");
  if (d.query) sections.push_back("query");
  if (d.fg) sections.push_back("fg");
  if (d.cfg) sections.push_back("cfg");
  if (d.cdn) sections.push_back("cdn");
  j["sections"] = sections;
  emit(j);
  return 0;
}

int cmd_classify(const Common& c) {
  const Document d = load(c.file);
  const Graph& g = need_graph(d);
  auto f = classify(g);
  json j;
  j["simple"] = f.simple;
  j["bipartite"] = f.bipartite;
  j["tree"] = f.tree;
  j["nfg_model"] = f.nfg_model;
  j["constrained"] = f.constrained;
  j["generative"] = f.generative;
  j["extended_generative"] = f.extended_generative;
  j["interfaces"] = f.interfaces;
  j["latents"] = f.latents;
  json cc = json::object();
  for (auto& [i, v] : f.conditional_constants) cc[i] = complex_json(v, c.digits);
  j["conditional_constants"] = cc;
  if (f.nfg_model && (f.generative || f.extended_generative) && find_cycle(g))
    j["notice"] = "cycles present: sampling semantics hold but sum-product is not exact";
  emit(j);
  return 0;
}

struct ExteriorArgs {
  std::string algo = "eliminate", strategy = "greedy";
  std::vector<std::string> order;
  bool kernels = false;
};

int cmd_exterior(const Common& c, const ExteriorArgs& a) {
  const Document d = load(c.file);
  const Graph& g = need_graph(d);
  json j;
  j["engine"] = a.algo;
  const Engine e = engine_of(a.algo);
  if (e == Engine::bruteforce) {
    j["table"] = factor_json(exterior_bruteforce(g), c.digits);
    j["ops"] = g.total_states();
  } else if (e == Engine::spa) {
    SpaOptions opt;
    opt.indicator_kernels = a.kernels;
    std::uint64_t ops = 0;
    j["table"] = factor_json(spa_exterior(g, opt, &ops), c.digits);
    j["ops"] = ops;
  } else {
    EliminationOptions opt;
    opt.indicator_kernels = a.kernels;
    if (a.strategy == "given") opt.strategy = Strategy::given;
    else if (a.strategy != "greedy") throw ValidationError("unknown strategy '" + a.strategy + "'");
    for (auto& p : a.order) {
      auto colon = p.find(':');
      if (colon == std::string::npos) throw ValidationError("order entry '" + p + "' is not 'u:v'");
      opt.order.push_back({p.substr(0, colon), p.substr(colon + 1)});
    }
    if (!opt.order.empty() && opt.strategy != Strategy::given)
      throw ValidationError("--order needs --strategy given");
    auto rep = eliminate(g, opt);
    j["table"] = factor_json(rep.result, c.digits);
    j["ops"] = rep.total_ops;
    json steps = json::array();
    for (auto& s : rep.steps)
      steps.push_back({{"kind", s.kind}, {"nodes", s.nodes}, {"result", s.result}, {"eliminated", s.eliminated}, {"ops", s.ops}});
    j["steps"] = steps;
  }
  emit(j);
  return 0;
}

int cmd_spa(const Common& c, bool kernels, bool scale, bool halves) {
  const Document d = load(c.file);
  const Graph& g = need_graph(d);
  SpaOptions opt;
  opt.indicator_kernels = kernels;
  opt.extract_scale = scale;
  opt.allow_half_edges = halves;
  auto em = sum_product(g, opt);
  json j;
  json marg = json::object();
  for (auto& [id, m] : em.marginals) marg[id] = factor_json(m, c.digits);
  j["marginals"] = marg;
  json msgs = json::array();
  for (auto& [from, to] : em.schedule)
    msgs.push_back({{"from", from},
                    {"to", to},
                    {"log_scale", em.log_scales.at({from, to})},
                    {"table", factor_json(em.message(from, to), c.digits)}});
  j["messages"] = msgs;
  j["ops"] = em.ops;
  emit(j);
  return 0;
}

int cmd_transform(const Common& c, bool literal, bool verify) {
  const Document d = load(c.file);
  const Graph& g = need_graph(d);
  if (!d.transform) throw ValidationError("document has no transform section");
  Graph t = literal ? holographic_transform_literal(g, *d.transform) : holographic_transform(g, *d.transform);
  if (verify) {
    double err = relative_error(exterior_bruteforce(t), ght_rhs(g, exterior_bruteforce(g), *d.transform));
    std::cerr << "holant identity relative error " << err << "\n";
    if (err > 1e-9) throw NumericalError("transformed exterior does not match the transformed input exterior");
  }
  emit(graph_document(t, "holographic transform of " + c.file));
  return 0;
}

int cmd_convert(const Common& c, const std::string& model, const std::string& direction) {
  const Document d = load(c.file);
  if (direction == "to-nfg") {
    const std::optional<ModelDesc>& m = model == "fg" ? d.fg : model == "cfg" ? d.cfg : d.cdn;
    if (!m) throw ValidationError("document has no '" + model + "' section");
    Graph g = model == "fg" ? fg_to_nfg(*m) : model == "cfg" ? cfg_to_nfg(*m) : cdn_to_nfg(*m);
    emit(graph_document(g, model + " model as an NFG"));
    return 0;
  }
  const Graph& g = need_graph(d);
  ModelDesc m;
  if (model == "fg") {
    auto f = classify(g);
    bool eq_ready = true;
    for (auto& i : f.interfaces)
      eq_ready = eq_ready && is_indicator_on(g.vertex(i).factor, g.degree(i) == 1 ? IndicatorKind::one : IndicatorKind::eq,
                                             g.half_at(i)[0]->end.axis);
    m = nfg_to_fg(f.nfg_model && f.constrained && !eq_ready ? normalize_constrained(g) : g);
  } else if (model == "cfg") {
    m = nfg_to_cfg(g);
  } else {
    m = to_cdn(g);
  }
  DocumentWriter w;
  w.description(model + " model read off an NFG");
  w.model(model, m);
  emit(w.to_json());
  return 0;
}

json words_json(const CodeWords& cw) {
  json j;
  j["symbols"] = cw.symbols;
  j["count"] = cw.words.size();
  j["words"] = cw.words;
  j["scale"] = complex_json(cw.scale, 12);
  j["weights"] = weight_distribution(cw);
  return j;
}

int cmd_codes(const std::string& action, const std::string& file, const std::string& as) {
  CodeFile cf = parse_code_file(read_text(file));
  const Alphabet a = Alphabet::cyclic(cf.p);
  auto realize = [&](const std::string& kind) {
    if (kind == "generator") return generator_realization(cf.rows, a);
    if (kind == "parity") return parity_realization(cf.rows, a);
    throw ValidationError("unknown matrix kind '" + kind + "'");
  };
  if (action == "gen") emit(graph_document(realize("generator"), "generator realization"));
  else if (action == "parity") emit(graph_document(realize("parity"), "parity-check realization"));
  else if (action == "list") emit(words_json(codewords(realize(as))));
  else emit(words_json(codewords(dual_via_fourier(realize(as)))));
  return 0;
}

struct InferArgs {
  std::vector<std::string> targets, marginalize, evidence;
  std::string algo;
  bool normalize = false, shortcuts = false;
};

int cmd_infer(const Common& c, const InferArgs& a) {
  const Document d = load(c.file);
  const Graph& g = need_graph(d);
  Query q;
  const bool flags = !a.targets.empty() || !a.marginalize.empty() || !a.evidence.empty();
  if (!flags && d.query) q = *d.query;
  if (flags) {
    q.targets = a.targets;
    q.marginalize = {a.marginalize.begin(), a.marginalize.end()};
    for (auto& e : a.evidence) {
      auto eq = e.find('=');
      if (eq == std::string::npos) throw ValidationError("evidence '" + e + "' is not 'name=value'");
      std::size_t pos = 0;
      const std::string v = e.substr(eq + 1);
      unsigned long long x = 0;
      try {
        x = std::stoull(v, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == 0 || pos != v.size()) throw ValidationError("evidence value '" + v + "' is not a symbol index");
      q.evidence[e.substr(0, eq)] = x;
    }
  }
  if (!a.algo.empty()) q.engine = engine_of(a.algo);
  q.normalize = q.normalize || a.normalize;
  q.shortcuts = a.shortcuts;
  auto r = query(g, q);
  json j;
  j["targets"] = resolve_targets(g, q);
  j["engine"] = engine_name(q.engine);
  j["table"] = factor_json(r.table, c.digits);
  j["total"] = complex_json(r.total, c.digits);
  j["normalized"] = r.normalized;
  j["shortcuts"] = r.shortcuts;
  emit(j);
  return 0;
}

int cmd_sample(const Common& c, std::uint64_t seed, std::size_t count, const std::string& mode, bool print) {
  const Document d = load(c.file);
  const Graph& g = need_graph(d);
  SamplerMode m = mode == "automatic"     ? SamplerMode::automatic
                  : mode == "constrained" ? SamplerMode::constrained
                  : mode == "generative"  ? SamplerMode::generative
                                          : throw ValidationError("unknown sampler mode '" + mode + "'");
  auto r = sample(g, count, seed, m);
  Factor emp = r.histogram(g), exact = normalized_exterior(g);
  json j;
  j["mode"] = r.mode;
  j["seed"] = seed;
  j["count"] = count;
  j["proposals"] = r.proposals;
  j["accepted"] = r.accepted;
  j["acceptance_rate"] = r.acceptance_rate();
  j["tv"] = total_variation(emp, exact);
  j["empirical"] = factor_json(emp, c.digits);
  j["exact"] = factor_json(exact, c.digits);
  if (print) j["samples"] = r.samples;
  emit(j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal factor graph toolkit"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* s) {
    s->add_option("file", c.file, "model document (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--digits", c.digits, "significant digits in printed tables (0 = full precision)");
  };

  auto* validate = app.add_subcommand("validate", "parse and check a document");
  add_common(validate);
  auto* cls = app.add_subcommand("classify", "structural and model-class flags");
  add_common(cls);

  ExteriorArgs ea;
  auto* ext = app.add_subcommand("exterior", "exterior function with op counts");
  add_common(ext);
  ext->add_option("--algo", ea.algo, "bruteforce | eliminate | spa")->check(CLI::IsMember({"bruteforce", "eliminate", "spa"}));
  ext->add_option("--strategy", ea.strategy, "greedy | given")->check(CLI::IsMember({"greedy", "given"}));
  ext->add_option("--order", ea.order, "merge pairs u:v for the given strategy")->delimiter(',');
  ext->add_flag("--indicator-kernels", ea.kernels, "fold indicator stars with their operation");

  bool spa_kernels = false, spa_scale = false, spa_halves = false;
  auto* spa = app.add_subcommand("spa", "sum-product edge marginals on a tree");
  add_common(spa);
  spa->add_flag("--indicator-kernels", spa_kernels);
  spa->add_flag("--extract-scale", spa_scale, "normalize messages and track log scales");
  spa->add_flag("--allow-half-edges", spa_halves, "accumulate over dangling edges");

  bool literal = false, verify = false;
  auto* tr = app.add_subcommand("transform", "apply the document's holographic transform");
  add_common(tr);
  tr->add_flag("--literal", literal, "insert transformer vertices, then merge");
  tr->add_flag("--verify", verify, "check the Holant identity by brute force");

  std::string model, direction;
  auto* conv = app.add_subcommand("convert", "convert between model descriptions and NFGs");
  add_common(conv);
  conv->add_option("--model", model)->required()->check(CLI::IsMember({"fg", "cfg", "cdn"}));
  conv->add_option("--direction", direction)->required()->check(CLI::IsMember({"to-nfg", "from-nfg"}));

  std::string code_file, code_as = "generator";
  auto* codes = app.add_subcommand("codes", "linear code realizations");
  codes->require_subcommand(1);
  for (auto [name, help] : {std::pair{"gen", "generator realization as a document"},
                            std::pair{"parity", "parity-check realization as a document"},
                            std::pair{"list", "codewords and weight distribution"},
                            std::pair{"dual", "codewords of the Fourier dual"}}) {
    auto* s = codes->add_subcommand(name, help);
    s->add_option("matrix", code_file, "matrix file: 'p n k' then k rows")->required()->check(CLI::ExistingFile);
    if (std::string(name) == "list" || std::string(name) == "dual")
      s->add_option("--as", code_as, "generator | parity")->check(CLI::IsMember({"generator", "parity"}));
  }

  InferArgs ia;
  auto* inf = app.add_subcommand("infer", "conditional or marginal query");
  add_common(inf);
  inf->add_option("--target", ia.targets);
  inf->add_option("--marginalize", ia.marginalize);
  inf->add_option("--evidence", ia.evidence, "name=value");
  inf->add_option("--algo", ia.algo)->check(CLI::IsMember({"bruteforce", "eliminate", "spa"}));
  inf->add_flag("--normalize", ia.normalize);
  inf->add_flag("--shortcuts", ia.shortcuts, "use model-class shortcuts");

  std::uint64_t seed = 0;
  std::size_t count = 10000;
  std::string mode = "automatic";
  bool print = false;
  auto* smp = app.add_subcommand("sample", "draw samples and compare with the exterior");
  add_common(smp);
  smp->add_option("--seed", seed)->required();
  smp->add_option("--count", count);
  smp->add_option("--mode", mode)->check(CLI::IsMember({"automatic", "constrained", "generative"}));
  smp->add_flag("--print-samples", print);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(c);
    if (*cls) return cmd_classify(c);
    if (*ext) return cmd_exterior(c, ea);
    if (*spa) return cmd_spa(c, spa_kernels, spa_scale, spa_halves);
    if (*tr) return cmd_transform(c, literal, verify);
    if (*conv) return cmd_convert(c, model, direction);
    if (*codes)
      for (auto* s : codes->get_subcommands()) return cmd_codes(s->get_name(), code_file, code_as);
    if (*inf) return cmd_infer(c, ia);
    if (*smp) return cmd_sample(c, seed, count, mode, print);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}
