// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "instances.hpp"
#include "oracles.hpp"

using namespace nfg;
using fixtures::Rng;
using fixtures::Values;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  Outcome& o;
  void require(bool ok, const std::string& what) {
    if (!ok && o.pass) {
      o.pass = false;
      o.detail = what;
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double rel(const Factor& a, const Factor& b) { return relative_error(a, b); }

// Union-find over original vertices yields a valid given order.
std::vector<std::pair<std::string, std::string>> random_order(const Graph& g, Rng& rng) {
  std::vector<InternalEdge> es = g.internal_edges();
  std::shuffle(es.begin(), es.end(), rng);
  std::map<std::string, std::string> parent;
  for (auto& v : g.vertices()) parent[v.id] = v.id;
  std::function<std::string(const std::string&)> root = [&](const std::string& v) {
    return parent[v] == v ? v : parent[v] = root(parent[v]);
  };
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& e : es) {
    auto a = root(e.a.vertex), b = root(e.b.vertex);
    if (a == b) continue;
    out.push_back({e.a.vertex, e.b.vertex});
    parent[a] = b;
  }
  return out;
}

Outcome criterion1() {
  Outcome o;
  Check c{o};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    fixtures::GraphShape s;
    s.values = seed % 4 == 3 ? Values::complex : Values::real;
    Graph g = fixtures::random_graph(rng, s);
    Factor ref = exterior_bruteforce(g);
    EliminationOptions greedy;
    EliminationOptions given;
    given.strategy = Strategy::given;
    given.order = random_order(g, rng);
    double e1 = rel(eliminate(g, greedy).result, ref), e2 = rel(eliminate(g, given).result, ref);
    worst = std::max({worst, e1, e2});
    c.require(e1 <= 1e-9 && e2 <= 1e-9, "seed " + std::to_string(seed) + " error " + fmt(std::max(e1, e2)));
  }
  o.detail = o.pass ? "200 graphs, max relative error " + fmt(worst) : o.detail;
  return o;
}

Outcome criterion2() {
  Outcome o;
  Check c{o};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(1000 + seed);
    Graph g = fixtures::random_tree(rng, 10, 0, Values::real);
    SpaOptions opt;
    opt.extract_scale = seed % 2 == 1;
    auto em = sum_product(g, opt);
    for (auto& e : g.internal_edges()) {
      auto ref = oracle::edge_marginal(g, e.id);
      Factor m1 = em.message(e.a.vertex, e.b.vertex), m2 = em.message(e.b.vertex, e.a.vertex);
      double scale = std::exp(em.log_scales.at({e.a.vertex, e.b.vertex}) + em.log_scales.at({e.b.vertex, e.a.vertex}));
      const Factor& got = em.marginals.at(e.id);
      double peak = 0.0;
      for (auto& v : ref) peak = std::max(peak, std::abs(v));
      double err = 0.0, err2 = 0.0;
      for (std::size_t x = 0; x < ref.size(); ++x) {
        err = std::max(err, std::abs(got[x] - ref[x]));
        err2 = std::max(err2, std::abs(m1[x] * m2[x] * scale - got[x]));
      }
      err /= std::max(peak, 1e-300);
      err2 /= std::max(peak, 1e-300);
      worst = std::max({worst, err, err2});
      c.require(err <= 1e-9 && err2 <= 1e-9, "seed " + std::to_string(seed) + " edge " + e.id + " error " + fmt(err));
    }
  }
  o.detail = o.pass ? "100 trees, max relative error " + fmt(worst) : o.detail;
  return o;
}

Outcome criterion3() {
  Outcome o;
  Check c{o};
  double worst = 0.0;
  std::vector<Alphabet> ordered;
  for (std::size_t q : {2, 3, 4, 5, 10}) ordered.push_back(Alphabet::ordered(q));
  for (std::size_t q : {2, 3}) {
    ordered.push_back(Alphabet::ordered_product({q, q}));
    ordered.push_back(Alphabet::ordered_product({q, q, q}));
  }
  ordered.push_back(Alphabet::ordered_product({2, 3, 4}));
  for (auto& a : ordered) {
    auto p = make_cumulus_pair(a);
    double r = std::max(p.residual(), p.swapped().residual());
    worst = std::max(worst, r);
    c.require(r <= 1e-12, "cumulus pair on " + a.describe() + " residual " + fmt(r));
  }
  for (auto& a : {Alphabet::cyclic(2), Alphabet::cyclic(3), Alphabet::cyclic(4), Alphabet::group({2, 3})}) {
    auto p = make_fourier_pair(a);
    double r = std::max(p.residual(), p.swapped().residual());
    worst = std::max(worst, r);
    c.require(r <= 1e-12, "fourier pair on " + a.describe() + " residual " + fmt(r));
  }
  o.detail = o.pass ? "12 ordered + 4 group alphabets, max residual " + fmt(worst) : o.detail;
  return o;
}

Outcome criterion4() {
  Outcome o;
  Check c{o};
  for (std::size_t n : {3, 4})
    for (std::size_t q : {2, 3, 4}) {
      Alphabet a = Alphabet::ordered(q);
      Factor z = exterior_bruteforce(max_lemma_graph(a, n));
      Factor eq = with_labels(make_indicator(IndicatorKind::eq, a, n), z.labels());
      bool exact = true;
      for (std::size_t k = 0; k < z.size(); ++k) {
        double r = std::abs(z[k]) < 1e-9 ? 0.0 : std::abs(z[k] - 1.0) < 1e-9 ? 1.0 : -1.0;
        exact = exact && r == eq[k].real();
      }
      c.require(exact, "n=" + std::to_string(n) + " |X|=" + std::to_string(q) + " differs from equality");
    }
  if (o.pass) o.detail = "6 configurations equal the equality indicator";
  return o;
}

TransformerPair random_pair(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::vector<Complex> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = (i == j ? 1.0 : 0.0) + u(rng);
  auto inv = oracle::inverse(m, n);
  ProductDomain d({{"arg1", Alphabet::plain(n)}, {"arg2", Alphabet::plain(n)}});
  return {Factor(d, m), Factor(d, inv)};
}

// Exact pairs with small integer or unit-root entries.
TransformerPair exact_pair(Rng& rng, std::size_t n) {
  if (n == 1) {
    Factor one = make_indicator(IndicatorKind::eq, Alphabet::plain(1), 2);
    return {one, one};
  }
  std::uniform_int_distribution<int> pick(0, 2);
  switch (pick(rng)) {
    case 0: return make_cumulus_pair(Alphabet::ordered(n));
    case 1: return make_cumulus_pair(Alphabet::ordered(n)).swapped();
    default: return make_fourier_pair(Alphabet::cyclic(n));
  }
}

Outcome criterion5() {
  Outcome o;
  Check c{o};
  double worst = 0.0, worst_id = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(2000 + seed);
    fixtures::GraphShape s;
    s.max_vertices = 5;
    s.max_internal = 6;
    s.values = seed % 2 ? Values::integer : Values::real;
    Graph g = fixtures::random_graph(rng, s);
    Factor z_in = exterior_bruteforce(g);
    HolographicSpec spec, ident;
    std::uniform_int_distribution<std::size_t> na(1, 3);
    for (auto& h : g.half_edges()) {
      Alphabet y = Alphabet::plain(na(rng));
      spec.external[h.id] = fixtures::random_factor(rng, {{"x", h.alphabet}, {"y", y}}, Values::complex);
      ident.external[h.id] = make_indicator(IndicatorKind::eq, h.alphabet, 2);
    }
    for (auto& e : g.internal_edges()) {
      if (e.is_loop()) continue;
      std::bernoulli_distribution side(0.5);
      const std::string fwd = side(rng) ? e.a.vertex : e.b.vertex;
      spec.internal[e.id] = {random_pair(rng, e.alphabet.size()), fwd};
      ident.internal[e.id] = {exact_pair(rng, e.alphabet.size()), fwd};
    }
    Graph out = holographic_transform(g, spec);
    double err = rel(exterior_bruteforce(out), ght_rhs(g, z_in, spec));
    Graph out_id = holographic_transform(g, ident);
    double err_id = rel(exterior_bruteforce(out_id), z_in);
    worst = std::max(worst, err);
    worst_id = std::max(worst_id, err_id);
    c.require(err <= 1e-9, "seed " + std::to_string(seed) + " GHT error " + fmt(err));
    c.require(err_id <= 1e-12, "seed " + std::to_string(seed) + " identity-external error " + fmt(err_id));
  }
  if (o.pass) o.detail = "100 graphs, GHT error " + fmt(worst) + ", identity-external error " + fmt(worst_id);
  return o;
}

Outcome criterion6() {
  Outcome o;
  Check c{o};
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(3000 + seed);
    std::uniform_int_distribution<std::size_t> nn(1, 3), nq(2, 5);
    const std::size_t n = nn(rng), q = nq(rng);
    std::vector<Axis> oax, gax;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < n; ++k) {
      labels.push_back("a" + std::to_string(k));
      oax.push_back({labels.back(), Alphabet::ordered(q)});
      gax.push_back({labels.back(), Alphabet::cyclic(q)});
    }
    Factor fo = fixtures::random_factor(rng, oax), fg = fixtures::random_factor(rng, gax, Values::complex);
    for (Kernel k : {Kernel::cumulus, Kernel::difference}) {
      std::uint64_t ops = 0;
      Factor fast = fast_axis_transform(fo, k, labels, &ops);
      double err = rel(fast, dense_axis_transform(fo, k, labels));
      worst = std::max(worst, err);
      c.require(err <= 1e-9, std::string(kernel_name(k)) + " differs from dense by " + fmt(err));
      std::uint64_t expect = n * (q - 1);
      for (std::size_t i = 1; i < n; ++i) expect *= q;
      c.require(ops == expect, std::string(kernel_name(k)) + " op count " + std::to_string(ops) + " != " +
                                   std::to_string(expect));
    }
    // Oracle cross-check of the cumulus against the direct CDF.
    double ecdf = rel(fast_axis_transform(fo, Kernel::cumulus, labels), oracle::cdf(fo));
    c.require(ecdf <= 1e-9, "cumulus differs from the direct CDF by " + fmt(ecdf));
    for (Kernel k : {Kernel::fourier, Kernel::fourier_inv}) {
      double err = rel(fast_axis_transform(fg, k, labels), dense_axis_transform(fg, k, labels));
      worst = std::max(worst, err);
      c.require(err <= 1e-9, std::string(kernel_name(k)) + " differs from dense by " + fmt(err));
    }
    Factor ref = fg;
    for (auto& l : labels) ref = oracle::dft_along(ref, l);
    double edft = rel(fast_axis_transform(fg, Kernel::fourier, labels), ref);
    c.require(edft <= 1e-9, "fourier differs from the direct DFT by " + fmt(edft));
    double r1 = rel(fast_axis_transform(fast_axis_transform(fo, Kernel::cumulus, labels), Kernel::difference, labels), fo);
    double r2 = rel(fast_axis_transform(fast_axis_transform(fo, Kernel::difference, labels), Kernel::cumulus, labels), fo);
    double r3 =
        rel(fast_axis_transform(fast_axis_transform(fg, Kernel::fourier, labels), Kernel::fourier_inv, labels), fg);
    c.require(std::max({r1, r2, r3}) <= 1e-9, "round trip is not the identity");
    ++cases;
  }
  if (o.pass) o.detail = std::to_string(cases) + " tables, max error vs dense " + fmt(worst) + ", op counts exact";
  return o;
}

Outcome criterion7() {
  Outcome o;
  Check c{o};
  double worst = 0.0;
  auto note = [&](double e, const std::string& what) {
    worst = std::max(worst, e);
    c.require(e <= 1e-9, what + " error " + fmt(e));
  };
  auto plain = [](std::size_t n) { return Alphabet::plain(n); };
  auto cyc = [](std::size_t n) { return Alphabet::cyclic(n); };
  auto ord = [](std::size_t n) { return Alphabet::ordered(n); };
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(4000 + seed);
    const std::string s = " (seed " + std::to_string(seed) + ")";
    // Factor graph <-> constrained model.
    ModelDesc fg = fixtures::random_desc(rng, plain, Values::real);
    Graph g = fg_to_nfg(fg);
    note(rel(exterior_bruteforce(g), oracle::fg_product(fg)), "FG to NFG" + s);
    c.require(classify(g).constrained, "FG to NFG is not constrained" + s);
    ModelDesc back = nfg_to_fg(g);
    note(rel(fg_product(back), oracle::fg_product(fg)), "NFG to FG" + s);
    // Split-interface normalization.
    Graph m = fixtures::random_model(rng, fixtures::ModelKind::constrained, Values::real);
    Graph n = normalize_constrained(m);
    note(rel(exterior_bruteforce(n), oracle::exterior(m)), "normalization" + s);
    ModelDesc nf = nfg_to_fg(n);
    note(rel(fg_product(nf), oracle::exterior(m)), "normalized to FG" + s);
    // Convolutional model <-> generative sum model.
    ModelDesc cfg = fixtures::random_desc(rng, cyc, Values::real, 3, 3, 3, true);
    Graph gc = cfg_to_nfg(cfg);
    note(rel(exterior_bruteforce(gc), oracle::cfg_product(cfg)), "CFG to NFG" + s);
    auto flags = classify(gc);
    c.require(flags.generative, "CFG to NFG is not generative" + s);
    note(rel(cfg_product(nfg_to_cfg(gc)), oracle::cfg_product(cfg)), "NFG to CFG" + s);
    Graph dual = fourier_dual_generative_sum(gc);
    Factor zhat = oracle::exterior(gc);
    for (auto& l : zhat.labels()) zhat = oracle::dft_along(zhat, l);
    note(rel(exterior_bruteforce(dual), zhat), "Fourier dual of the sum model" + s);
    // CDN.
    ModelDesc base = fixtures::random_desc(rng, ord, Values::positive, 3, 3, 3, true, true);
    Graph mx = max_to_nfg(base);
    Graph tr = cumulus_transformed(mx);
    CdnDesc cdn = to_cdn(tr);
    for (auto& f : cdn.functions) c.require(cdf_violations(f.table).empty(), "CDF axioms fail" + s);
    Factor ref = oracle::cdf(oracle::exterior(mx));
    note(rel(cdn_product(cdn), ref), "CDN product" + s);
    note(rel(exterior_bruteforce(tr), ref), "transformed model" + s);
  }
  if (o.pass) o.detail = "50 instances per conversion, max error " + fmt(worst);
  return o;
}

Outcome criterion8() {
  Outcome o;
  Check c{o};
  auto t0 = std::chrono::steady_clock::now();
  const Alphabet f2 = Alphabet::cyclic(2);
  const std::vector<std::size_t> want{1, 0, 0, 7, 7, 0, 0, 1};
  Graph gen = generator_realization(hamming_generator(), f2);
  Graph par = parity_realization(hamming_parity(), f2);
  auto cg = codewords(gen), cp = codewords(par);
  c.require(cg.words.size() == 16 && weight_distribution(cg) == want, "generator realization weights");
  c.require(cp.words.size() == 16 && weight_distribution(cp) == want, "parity realization weights");
  c.require(cg.words == cp.words, "realizations disagree");
  // Exhaustive enumeration of the 2^7 words against the parity checks.
  std::set<std::vector<std::size_t>> brute;
  auto H = hamming_parity();
  for (std::size_t w = 0; w < 128; ++w) {
    std::vector<std::size_t> y(7);
    for (std::size_t j = 0; j < 7; ++j) y[j] = (w >> (6 - j)) & 1;
    bool ok = true;
    for (auto& row : H) {
      std::size_t s = 0;
      for (std::size_t j = 0; j < 7; ++j) s += row[j] * y[j];
      ok = ok && s % 2 == 0;
    }
    if (ok) brute.insert(y);
  }
  c.require(std::set<std::vector<std::size_t>>(cg.words.begin(), cg.words.end()) == brute, "enumeration disagrees");
  for (auto* g : {&gen, &par}) {
    auto d = codewords(dual_via_fourier(*g));
    std::size_t nonzero = 0;
    bool weight4 = true;
    for (auto& w : d.words) {
      std::size_t k = std::count_if(w.begin(), w.end(), [](auto s) { return s != 0; });
      if (k) ++nonzero, weight4 = weight4 && k == 4;
    }
    c.require(d.words.size() == 8 && nonzero == 7 && weight4, "dual words");
    c.require(cg.words.size() * d.words.size() == 128, "|C| |C dual| != 2^7");
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 1.0, "took " + fmt(secs) + " s");
  if (o.pass) o.detail = "16 words (1,0,0,7,7,0,0,1), dual 8 words of weight 4, " + fmt(secs) + " s";
  return o;
}

Outcome criterion9() {
  Outcome o;
  Check c{o};
  double worst = 0.0;
  for (bool constrained : {true, false})
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(5000 + seed + (constrained ? 0 : 1000));
      Graph g = fixtures::independence_model(rng, constrained, 2 + seed % 2);
      auto v = independence(g, {"x"}, {"z"}, {"y"});
      Factor p = normalized_exterior(g);  // axes x, y, z
      const std::size_t nx = p.domain().dim(0), ny = p.domain().dim(1), nz = p.domain().dim(2);
      double res = 0.0;
      if (constrained) {
        c.require(v.kind == IndependenceKind::conditional, "constrained verdict is not conditional");
        for (std::size_t y = 0; y < ny; ++y) {
          double py = 0.0;
          for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t z = 0; z < nz; ++z) py += p.at({x, y, z}).real();
          if (py <= 1e-12) continue;
          for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t z = 0; z < nz; ++z) {
              double pxy = 0.0, pzy = 0.0;
              for (std::size_t k = 0; k < nz; ++k) pxy += p.at({x, y, k}).real();
              for (std::size_t k = 0; k < nx; ++k) pzy += p.at({k, y, z}).real();
              res = std::max(res, std::abs(p.at({x, y, z}).real() * py - pxy * pzy));
            }
        }
      } else {
        c.require(v.kind == IndependenceKind::marginal, "generative verdict is not marginal");
        for (std::size_t x = 0; x < nx; ++x)
          for (std::size_t z = 0; z < nz; ++z) {
            double pxz = 0.0, px = 0.0, pz = 0.0;
            for (std::size_t y = 0; y < ny; ++y) pxz += p.at({x, y, z}).real();
            for (std::size_t y = 0; y < ny; ++y)
              for (std::size_t k = 0; k < nz; ++k) px += p.at({x, y, k}).real();
            for (std::size_t y = 0; y < ny; ++y)
              for (std::size_t k = 0; k < nx; ++k) pz += p.at({k, y, z}).real();
            res = std::max(res, std::abs(pxz - px * pz));
          }
      }
      worst = std::max(worst, res);
      c.require(res <= 1e-8, std::string(constrained ? "conditional" : "marginal") + " residual " + fmt(res));
    }
  if (o.pass) o.detail = "200 parameterizations, max factorization residual " + fmt(worst);
  return o;
}

Outcome criterion10() {
  Outcome o;
  Check c{o};
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(6000 + seed);
    auto kind = seed < 10 ? fixtures::ModelKind::constrained
                : seed < 16 ? fixtures::ModelKind::generative
                            : fixtures::ModelKind::extended;
    Graph g = fixtures::random_model(rng, kind, Values::positive, 3, 3, 3);
    auto r1 = sample(g, 100000, 77 + seed);
    auto r2 = sample(g, 100000, 77 + seed);
    c.require(r1.samples == r2.samples, "sampler is not deterministic for seed " + std::to_string(seed));
    double tv = total_variation(r1.histogram(g), normalized_exterior(g));
    worst = std::max(worst, tv);
    c.require(tv < 0.05, "model " + std::to_string(seed) + " TV " + fmt(tv));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 120.0, "took " + fmt(secs) + " s");
  if (o.pass) o.detail = "20 models, max TV " + fmt(worst) + ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion11() {
  Outcome o;
  Check c{o};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(7000 + seed);
    Graph g = fixtures::derivative_spa(rng, 3 + seed % 2);
    const std::size_t q = g.half("x2").alphabet.size();
    std::uniform_int_distribution<std::size_t> pick(0, q - 1);
    const std::size_t xbar = pick(rng);
    // Product of the hidden functions over (y1, y2), difference-transformed on both axes.
    Factor p = oracle::exterior(g);
    Factor dp = oracle::difference_along(oracle::difference_along(p, "x1"), "x2");
    auto r = derivative_sum_product(g, {{"x1", 0}, {"x2", xbar}});
    Factor want = evaluate(dp, "x2", xbar);
    double err = rel(r.to_evaluator.at("x1"), want);
    // Constant-one on x2: sum of the evaluated variant over all evidence values.
    auto r1 = derivative_sum_product(g, {{"x1", 0}});
    Factor sum = marginalize_sum(dp, "x2");
    double err1 = rel(r1.to_evaluator.at("x1"), sum);
    // Which equals the difference along x1 of p at the top of x2.
    double err2 = rel(sum, oracle::difference_along(evaluate(p, "x2", q - 1), "x1"));
    worst = std::max({worst, err, err1, err2});
    c.require(std::max({err, err1, err2}) <= 1e-9, "seed " + std::to_string(seed) + " error " +
                                                       fmt(std::max({err, err1, err2})));
  }
  if (o.pass) o.detail = "50 parameterizations, max relative error " + fmt(worst);
  return o;
}

// Equality interfaces over integer latents keep every table integral on both paths.
Graph integral_constrained(Rng& rng) {
  Graph g = fixtures::random_model(rng, fixtures::ModelKind::constrained, Values::integer);
  // Every edge takes the alphabet of its interface's half edge.
  std::vector<InternalEdge> in = g.internal_edges();
  std::map<std::string, Alphabet> fix;
  for (auto& e : in) {
    const std::string i = e.a.vertex[0] == 'i' ? e.a.vertex : e.b.vertex;
    e.alphabet = fix.emplace(e.id, g.half_at(i)[0]->alphabet).first->second;
  }
  std::vector<Vertex> vs;
  for (auto& v : g.vertices()) {
    std::vector<Axis> axes;
    for (auto& ax : v.factor.domain().axes()) {
      const std::string e = g.edge_of_axis(v.id, ax.label);
      axes.push_back({ax.label, fix.count(e) ? fix.at(e) : ax.alphabet});
    }
    if (v.id[0] == 'i' && axes.size() > 1) {
      Factor eq = make_indicator(IndicatorKind::eq, axes[0].alphabet, axes.size());
      vs.push_back({v.id, Factor(ProductDomain(axes), eq.values())});
    } else {
      vs.push_back({v.id, fixtures::random_factor(rng, axes, Values::integer)});
    }
  }
  return Graph(vs, in, g.half_edges());
}

Outcome criterion12() {
  Outcome o;
  Check c{o};
  double worst_total = 0.0, worst_real = 0.0;
  std::size_t exact = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(8000 + seed);
    const bool constrained = seed % 2 == 0;
    Graph g = constrained ? (seed % 4 == 0 ? integral_constrained(rng)
                                            : fixtures::random_model(rng, fixtures::ModelKind::constrained))
                          : fixtures::random_model(rng, fixtures::ModelKind::generative, Values::integer);
    const bool integral = !constrained || seed % 4 == 0;
    auto names = g.external_names();
    Query q;
    std::uniform_int_distribution<int> role(0, 2);
    for (auto& n : names) {
      int r = role(rng);
      if (r == 1) q.marginalize.insert(n);
      else if (r == 2) {
        std::uniform_int_distribution<std::size_t> pick(0, g.half_by_external(n).alphabet.size() - 1);
        q.evidence[n] = pick(rng);
      }
    }
    Query s = q;
    s.shortcuts = true;
    auto generic = query(g, q), fast = query(g, s);
    c.require(!fast.shortcuts.empty() || (constrained ? q.evidence.empty() : q.marginalize.empty()),
              "no shortcut applied (seed " + std::to_string(seed) + ")");
    double diff = max_abs_diff(generic.table, fast.table);
    if (integral) {
      c.require(diff == 0.0, "shortcut differs from generic path by " + fmt(diff) + " (seed " + std::to_string(seed) + ")");
      ++exact;
    } else {
      double r = rel(generic.table, fast.table);
      worst_real = std::max(worst_real, r);
      c.require(r <= 1e-12, "shortcut differs by " + fmt(r) + " (seed " + std::to_string(seed) + ")");
    }
    // Evidence mass from the full joint.
    Factor joint = oracle::exterior(g);
    Complex mass{};
    for (std::size_t lin = 0; lin < joint.size(); ++lin) {
      auto cc = joint.domain().coords(lin);
      bool keep = true;
      for (auto& [n, v] : q.evidence) keep = keep && cc[joint.domain().index_of(n)] == v;
      if (keep) mass += joint[lin];
    }
    double et = std::abs(generic.total - mass) / std::max(std::abs(mass), 1.0);
    worst_total = std::max(worst_total, et);
    c.require(et <= 1e-9, "total differs from the evidence mass by " + fmt(et));
  }
  if (o.pass)
    o.detail = "50 models (" + std::to_string(exact) + " integral, bitwise equal; others within " + fmt(worst_real) +
               "), total error " + fmt(worst_total);
  return o;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*run)();
  };
  const Entry all[] = {
      {"elimination matches brute force", criterion1},
      {"sum-product edge marginals", criterion2},
      {"inverse transformer pairs", criterion3},
      {"max indicator lemma", criterion4},
      {"generalized Holant identity", criterion5},
      {"fast axis transforms", criterion6},
      {"model conversions", criterion7},
      {"Hamming code and its dual", criterion8},
      {"independence from separation", criterion9},
      {"sampling semantics", criterion10},
      {"derivative sum-product", criterion11},
      {"inference shortcuts", criterion12},
  };
  int failed = 0, k = 0;
  for (auto& e : all) {
    ++k;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %-32s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", k, e.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
