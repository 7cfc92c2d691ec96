// Regenerates the checked-in data documents with fixed seeds: make_data <output dir>.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <nfg/nfg.hpp>

#include "instances.hpp"

using namespace nfg;
namespace fs = std::filesystem;

namespace {

fs::path out_dir;

void write(const std::string& name, const json& j) {
  std::ofstream(out_dir / name) << j.dump(2) << "\n";
}

json graph_doc(const Graph& g, const std::string& description) {
  DocumentWriter w;
  w.description(description);
  w.graph(g);
  return w.to_json();
}

std::string matrix_file(std::size_t p, const Matrix& m, const std::string& comment) {
  std::ostringstream s;
  s << "# " << comment << "\n" << p << " " << m.at(0).size() << " " << m.size() << "\n";
  for (auto& row : m) {
    for (std::size_t j = 0; j < row.size(); ++j) s << (j ? " " : "") << row[j];
    s << "\n";
  }
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_data <output dir>\n";
    return 64;
  }
  out_dir = argv[1];
  fs::create_directories(out_dir);
  fixtures::Rng rng(20240601);

  write("nfg_definition.json", graph_doc(fixtures::nfg_definition(rng), "four-vertex NFG with two external edges"));
  write("constrained_rejection.json",
        graph_doc(fixtures::constrained_rejection(rng), "constrained model with split interfaces over three latents"));

  {
    ModelDesc fg = fixtures::fg_equivalent(rng);
    DocumentWriter w;
    w.description("factor graph and its equality-interface NFG");
    w.model("fg", fg);
    w.graph(fg_to_nfg(fg));
    write("fg_equivalent.json", w.to_json());
  }

  write("split_interfaces.json", graph_doc(fixtures::split_interfaces(rng), "constrained model with split interfaces g and h"));
  write("independence_constrained.json",
        graph_doc(fixtures::independence_model(rng, true), "constrained model: x and z separated by y"));

  {
    Graph g = fixtures::independence_model(rng, false);
    DocumentWriter w;
    w.description("generative model with a conditional query");
    w.graph(g);
    w.section("query", {{"targets", {"x"}}, {"marginalize", {"z"}}, {"evidence", {{"y", 1}}}, {"engine", "eliminate"},
                        {"normalize", true}});
    write("independence_generative.json", w.to_json());
  }

  {
    ModelDesc cfg = fixtures::cfg_pair(rng);
    Graph g = cfg_to_nfg(cfg);
    DocumentWriter w;
    w.description("convolutional model over Z3 with a Fourier transform of its externals");
    w.model("cfg", cfg);
    w.graph(g);
    json ext = json::array();
    for (auto& h : g.half_edges()) ext.push_back({{"edge", h.id}, {"transformer", "fourier"}});
    w.section("transform", {{"external", ext}});
    write("cfg_pair.json", w.to_json());
  }

  {
    ModelDesc base = fixtures::cdn_base(rng);
    Graph g = cumulus_transformed(max_to_nfg(base));
    DocumentWriter w;
    w.description("cumulative distribution network as a cumulus-transformed max model");
    w.model("cdn", to_cdn(g));
    w.graph(g);
    write("cdn.json", w.to_json());
  }

  write("elimination_triangle.json", graph_doc(fixtures::elimination_triangle(rng), "three-vertex cycle"));
  write("spa_chain_star.json", graph_doc(fixtures::spa_chain_star(rng), "closed tree: chain with a side branch"));

  {
    Graph g = fixtures::derivative_spa(rng);
    DocumentWriter w;
    w.description("equality interfaces over a latent chain, with cumulus transforms");
    w.graph(g);
    w.section("transform", {{"external", {{{"edge", "x1"}, {"transformer", "cumulus"}}}},
                            {"internal", {{{"edge", "y1'"}, {"pair", "cumulus"}, {"forward_at", "f1"}}}}});
    write("derivative_spa.json", w.to_json());
  }

  // Edge alphabet disagrees with the vertex axis it attaches to.
  write("bad_alphabet_mismatch.json", json::parse(R"({
  "description": "invalid: edge alphabet does not match the attached axis",
  "alphabets": [{"name": "A2", "kind": "plain", "size": 2}, {"name": "A3", "kind": "plain", "size": 3}],
  "factors": [
    {"name": "f", "axes": [{"label": "s", "alphabet": "A2"}], "values": [1, 2]},
    {"name": "g", "axes": [{"label": "s", "alphabet": "A2"}], "values": [3, 4]}
  ],
  "vertices": [{"id": "f", "factor": "f"}, {"id": "g", "factor": "g"}],
  "edges": [{"id": "s", "kind": "internal", "alphabet": "A3",
             "endpoints": [{"vertex": "f", "axis": "s"}, {"vertex": "g", "axis": "s"}]}]
})"));

  std::ofstream(out_dir / "hamming_generator.txt") << matrix_file(2, hamming_generator(), "[7,4] Hamming code, generator matrix");
  std::ofstream(out_dir / "hamming_parity.txt") << matrix_file(2, hamming_parity(), "[7,4] Hamming code, parity-check matrix");
  std::ofstream(out_dir / "ternary_generator.txt")
      << matrix_file(3, {{1, 0, 1, 2}, {0, 1, 1, 1}}, "ternary [4,2] code, generator matrix");
  return 0;
}
