// kgtopos command-line front end.
//
// Exit codes: 0 success, 1 a check failed, 2 bad input, 3 a size cap was hit.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgtopos/error.hpp"
#include "kgtopos/incidence.hpp"
#include "kgtopos/line_digraph.hpp"
#include "kgtopos/sheaves.hpp"
#include "kgtopos/verify.hpp"

using namespace kgtopos;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kInputError = 2, kSizeCap = 3 };

struct InputError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

KgPtr load_graph(const std::string& path) { return std::make_shared<const KnowledgeGraph>(parse_kg(read_file(path))); }

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// Options shared by every command that builds a site.
struct SiteOptions {
  std::string topology = "path";
  std::string coverage = "factoring";
  std::optional<std::size_t> max_path_length;
  std::size_t sieve_cap = kDefaultSieveCap;

  void add(CLI::App* cmd) {
    cmd->add_option("--topology", topology, "path or atomic")->check(CLI::IsMember({"path", "atomic"}));
    cmd->add_option("--coverage", coverage, "path coverage: factoring or literal")
        ->check(CLI::IsMember({"factoring", "literal"}));
    cmd->add_option("--max-path-length", max_path_length, "bound on path length (required for cyclic graphs)");
    cmd->add_option("--sieve-cap", sieve_cap, "max morphisms into one object")
        ->check(CLI::Range(std::size_t{1}, kMaxSieveCap));
  }

  PathCoverage kind() const { return coverage == "literal" ? PathCoverage::literal : PathCoverage::factoring; }

  Site build(const KgPtr& kg) const {
    auto cat = std::make_shared<const FreeCategory>(build_free_category(kg, max_path_length));
    auto space = std::make_shared<const SieveSpace>(cat, sieve_cap);
    return topology == "atomic" ? atomic_site(space) : path_site(space, kind());
  }
};

// --- matrices ---------------------------------------------------------------

struct MatricesCmd {
  std::string input;
  std::string format = "csv";
  std::string output_dir;
  bool head = false, tail = false, gram_out = false, gram_in = false, adj_out = false, adj_in = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("matrices", "incidence, Gram and line-adjacency matrices");
    c->add_option("input", input, "triple file")->required();
    c->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--output-dir", output_dir, "write one CSV file per matrix instead of stdout");
    c->add_flag("--head-incidence", head);
    c->add_flag("--tail-incidence", tail);
    c->add_flag("--gram-out", gram_out);
    c->add_flag("--gram-in", gram_in);
    c->add_flag("--adjacency-out", adj_out);
    c->add_flag("--adjacency-in", adj_in);
    c->callback([this] { code = run(); });
  }

  int code = kOk;

  int run() {
    const auto kg = load_graph(input);
    std::vector<std::pair<std::string, IntMatrix>> out;
    const bool all = !(head || tail || gram_out || gram_in || adj_out || adj_in);
    if (all || head) out.emplace_back("H_head", head_incidence(*kg));
    if (all || tail) out.emplace_back("H_tail", tail_incidence(*kg));
    if (all || gram_out) out.emplace_back("M_out", kgtopos::gram_out(*kg));
    if (all || gram_in) out.emplace_back("M_in", kgtopos::gram_in(*kg));
    if (all || adj_out) out.emplace_back("A_out", line_adjacency_out(*kg));
    if (all || adj_in) out.emplace_back("A_in", line_adjacency_in(*kg));

    if (!output_dir.empty()) {
      std::filesystem::create_directories(output_dir);
      for (const auto& [name, m] : out) std::ofstream(std::filesystem::path(output_dir) / (name + ".csv")) << to_csv(m);
      return kOk;
    }
    if (format == "json") {
      json j = json::object();
      for (const auto& [name, m] : out) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          json row = json::array();
          for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
          rows.push_back(row);
        }
        j[name] = rows;
      }
      json spectra{{"out", spectrum_formula(*kg)}, {"in", spectrum_formula_in(*kg)}};
      j["spectrum"] = spectra;
      print(j);
      return kOk;
    }
    if (out.size() == 1) {
      std::cout << to_csv(out.front().second);
      return kOk;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i) std::cout << "\n";
      std::cout << "# " << out[i].first << "\n" << to_csv(out[i].second);
    }
    return kOk;
  }
};

// --- line ---------------------------------------------------------------------

struct LineCmd {
  std::string input;
  std::string direction = "out";
  std::string format = "dot";
  int code = kOk;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("line", "line digraph of a graph");
    c->add_option("input", input, "triple file")->required();
    c->add_option("--direction", direction, "out (shared heads) or in (shared tails)")
        ->check(CLI::IsMember({"out", "in"}));
    c->add_option("--format", format)->check(CLI::IsMember({"dot", "json"}));
    c->callback([this] { code = run(); });
  }

  int run() {
    const auto kg = load_graph(input);
    const auto g = direction == "in" ? build_in_line(*kg) : build_out_line(*kg);
    if (format == "dot") {
      std::cout << to_dot(g, *kg, direction == "in" ? "L_in" : "L_out");
      return kOk;
    }
    auto name = [](std::size_t v) { return "t" + std::to_string(v + 1); };
    json vertices = json::array(), edges = json::array(), comps = json::array();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      vertices.push_back({{"id", name(v)}, {"label", kg->triple_label(v)}});
      for (auto w : g.adjacency[v]) edges.push_back({name(v), name(w)});
    }
    for (const auto& block : scc(g).canonical().blocks) {
      json b = json::array();
      for (auto v : block) b.push_back(name(v));
      comps.push_back(b);
    }
    print({{"direction", direction}, {"vertices", vertices}, {"edges", edges}, {"components", comps}});
    return kOk;
  }
};

// --- freecat / covers -------------------------------------------------------------

struct FreecatCmd {
  std::string input;
  std::optional<std::size_t> max_path_length;
  int code = kOk;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("freecat", "free category as JSON");
    c->add_option("input", input, "triple file")->required();
    c->add_option("--max-path-length", max_path_length, "bound on path length (required for cyclic graphs)");
    c->callback([this] { code = run(); });
  }

  int run() {
    const auto cat = build_free_category(load_graph(input), max_path_length);
    if (!cat.closed())
      std::cerr << "warning: hom-sets are truncated at length " << *max_path_length
                << "; composition is partial and site constructions will refuse this category\n";
    print(free_category_to_json(cat));
    return kOk;
  }
};

struct CoversCmd {
  std::string input;
  SiteOptions site;
  int code = kOk;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("covers", "covering sieves of a generated topology");
    c->add_option("input", input, "triple file")->required();
    site.add(c);
    c->callback([this] { code = run(); });
  }

  int run() {
    const auto s = site.build(load_graph(input));
    print(topology_to_json(s));
    return kOk;
  }
};

// --- sheaf --------------------------------------------------------------------

json section_counts(const Presheaf& F) {
  json j = json::object();
  const auto& kg = *F.category().graph();
  for (std::size_t e = 0; e < kg.entity_count(); ++e) j[kg.entities()[e]] = F.size(e);
  return j;
}

struct SheafCmd {
  std::string action;
  std::string input;
  std::string presheaf;
  std::string other;
  std::string family;
  std::size_t section_cap = kDefaultSectionCap;
  SiteOptions site;
  int code = kOk;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("sheaf", "presheaf workflows on a site");
    c->add_option("action", action, "check, glue, sheafify, global, omega or adjoint")
        ->required()
        ->check(CLI::IsMember({"check", "glue", "sheafify", "global", "omega", "adjoint"}));
    c->add_option("input", input, "triple file")->required();
    c->add_option("--presheaf", presheaf, "presheaf JSON");
    c->add_option("--other", other, "second presheaf JSON (adjoint: the sheaf G)");
    c->add_option("--family", family, "matching family JSON (glue)");
    c->add_option("--section-cap", section_cap, "max sections per object for Hom enumeration (0 = no cap)");
    site.add(c);
    c->callback([this] { code = run(); });
  }

  Presheaf need(const std::shared_ptr<const FreeCategory>& cat, const std::string& path, const char* flag) const {
    if (path.empty()) throw InputError(std::string("sheaf ") + action + " needs " + flag);
    return load_presheaf(cat, read_json(path));
  }

  int run() {
    const auto kg = load_graph(input);
    const auto s = site.build(kg);
    const auto cat = s.space->category_ptr();

    if (action == "omega") {
      const auto O = omega(s);
      print({{"topology", s.name}, {"section_counts", section_counts(O)}, {"presheaf", presheaf_to_json(O)}});
      return kOk;
    }
    const auto F = need(cat, presheaf, "--presheaf");
    if (action == "check") {
      const auto r = is_sheaf(F, s);
      print(sheaf_check_to_json(r, F, s));
      return r.is_sheaf ? kOk : kCheckFailed;
    }
    if (action == "glue") return glue_family(F, s);
    if (action == "sheafify") {
      const auto a = sheafify(F, s);
      print({{"topology", s.name}, {"section_counts", section_counts(a.sheaf())}, {"presheaf", presheaf_to_json(a.sheaf())}});
      return kOk;
    }
    if (action == "global") {
      json list = json::array();
      for (const auto& g : global_sections(F)) {
        json x = json::object();
        for (std::size_t e = 0; e < g.size(); ++e) x[kg->entities()[e]] = F.label(e, g[e]);
        list.push_back(x);
      }
      print({{"count", list.size()}, {"sections", list}});
      return kOk;
    }
    // adjoint
    if (site.topology != "path") throw InputError("sheaf adjoint runs on the path site; drop --topology atomic");
    const auto G = need(cat, other, "--other");
    const auto r = check_adjunction(F, G, s, section_cap);
    print({{"ok", r.ok},
           {"hom_path", r.left_count},
           {"hom_atomic", r.right_count},
           {"bijection", r.bijection},
           {"message", r.message}});
    return r.ok ? kOk : kCheckFailed;
  }

  // Family JSON: {"object": "B", "values": {"<path>": "<section label>", ...}}.
  // The sieve is the one generated by the listed paths.
  int glue_family(const Presheaf& F, const Site& s) {
    if (family.empty()) throw InputError("sheaf glue needs --family");
    const auto j = read_json(family);
    const auto& cat = s.category();
    const auto& kg = *cat.graph();
    if (!j.contains("object") || !j.contains("values") || !j["values"].is_object())
      throw SchemaError("family JSON needs \"object\" and an object-valued \"values\"");
    const auto obj = kg.entity_index(j["object"].get<std::string>());
    if (!obj) throw SchemaError("unknown object " + j["object"].dump());
    std::map<std::size_t, std::size_t> values;
    std::vector<std::size_t> generators;
    for (const auto& [desc, label] : j["values"].items()) {
      const auto id = cat.find(parse_path(desc, kg));
      if (!id) throw SchemaError("path " + desc + " is not a morphism of the category");
      const auto& p = cat.morphism(*id);
      if (p.target != *obj) throw SchemaError("path " + desc + " does not end at " + kg.entities()[*obj]);
      const auto x = F.find_label(p.source, label.get<std::string>());
      if (!x) throw SchemaError("no section " + label.dump() + " at " + kg.entities()[p.source]);
      values[*id] = *x;
      generators.push_back(*id);
    }
    const Sieve sieve{*obj, s.space->generated(*obj, generators)};
    const auto fam = family_from_values(F, *s.space, sieve, values);
    const auto section = glue(F, s, fam);
    print({{"object", kg.entities()[*obj]},
           {"sieve", describe(*s.space, sieve)},
           {"family", family_to_json(fam, F, *s.space)},
           {"section", F.label(*obj, section)}});
    return kOk;
  }
};

// --- verify ---------------------------------------------------------------------

std::uint64_t default_seed() {
  if (const char* env = std::getenv("KGTOPOS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InputError(std::string("KGTOPOS_SEED is not an integer: ") + env);
    }
  }
  return 42;
}

struct VerifyCmd {
  std::string input;
  bool random = false;
  bool timings = false;
  std::optional<std::uint64_t> seed;
  VerifyOptions opt;
  std::string coverage = "factoring";
  std::string presheaf;
  int code = kOk;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("verify", "run every theorem check on a graph and/or random suites");
    c->add_option("input", input, "triple file");
    c->add_flag("--random", random, "run the seeded random property suites");
    c->add_option("--seed", seed, "random seed (default: KGTOPOS_SEED or 42)");
    c->add_option("--cases", opt.cases, "cases per random suite");
    c->add_option("--max-size", opt.max_size, "entity bound for random incidence graphs");
    c->add_option("--sieve-cap", opt.sieve_cap)->check(CLI::Range(std::size_t{1}, kMaxSieveCap));
    c->add_option("--section-cap", opt.section_cap);
    c->add_option("--max-path-length", opt.max_path_length);
    c->add_option("--coverage", coverage)->check(CLI::IsMember({"factoring", "literal"}));
    c->add_option("--presheaf", presheaf, "presheaf JSON to check for the sheaf condition on the path site");
    c->add_flag("--timings", timings, "include wall times (output is then not reproducible)");
    c->callback([this] { code = run(); });
  }

  int run() {
    if (input.empty() && !random) throw InputError("verify needs an input file, --random, or both");
    opt.seed = seed ? *seed : default_seed();
    opt.coverage = coverage == "literal" ? PathCoverage::literal : PathCoverage::factoring;
    if (!presheaf.empty()) {
      if (input.empty()) throw InputError("verify --presheaf needs an input graph");
      opt.presheaf = read_json(presheaf);
    }
    VerifyReport report;
    report.seed = opt.seed;
    if (!input.empty()) verify_graph(load_graph(input), opt, report);
    if (random) verify_random(opt, report);
    print(report.to_json(timings));
    return report.passed() ? kOk : kCheckFailed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgtopos: knowledge graphs, line digraphs, free categories, sites and sheaves"};
  app.require_subcommand(1);
  MatricesCmd matrices;
  LineCmd line;
  FreecatCmd freecat;
  CoversCmd covers;
  SheafCmd sheaf;
  VerifyCmd verify;
  matrices.add(app);
  line.add(app);
  freecat.add(app);
  covers.add(app);
  sheaf.add(app);
  verify.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  } catch (const SizeError& e) {
    std::cerr << "size cap: " << e.what() << "\n";
    return kSizeCap;
  } catch (const GluingError& e) {
    std::cerr << "gluing failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const UniquenessError& e) {
    std::cerr << "gluing failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  for (int c : {matrices.code, line.code, freecat.code, covers.code, sheaf.code, verify.code})
    if (c != kOk) return c;
  return kOk;
}
