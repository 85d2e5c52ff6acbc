#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli_runner.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kExample = data("worked_example.kg");

}  // namespace

TEST_CASE("matrices") {
  auto r = run_cli("matrices " + kExample + " --adjacency-out");
  CHECK(r.code == 0);
  CHECK(r.out == slurp(golden_path("A_out.csv")));
  r = run_cli("matrices " + kExample + " --head-incidence");
  CHECK(r.out == slurp(golden_path("H_head.csv")));
  r = run_cli("matrices " + kExample + " --tail-incidence");
  CHECK(r.out == slurp(golden_path("H_tail.csv")));
  r = run_cli("matrices " + kExample + " --format json");
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["spectrum"]["out"] == nlohmann::json{-1, -1, 1, 1});
  CHECK(j["A_out"][0] == nlohmann::json{0, 1, 0, 0});
}

TEST_CASE("input errors exit 2") {
  CHECK(run_cli("matrices " + data("malformed.kg")).code == 2);
  CHECK(run_cli("matrices " + data("does-not-exist.kg")).code == 2);
  CHECK(run_cli("freecat " + data("cyclic.kg")).code == 2);
  CHECK(run_cli("covers " + kExample + " --topology nonsense").code == 2);
  CHECK(run_cli("sheaf check " + kExample).code == 2);
  CHECK(run_cli("").code == 2);
  // The diagnostic names the line.
  const std::string cmd = std::string("\"") + KGTOPOS_CLI + "\" matrices " + data("malformed.kg") + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  char buf[256] = {};
  REQUIRE(fgets(buf, sizeof buf, p));
  pclose(p);
  CHECK(std::string(buf).find("line 2") != std::string::npos);
}

TEST_CASE("empty graph") {
  const auto r = run_cli("matrices " + data("empty.kg") + " --adjacency-out");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
}

TEST_CASE("size caps exit 3") {
  CHECK(run_cli("covers " + data("wide_star.kg")).code == 3);
  CHECK(run_cli("covers " + data("wide_star.kg") + " --sieve-cap 14").code == 0);
}

TEST_CASE("line digraph output") {
  auto r = run_cli("line " + kExample);
  CHECK(r.code == 0);
  CHECK(r.out.find("t1 [label=\"A --r1--> B\"];") != std::string::npos);
  r = run_cli("line " + kExample + " --format json");
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["components"] == nlohmann::json::parse(R"([["t1","t2"],["t3","t4"]])"));
}

TEST_CASE("freecat and covers") {
  auto r = run_cli("freecat " + kExample);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["morphism_count"] == 8);
  r = run_cli("freecat " + data("cyclic.kg") + " --max-path-length 2");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["closed"] == false);
  r = run_cli("covers " + kExample);
  CHECK(nlohmann::json::parse(r.out)["covering_sieves"]["B"] == nlohmann::json{{"t1", "t3"}, {"id:B", "t1", "t3"}});
  r = run_cli("covers " + kExample + " --topology atomic");
  CHECK(nlohmann::json::parse(r.out)["covering_sieves"]["B"] == nlohmann::json{{"id:B", "t1", "t3"}});
}

TEST_CASE("sheaf workflows") {
  const auto P = " --presheaf " + data("product_presheaf.json");
  auto r = run_cli("sheaf check " + kExample + P);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["is_sheaf"] == true);

  r = run_cli("sheaf glue " + kExample + P + " --family " + data("family_s1_s3.json"));
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["section"] == "(a1,d0)");

  r = run_cli("sheaf sheafify " + kExample + " --presheaf " + data("undersized_presheaf.json"));
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["section_counts"]["B"] == 2);

  r = run_cli("sheaf omega " + kExample + " --topology atomic");
  CHECK(nlohmann::json::parse(r.out)["section_counts"] == nlohmann::json{{"A", 2}, {"B", 5}, {"C", 5}, {"D", 2}});

  r = run_cli("sheaf global " + kExample + P);
  CHECK(nlohmann::json::parse(r.out)["count"] == 4);

  r = run_cli("sheaf adjoint " + kExample + " --presheaf " + data("undersized_presheaf.json") + " --other " +
              data("product_presheaf.json") + " --section-cap 4");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["bijection"] == true);
}

TEST_CASE("planted defect is reported with a witness") {
  auto r = run_cli("sheaf check " + kExample + " --presheaf " + data("planted_defect_presheaf.json"));
  CHECK(r.code == 1);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["is_sheaf"] == false);
  CHECK(j["counterexample"]["sieve"] == "{t1, t3} on B");
  CHECK(j["counterexample"]["amalgamations"] == 2);

  r = run_cli("verify " + kExample + " --presheaf " + data("planted_defect_presheaf.json"));
  CHECK(r.code == 1);
  j = nlohmann::json::parse(r.out);
  CHECK(j["summary"]["fail"] == 1);
  for (const auto& c : j["checks"])
    if (c["status"] == "fail") {
      CHECK(c["name"] == "sheaves.input_is_sheaf");
      CHECK(c["witness"]["counterexample"]["family"] == nlohmann::json{{"t1", "a0"}, {"t3", "d0"}});
    }
}

TEST_CASE("verify") {
  auto r = run_cli("verify " + kExample);
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["summary"]["skipped"] == 0);
  CHECK(j["seed"] == 42);

  // Cyclic graphs skip the site checks and say why.
  r = run_cli("verify " + data("cyclic.kg"));
  CHECK(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["summary"]["skipped"].get<int>() > 0);
  for (const auto& c : j["checks"])
    if (c["status"] == "skipped") CHECK(c.contains("reason"));

  r = run_cli("verify " + data("wide_star.kg"));
  CHECK(r.code == 0);
  bool size_skip = false;
  j = nlohmann::json::parse(r.out);
  for (const auto& c : j["checks"])
    if (c["name"] == "sites.path_axioms") size_skip = c["status"] == "skipped";
  CHECK(size_skip);

  CHECK(run_cli("verify").code == 2);
}

TEST_CASE("output is reproducible and seeded") {
  const auto a = run_cli("verify --random --cases 20 --seed 7");
  const auto b = run_cli("verify --random --cases 20 --seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["seed"] == 7);
  setenv("KGTOPOS_SEED", "99", 1);
  const auto c = run_cli("verify --random --cases 5");
  unsetenv("KGTOPOS_SEED");
  CHECK(nlohmann::json::parse(c.out)["seed"] == 99);
  const auto t = run_cli("verify " + kExample + " --timings");
  CHECK(nlohmann::json::parse(t.out)["checks"][0].contains("wall_ms"));
}
