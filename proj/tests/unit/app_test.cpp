#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "app/builtin_models.hpp"
#include "app/commands.hpp"
#include "app/report.hpp"
#include "ctmcfit/errors.hpp"

using namespace ctmcfit;
using namespace ctmcfit::app;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("bundled models equal the files under models/") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const auto path = std::filesystem::path(CTMCFIT_SOURCE_DIR) / "models" / (name + ".prism");
    CHECK(std::string(*builtin_model(name)) == read_file(path));
  }
  CHECK_FALSE(builtin_model("missing"));
}

TEST_CASE("population substitution") {
  CHECK(sir_source(SirPopulation{}, false) == std::string(*builtin_model("sir")));
  CHECK(sir_source(SirPopulation{}, true) == std::string(*builtin_model("sir_modular")));
  const auto p = SirPopulation::scaled(0.01);
  CHECK(p.size == 1000);
  CHECK(p.susceptible == 936);
  const auto text = sir_source(p);
  CHECK(text.find("const int SIZE = 1000;") != std::string::npos);
  CHECK(text.find("init 936;") != std::string::npos);
  CHECK_THROWS_AS(SirPopulation::scaled(0.0), ConfigError);
  CHECK_THROWS_AS(SirPopulation::scaled(2.0), ConfigError);
}

TEST_CASE("hash and summary statistics") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(mean({1.0, 2.0, 6.0}) == 3.0);
  CHECK(monotone_trace({-10.0, -5.0, -5.0, -4.0}));
  CHECK_FALSE(monotone_trace({-10.0, -5.0, -6.0}));
}

TEST_CASE("relative errors") {
  const ParamSpace p({"a", "b"});
  const auto m = relative_errors(p, Valuation{1.1, 1.5}, {{"a", 1.0}, {"b", 2.0}}, {"a", "b"});
  CHECK(m.delta[0] == doctest::Approx(0.1));
  CHECK(m.delta[1] == doctest::Approx(0.25));
  CHECK(m.l1 == doctest::Approx(0.35));
  CHECK(m.linf == doctest::Approx(0.25));
  CHECK_THROWS_AS(relative_errors(p, Valuation{1, 1}, {{"a", 0.0}}, {"a"}), ConfigError);
  CHECK_THROWS_AS(relative_errors(p, Valuation{1, 1}, {}, {"a"}), ConfigError);
}

TEST_CASE("build command reports parameters and fixed values") {
  ModelSpec spec{"builtin:sir", {{"plock", 1.0}}, {}, {"i"}};
  const auto j = cmd_build(spec, false);
  CHECK(j["parameters"] == Json::array({"beta", "gamma", "plock"}));
  CHECK(j["free_parameters"] == Json::array({"beta", "gamma"}));
  CHECK(j["fixed_parameters"]["plock"] == 1.0);

  ModelSpec tandem{"builtin:tandem", {{"c", 4}}, {"mu1a", "mu1b", "mu2", "kappa"}, {"sc", "ph"}};
  const auto t = cmd_build(tandem);
  CHECK(t["states"] == 45);
  CHECK(t["transitions"] == 123);
}

TEST_CASE("simulate then fit through the command layer") {
  const auto dir = std::filesystem::temp_directory_path() / "ctmcfit_app_test";
  std::filesystem::create_directories(dir);
  const auto data = (dir / "tandem.jsonl").string();
  SimulateOptions sim;
  sim.model = {"builtin:tandem", {{"c", 2}}, {"mu1a", "mu1b", "mu2", "kappa"}, {"sc", "ph"}};
  sim.sequences = 20;
  sim.length = 15;
  sim.seed = 4;
  sim.output = data;
  const auto s1 = cmd_simulate(sim);
  const auto first = read_file(data);
  const auto s2 = cmd_simulate(sim);
  CHECK(read_file(data) == first);
  CHECK(s1["dataset_hash"] == s2["dataset_hash"]);

  FitOptions fit;
  fit.model = sim.model;
  fit.dataset = data;
  fit.fix = {{"kappa", 4.0}};
  fit.restarts = 2;
  fit.seed = 1;
  fit.truth_from_model = true;
  const auto r = cmd_fit(fit);
  CHECK(r["config"]["free_parameters"] == Json::array({"mu1a", "mu1b", "mu2"}));
  CHECK(r["restarts"].size() == 2);
  CHECK_FALSE(r["restarts"][0]["result"].contains("wall_time_s"));
  CHECK(r["restarts"][0]["result"]["estimate"]["kappa"] == 4.0);
  fit.fix = {{"nothing", 1.0}};
  CHECK_THROWS_AS(cmd_fit(fit), Error);
  std::filesystem::remove_all(dir);
}
