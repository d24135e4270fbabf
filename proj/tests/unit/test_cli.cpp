#include "swdisp/cli.hpp"
#include "swdisp/error.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>
#include <string>

using namespace swdisp;
using namespace swdisp::cli;

namespace {

std::string data(const std::string& name) { return std::string(SWDISP_DATA_DIR) + "/" + name; }

std::string region_csv(const RegionConfig& cfg) {
  std::ostringstream out, err;
  cmd_region(cfg, out, err);
  return out.str();
}

// Last comma-separated field on the last line.
std::string last_field(const std::string& text) {
  std::string line = text.substr(0, text.size() - 1);
  line = line.substr(line.rfind('\n') + 1);
  return line.substr(line.rfind(',') + 1);
}

int code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return exit_code(e);
  }
  return 0;
}

}  // namespace

TEST_CASE("argument parsers") {
  CHECK(parse_units("bits") == Units::Bits);
  CHECK(parse_units("nats") == Units::Nats);
  CHECK_THROWS_AS(parse_units("bans"), Error);
  const LinearGrid g = parse_grid("-1:2:4");
  CHECK(g.values() == std::vector<double>{-1.0, 0.0, 1.0, 2.0});
  CHECK_THROWS_AS(parse_grid("1:2"), Error);
  CHECK_THROWS_AS(parse_grid("1:2:0"), Error);
  CHECK(parse_pair("0.5,-1") == std::pair<double, double>{0.5, -1.0});
  CHECK_THROWS_AS(parse_pair("0.5"), Error);
  CHECK(parse_int_list("100,400") == std::vector<int>{100, 400});
  CHECK(to_nats(1.0, Units::Bits) == doctest::Approx(std::log(2.0)));
  CHECK(from_nats(to_nats(3.0, Units::Bits), Units::Bits) == doctest::Approx(3.0));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("source files") {
  const SourceFile t = load_source(data("reference.json"));
  CHECK_FALSE(t.is_mixture());
  CHECK(t.pmf() == reference_source());
  const SourceFile m = load_source(data("mixture_w1_above.json"));
  CHECK(m.is_mixture());
  CHECK(m.mixture().size() == 2);
  CHECK_THROWS_AS(m.pmf(), Error);
  CHECK(code_of([] { parse_source(R"({"p": [[0.5, 0.5], [0.1, 0.1]]})"); }) == 2);
  CHECK(code_of([] { parse_source("{not json"); }) == 2);
  CHECK(code_of([] { parse_source(R"({"q": 1})"); }) == 2);
  CHECK(code_of([] { load_source("/nonexistent/source.json"); }) == 2);
  CHECK(parse_source(R"({"p": [[0.5, 0.25], [0.15, 0.1]]})").hash ==
        parse_source(R"({"p":[[0.5,0.25],[0.15,0.1]]})").hash);
}

TEST_CASE("anchors") {
  const SourceStats s = compute_stats(reference_source());
  const RegionQuery c1 = resolve_anchor(s, "corner1", 0.1, Units::Bits);
  CHECK(c1.a1 == s.h1_given_2);
  CHECK(c1.a2 == s.h2);
  CHECK(resolve_anchor(s, "corner2", 0.1, Units::Bits).a1 == s.h1);
  CHECK(resolve_anchor(s, "caseII:0.25", 0.1, Units::Bits).a1 == doctest::Approx(anchor_case2(s, 0.25, 0.1).a1));
  CHECK(resolve_anchor(s, "caseIII-a", 0.1, Units::Bits).a2 == doctest::Approx(s.h2 + s.mutual_info));
  CHECK(resolve_anchor(s, "caseIII-b:1", 0.1, Units::Bits).a1 == doctest::Approx(s.h1 + std::log(2.0)));
  const RegionQuery e = resolve_anchor(s, "1,2", 0.1, Units::Bits);
  CHECK(e.a1 == doctest::Approx(std::log(2.0)));
  CHECK(e.a2 == doctest::Approx(2 * std::log(2.0)));
  CHECK(code_of([&] { resolve_anchor(s, "corner3", 0.1, Units::Bits); }) == 2);
  CHECK(code_of([&] { resolve_anchor(s, "caseII:1.5", 0.1, Units::Bits); }) == 2);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(Error(ErrorCode::SumNotOne, "")) == 2);
  CHECK(exit_code(Error(ErrorCode::OutOfRange, "")) == 2);
  CHECK(exit_code(Error(ErrorCode::BudgetExceeded, "")) == 3);
  CHECK(exit_code(Error(ErrorCode::DegenerateSigma, "")) == 4);
  CHECK(exit_code(Error(ErrorCode::DegenerateComponentSigma, "")) == 4);
  RegionConfig deg;
  deg.input = data("uniform.json");
  deg.point = std::pair{1.0, 1.0};
  CHECK(code_of([&] { region_csv(deg); }) == 4);
  SimulateConfig big;
  big.input = data("reference.json");
  big.n = 11;
  std::ostringstream sink;
  CHECK(code_of([&] { cmd_simulate(big, sink); }) == 3);
}

TEST_CASE("outputs are byte-identical across runs") {
  RegionConfig cfg;
  cfg.input = data("reference.json");
  cfg.grid = parse_grid("1:3:9");
  CHECK(region_csv(cfg) == region_csv(cfg));
  SimulateConfig sim;
  sim.input = data("reference.json");
  sim.n = 6;
  sim.M1 = sim.M2 = 16;
  sim.trials = 500;
  std::ostringstream a, b;
  cmd_simulate(sim, a);
  cmd_simulate(sim, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("\"trials\"") != std::string::npos);
  std::ostringstream h;
  cmd_analyze({data("reference.json"), Units::Bits, false}, h);
  CHECK(h.str().rfind("# swdisp 0.1.0\n", 0) == 0);
  CHECK(h.str().find("# config_hash: ") != std::string::npos);
}

TEST_CASE("verdicts do not depend on the display units") {
  RegionConfig bits;
  bits.input = data("reference.json");
  bits.point = std::pair{1.0, 1.0};
  RegionConfig nats = bits;
  nats.units = Units::Nats;
  nats.point = std::pair{std::log(2.0), std::log(2.0)};
  CHECK(last_field(region_csv(bits)) == last_field(region_csv(nats)));
  for (double l : {0.2, 0.6, 1.4}) {
    bits.point = std::pair{l, l};
    nats.point = std::pair{l * std::log(2.0), l * std::log(2.0)};
    CHECK(last_field(region_csv(bits)) == last_field(region_csv(nats)));
  }
}

TEST_CASE("mixed command follows the branches") {
  MixedConfig cfg;
  cfg.input = data("mixture_w1_below.json");
  cfg.epsilon = 0.2;
  cfg.point = std::pair{0.5, 0.5};
  std::ostringstream out;
  cmd_mixed(cfg, out);
  CHECK(last_field(out.str()) == "all-of-plane");
  cfg.input = data("mixture_w1_above.json");
  cfg.anchor = "corner1@2";
  std::ostringstream out2;
  cmd_mixed(cfg, out2);
  CHECK(last_field(out2.str()) == "empty");
}
