#pragma once

// Command implementations behind the swdisp executable. Each command writes
// its report to `out` and throws swdisp::Error (or a JSON parse error) on
// failure; exit_code() maps the failure to the process status.

#include "swdisp/region.hpp"
#include "swdisp/simulator.hpp"
#include "swdisp/source_model.hpp"

#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace swdisp::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Units { Bits, Nats };

Units parse_units(std::string_view s);
std::string_view to_string(Units u);
double to_nats(double v, Units u);
double from_nats(double v, Units u);

// "lo:hi:count"
LinearGrid parse_grid(std::string_view s);
// "x,y"
std::pair<double, double> parse_pair(std::string_view s);
// "100,400,1600"
std::vector<int> parse_int_list(std::string_view s);

std::uint64_t fnv1a(std::string_view bytes);

// {"p": [[...], ...]} for an i.i.d. pair, or
// {"components": [{"w": ..., "p": [[...]]}, ...]} for a mixture.
struct SourceFile {
  std::variant<JointPmf, MixedSource> source;
  std::uint64_t hash;

  bool is_mixture() const { return std::holds_alternative<MixedSource>(source); }
  const JointPmf& pmf() const;  // throws InvalidArgument for a mixture
  const MixedSource& mixture() const;
};

SourceFile parse_source(std::string_view json_text);
SourceFile load_source(const std::string& path);

// corner1 | corner2 | caseII:<lambda> | caseIII-a[:<excess>] | caseIII-b[:<excess>]
// or an explicit "a1,a2" in the given units. Ray excess defaults to I(X1;X2)
// (or 0.1 nats for independent pairs).
RegionQuery resolve_anchor(const SourceStats& stats, std::string_view spec, double epsilon,
                           Units units);

struct AnalyzeConfig {
  std::string input;
  Units units = Units::Bits;
  bool json = false;
};

struct RegionConfig {
  std::string input;
  Units units = Units::Bits;
  double epsilon = 0.1;
  std::string anchor = "corner1";
  std::optional<LinearGrid> grid;
  std::optional<double> n;  // finite-n boundary in (R1, R2)
  std::optional<std::pair<double, double>> point;
};

struct BoundsConfig {
  std::string input;
  Units units = Units::Bits;
  std::string anchor = "corner1";
  std::optional<LinearGrid> grid_l1;
  std::optional<LinearGrid> grid_l2;
  std::optional<LinearGrid> diagonal;
  std::optional<double> n;  // adds the exact finite-n bound column
};

struct OracleConfig {
  std::string input;
  Units units = Units::Bits;
  std::string anchor = "corner1";
  double L1 = 1.0;
  double L2 = 1.0;
  std::vector<int> n_list{100, 400, 1600};
  std::uint64_t mc_samples = 0;
  std::uint64_t seed = 1;
};

struct SimulateConfig {
  std::string input;
  int n = 8;
  std::uint64_t M1 = 128;
  std::uint64_t M2 = 128;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  CodeRedraw redraw = CodeRedraw::PerTrial;
  EmptyBinPolicy empty_policy = EmptyBinPolicy::FirstPair;
  double gamma = 0.5;
};

struct MixedConfig {
  std::string input;
  Units units = Units::Bits;
  double epsilon = 0.1;
  // Explicit "a1,a2", or a symbolic anchor of one component as "corner1@2"
  // (components counted from 1).
  std::string anchor = "corner1@1";
  std::optional<LinearGrid> grid_l1;
  std::optional<LinearGrid> grid_l2;
  std::optional<std::pair<double, double>> point;
};

void cmd_analyze(const AnalyzeConfig& cfg, std::ostream& out);
void cmd_region(const RegionConfig& cfg, std::ostream& out, std::ostream& err);
void cmd_bounds(const BoundsConfig& cfg, std::ostream& out);
void cmd_oracle(const OracleConfig& cfg, std::ostream& out);
void cmd_simulate(const SimulateConfig& cfg, std::ostream& out);
void cmd_mixed(const MixedConfig& cfg, std::ostream& out);

// 0 success, 2 input error, 3 budget error, 4 degenerate source.
int exit_code(const std::exception& e);

}  // namespace swdisp::cli
