#include "swdisp/cli.hpp"

#include "swdisp/bounds.hpp"
#include "swdisp/error.hpp"
#include "swdisp/spectrum.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace swdisp::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double parse_double(std::string_view s) {
  std::string t(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + t + "'");
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = s.find(sep, start);
    parts.push_back(s.substr(start, at == std::string_view::npos ? at : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

std::vector<std::vector<double>> read_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, where + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw Error(ErrorCode::InvalidArgument, where + " rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw Error(ErrorCode::InvalidArgument, where + " entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void hash_pmf(std::string& acc, const JointPmf& p) {
  acc += std::to_string(p.rows()) + "x" + std::to_string(p.cols()) + ":";
  for (double v : p.flat()) acc += exact(v) + ";";
}

// Metadata shared by every CSV report.
struct Header {
  std::vector<std::pair<std::string, std::string>> lines;
  void add(std::string key, std::string value) { lines.emplace_back(std::move(key), std::move(value)); }
  void write(std::ostream& out, std::string_view command, const std::string& config) const {
    out << "# swdisp " << kVersion << '\n';
    out << "# command: " << command << '\n';
    out << "# config_hash: " << hex(fnv1a(config)) << '\n';
    for (const auto& [k, v] : lines) out << "# " << k << ": " << v << '\n';
  }
};

std::string opt_grid(const std::optional<LinearGrid>& g) {
  if (!g) return "-";
  return exact(g->lo) + ":" + exact(g->hi) + ":" + std::to_string(g->count);
}

std::string opt_num(const std::optional<double>& v) { return v ? exact(*v) : "-"; }

std::string opt_pair(const std::optional<std::pair<double, double>>& p) {
  return p ? exact(p->first) + "," + exact(p->second) : "-";
}

SecondOrderPoint point_in_nats(double L1, double L2, Units u) {
  return {to_nats(L1, u), to_nats(L2, u)};
}

// Grid coordinate standard deviation for a default boundary grid.
double grid_sd(const SourceStats& s, const BoundaryCase& c) {
  auto sd = [&](Coord k) { return std::sqrt(s.sigma(k, k)); };
  if (const auto* k = std::get_if<CornerI>(&c)) return k->which == Corner::Second ? sd(Coord::Cond2) : sd(Coord::Cond1);
  if (std::holds_alternative<NonCornerII>(c)) return sd(Coord::Joint);
  if (const auto* k = std::get_if<FullSideIII>(&c)) return k->which == Side::A ? sd(Coord::Cond2) : sd(Coord::Cond1);
  return 1.0;
}

std::string grid_column(const BoundaryCase& c) {
  if (const auto* k = std::get_if<CornerI>(&c)) return k->which == Corner::Second ? "L2" : "L1";
  if (const auto* k = std::get_if<FullSideIII>(&c)) return k->which == Side::A ? "L2" : "L1";
  return "L1";
}

std::string describe_query(const RegionQuery& q, Units u) {
  return num(from_nats(q.a1, u)) + "," + num(from_nats(q.a2, u));
}

}  // namespace

Units parse_units(std::string_view s) {
  if (s == "bits") return Units::Bits;
  if (s == "nats") return Units::Nats;
  throw Error(ErrorCode::InvalidArgument, "units must be bits or nats");
}

std::string_view to_string(Units u) { return u == Units::Bits ? "bits" : "nats"; }

double to_nats(double v, Units u) { return u == Units::Bits ? bits_to_nats(v) : v; }
double from_nats(double v, Units u) { return u == Units::Bits ? nats_to_bits(v) : v; }

LinearGrid parse_grid(std::string_view s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "grid must be lo:hi:count");
  int count = 0;
  const auto c = parts[2];
  const auto res = std::from_chars(c.data(), c.data() + c.size(), count);
  if (res.ec != std::errc() || res.ptr != c.data() + c.size() || count < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid count must be a positive integer");
  }
  return {parse_double(parts[0]), parse_double(parts[1]), count};
}

std::pair<double, double> parse_pair(std::string_view s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw Error(ErrorCode::InvalidArgument, "expected two comma-separated numbers");
  return {parse_double(parts[0]), parse_double(parts[1])};
}

std::vector<int> parse_int_list(std::string_view s) {
  std::vector<int> out;
  for (auto p : split(s, ',')) {
    int v = 0;
    const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
    if (res.ec != std::errc() || res.ptr != p.data() + p.size()) {
      throw Error(ErrorCode::InvalidArgument, "not an integer: '" + std::string(p) + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const JointPmf& SourceFile::pmf() const {
  if (const auto* p = std::get_if<JointPmf>(&source)) return *p;
  throw Error(ErrorCode::InvalidArgument, "this command needs an i.i.d. source, not a mixture");
}

const MixedSource& SourceFile::mixture() const {
  if (const auto* m = std::get_if<MixedSource>(&source)) return *m;
  throw Error(ErrorCode::InvalidArgument, "this command needs a mixture file");
}

SourceFile parse_source(std::string_view text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "source file must be a JSON object");
  std::string acc;
  if (j.contains("p")) {
    JointPmf pmf = JointPmf::from_rows(read_matrix(j.at("p"), "p"));
    hash_pmf(acc, pmf);
    return {std::move(pmf), fnv1a(acc)};
  }
  if (j.contains("components")) {
    const auto& cs = j.at("components");
    if (!cs.is_array()) throw Error(ErrorCode::InvalidArgument, "components must be an array");
    std::vector<MixedSource::Component> comps;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const auto& c = cs[k];
      const std::string where = "components[" + std::to_string(k) + "]";
      if (!c.is_object() || !c.contains("w") || !c.contains("p") || !c.at("w").is_number()) {
        throw Error(ErrorCode::InvalidArgument, where + " needs numeric \"w\" and matrix \"p\"");
      }
      comps.push_back({c.at("w").get<double>(), JointPmf::from_rows(read_matrix(c.at("p"), where + ".p"))});
      acc += "w=" + exact(comps.back().weight) + ";";
      hash_pmf(acc, comps.back().pmf);
    }
    MixedSource mix = MixedSource::make(std::move(comps));
    return {std::move(mix), fnv1a(acc)};
  }
  throw Error(ErrorCode::InvalidArgument, "source file needs a \"p\" or \"components\" key");
}

SourceFile load_source(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_source(ss.str());
}

RegionQuery resolve_anchor(const SourceStats& stats, std::string_view spec, double epsilon,
                           Units units) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::optional<std::string_view> arg =
      colon == std::string_view::npos ? std::nullopt : std::optional(spec.substr(colon + 1));
  const double default_excess = stats.mutual_info > kDefaultSnapTol ? stats.mutual_info : 0.1;
  auto excess = [&] { return arg ? to_nats(parse_double(*arg), units) : default_excess; };
  if (head == "corner1" && !arg) return anchor_corner1(stats, epsilon);
  if (head == "corner2" && !arg) return anchor_corner2(stats, epsilon);
  if (head == "caseII") {
    if (!arg) throw Error(ErrorCode::InvalidArgument, "caseII needs a lambda, e.g. caseII:0.5");
    if (!(stats.mutual_info > kDefaultSnapTol)) {
      throw Error(ErrorCode::DegenerateSigma, "the diagonal face is a single point for independent pairs");
    }
    return anchor_case2(stats, parse_double(*arg), epsilon);
  }
  if (head == "caseIII-a") return anchor_case3a(stats, excess(), epsilon);
  if (head == "caseIII-b") return anchor_case3b(stats, excess(), epsilon);
  if (spec.find(',') != std::string_view::npos) {
    const auto [a1, a2] = parse_pair(spec);
    return {to_nats(a1, units), to_nats(a2, units), epsilon};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown anchor '" + std::string(spec) + "'");
}

void cmd_analyze(const AnalyzeConfig& cfg, std::ostream& out) {
  const SourceFile src = load_source(cfg.input);
  std::vector<std::pair<double, SourceStats>> parts;
  if (src.is_mixture()) {
    for (const auto& c : src.mixture().components()) parts.emplace_back(c.weight, compute_stats(c.pmf));
  } else {
    parts.emplace_back(1.0, compute_stats(src.pmf()));
  }
  auto shown = [&](const SourceStats& s) { return cfg.units == Units::Bits ? s.to_bits() : s; };

  if (cfg.json) {
    json doc;
    doc["version"] = std::string(kVersion);
    doc["source_hash"] = hex(src.hash);
    doc["units"] = std::string(to_string(cfg.units));
    json comps = json::array();
    for (const auto& [w, raw] : parts) {
      const SourceStats s = shown(raw);
      json sigma = json::array();
      for (int i = 0; i < 3; ++i) sigma.push_back({s.sigma(i, 0), s.sigma(i, 1), s.sigma(i, 2)});
      comps.push_back({{"weight", w},
                       {"H(X1|X2)", s.h1_given_2},
                       {"H(X2|X1)", s.h2_given_1},
                       {"H(X1X2)", s.h12},
                       {"H(X1)", s.h1},
                       {"H(X2)", s.h2},
                       {"I(X1;X2)", s.mutual_info},
                       {"sigma", sigma},
                       {"positive_definite", raw.positive_definite},
                       {"corner1", {s.h1_given_2, s.h2}},
                       {"corner2", {s.h1, s.h2_given_1}}});
    }
    doc["components"] = comps;
    out << doc.dump(2) << '\n';
    return;
  }

  Header h;
  h.add("source_hash", hex(src.hash));
  h.add("units", std::string(to_string(cfg.units)));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (!parts[k].second.positive_definite) {
      h.add("warning", "sigma of component " + std::to_string(k + 1) + " is degenerate (not positive definite)");
    }
  }
  h.write(out, "analyze", "analyze;units=" + std::string(to_string(cfg.units)) + ";src=" + hex(src.hash));
  out << "component,weight,quantity,value\n";
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& [w, raw] = parts[k];
    const SourceStats s = shown(raw);
    const std::string pre = std::to_string(k + 1) + "," + num(w) + ",";
    auto row = [&](const std::string& name, const std::string& v) { out << pre << name << "," << v << '\n'; };
    row("H(X1|X2)", num(s.h1_given_2));
    row("H(X2|X1)", num(s.h2_given_1));
    row("H(X1X2)", num(s.h12));
    row("H(X1)", num(s.h1));
    row("H(X2)", num(s.h2));
    row("I(X1;X2)", num(s.mutual_info));
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) row("sigma" + std::to_string(i + 1) + std::to_string(j + 1), num(s.sigma(i, j)));
    }
    row("positive_definite", raw.positive_definite ? "true" : "false");
    row("min_eigenvalue", num(s.sigma.min_eigenvalue()));
    row("polygon_R1_min", num(s.h1_given_2));
    row("polygon_R2_min", num(s.h2_given_1));
    row("polygon_sum_min", num(s.h12));
  }
}

void cmd_region(const RegionConfig& cfg, std::ostream& out, std::ostream& err) {
  const SourceFile src = load_source(cfg.input);
  const SourceStats stats = compute_stats(src.pmf());
  const RegionQuery q = resolve_anchor(stats, cfg.anchor, cfg.epsilon, cfg.units);
  validate(q);
  const std::string config = "region;units=" + std::string(to_string(cfg.units)) + ";eps=" + exact(cfg.epsilon) +
                             ";anchor=" + cfg.anchor + ";grid=" + opt_grid(cfg.grid) + ";n=" + opt_num(cfg.n) +
                             ";point=" + opt_pair(cfg.point) + ";src=" + hex(src.hash);
  Header h;
  h.add("source_hash", hex(src.hash));
  h.add("units", std::string(to_string(cfg.units)));
  h.add("epsilon", num(cfg.epsilon));

  if (cfg.n) {
    h.add("n", num(*cfg.n));
    h.add("note", "Gaussian approximation of the finite-n boundary, anchor + L/sqrt(n)");
    h.write(out, "region", config);
    out << "case,a1,a2,L1,L2,R1,R2\n";
    for (const auto& p : finite_n_boundary(stats, cfg.epsilon, *cfg.n)) {
      out << describe(p.anchor_case) << ',' << num(from_nats(p.a1, cfg.units)) << ','
          << num(from_nats(p.a2, cfg.units)) << ',' << num(from_nats(p.L1, cfg.units)) << ','
          << num(from_nats(p.L2, cfg.units)) << ',' << num(from_nats(p.R1, cfg.units)) << ','
          << num(from_nats(p.R2, cfg.units)) << '\n';
    }
    return;
  }

  const BoundaryCase c = classify(stats, q);
  h.add("anchor", describe_query(q, cfg.units));
  h.add("case", describe(c));
  if (std::holds_alternative<Exterior>(c) || std::holds_alternative<Interior>(c)) {
    const bool empty = std::holds_alternative<Exterior>(c);
    h.add("verdict", empty ? "empty" : "all-of-plane");
    h.write(out, "region", config);
    err << (empty ? "anchor lies outside the Slepian-Wolf region: the second-order region is empty\n"
                  : "anchor lies inside the Slepian-Wolf region: every (L1, L2) is achievable\n");
    return;
  }
  if (cfg.point) {
    h.write(out, "region", config);
    const SecondOrderPoint pt = point_in_nats(cfg.point->first, cfg.point->second, cfg.units);
    const RegionVerdict v = membership(stats, q, pt);
    out << "L1,L2,probability,verdict\n";
    out << num(cfg.point->first) << ',' << num(cfg.point->second) << ','
        << (v.probability ? num(*v.probability) : "") << ',' << to_string(v.kind) << '\n';
    return;
  }
  LinearGrid grid;
  if (cfg.grid) {
    grid = {to_nats(cfg.grid->lo, cfg.units), to_nats(cfg.grid->hi, cfg.units), cfg.grid->count};
  } else {
    const double sd = grid_sd(stats, c);
    if (const auto* k = std::get_if<CornerI>(&c)) {
      // Corner curves only exist past the asymptote.
      const double a = corner_asymptote(stats, k->which, cfg.epsilon);
      grid = {a + 0.01 * sd, a + 6.0 * sd, 41};
    } else {
      grid = {-3.0 * sd, 3.0 * sd, 41};
    }
  }
  h.add("grid_coordinate", grid_column(c));
  if (const auto* k = std::get_if<CornerI>(&c)) {
    h.add("asymptote", num(from_nats(corner_asymptote(stats, k->which, cfg.epsilon), cfg.units)));
  }
  h.write(out, "region", config);
  out << "L1,L2\n";
  for (const auto& p : boundary_curve(stats, q, grid, InfeasiblePolicy::Skip)) {
    out << num(from_nats(p.L1, cfg.units)) << ',' << num(from_nats(p.L2, cfg.units)) << '\n';
  }
}

void cmd_bounds(const BoundsConfig& cfg, std::ostream& out) {
  const SourceFile src = load_source(cfg.input);
  const JointPmf& pmf = src.pmf();
  const SourceStats stats = compute_stats(pmf);
  const RegionQuery q = resolve_anchor(stats, cfg.anchor, 0.5, cfg.units);
  const BoundaryCase c = classify(stats, q);
  if (std::holds_alternative<Exterior>(c) || std::holds_alternative<Interior>(c)) {
    throw Error(ErrorCode::UnsupportedCase, "bounds need an anchor on the polygon boundary");
  }
  auto nat_grid = [&](const LinearGrid& g) {
    return LinearGrid{to_nats(g.lo, cfg.units), to_nats(g.hi, cfg.units), g.count};
  };
  std::vector<SecondOrderPoint> pts;
  std::string layout;
  if (cfg.grid_l1 || cfg.grid_l2) {
    if (!cfg.grid_l1 || !cfg.grid_l2) throw Error(ErrorCode::InvalidArgument, "give both --grid-l1 and --grid-l2");
    pts = rectangular_grid(nat_grid(*cfg.grid_l1), nat_grid(*cfg.grid_l2));
    layout = "rectangular";
  } else {
    pts = diagonal_sweep(nat_grid(cfg.diagonal.value_or(LinearGrid{0.0, 2.0, 21})));
    layout = "diagonal";
  }
  std::optional<FiniteNBound> finite;
  if (cfg.n) finite = FiniteNBound{&pmf, q, *cfg.n};

  const std::string config = "bounds;units=" + std::string(to_string(cfg.units)) + ";anchor=" + cfg.anchor +
                             ";l1=" + opt_grid(cfg.grid_l1) + ";l2=" + opt_grid(cfg.grid_l2) +
                             ";diag=" + opt_grid(cfg.diagonal) + ";n=" + opt_num(cfg.n) + ";src=" + hex(src.hash);
  Header h;
  h.add("source_hash", hex(src.hash));
  h.add("units", std::string(to_string(cfg.units)));
  h.add("anchor", describe_query(q, cfg.units));
  h.add("case", describe(c));
  h.add("layout", layout);
  h.add("err_koshelev", "large-n closed form; blank where its sign constraint fails");
  if (cfg.n) h.add("err_finite_n", "exact three-term bound at n = " + num(*cfg.n) + ", clamped to [0,1]");
  h.write(out, "bounds", config);
  out << "L1,L2,err_second_order,err_koshelev" << (cfg.n ? ",err_finite_n" : "") << '\n';
  for (const auto& r : comparison_table(stats, c, pts, finite)) {
    out << num(from_nats(r.L1, cfg.units)) << ',' << num(from_nats(r.L2, cfg.units)) << ','
        << num(r.err_second_order) << ',' << (r.err_koshelev ? num(*r.err_koshelev) : "");
    if (cfg.n) out << ',' << num(*r.err_finite_n);
    out << '\n';
  }
}

void cmd_oracle(const OracleConfig& cfg, std::ostream& out) {
  const SourceFile src = load_source(cfg.input);
  const JointPmf& pmf = src.pmf();
  const SourceStats stats = compute_stats(pmf);
  const RegionQuery q = resolve_anchor(stats, cfg.anchor, 0.5, cfg.units);
  const SecondOrderPoint pt = point_in_nats(cfg.L1, cfg.L2, cfg.units);
  std::string nl;
  for (int n : cfg.n_list) nl += std::to_string(n) + ",";
  const std::string config = "oracle;units=" + std::string(to_string(cfg.units)) + ";anchor=" + cfg.anchor +
                             ";L=" + exact(cfg.L1) + "," + exact(cfg.L2) + ";n=" + nl +
                             ";mc=" + std::to_string(cfg.mc_samples) + ";seed=" + std::to_string(cfg.seed) +
                             ";src=" + hex(src.hash);
  const auto rows = convergence_report(pmf, q, pt, cfg.n_list);
  Header h;
  h.add("source_hash", hex(src.hash));
  h.add("units", std::string(to_string(cfg.units)));
  h.add("anchor", describe_query(q, cfg.units));
  h.add("case", describe(classify(stats, q)));
  h.add("point", num(cfg.L1) + "," + num(cfg.L2));
  h.add("seed", std::to_string(cfg.seed));
  h.add("mc_samples", std::to_string(cfg.mc_samples));
  h.write(out, "oracle", config);
  out << "n,exact_Fn,gaussian,gap" << (cfg.mc_samples ? ",mc_Fn,mc_std_error" : "") << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << num(r.exact) << ',' << num(r.gaussian) << ',' << num(r.gap);
    if (cfg.mc_samples) {
      const McEstimate m = mc_Fn(pmf, r.n, q, pt, cfg.mc_samples, cfg.seed);
      out << ',' << num(m.estimate) << ',' << num(m.std_error);
    }
    out << '\n';
  }
}

void cmd_simulate(const SimulateConfig& cfg, std::ostream& out) {
  const SourceFile src = load_source(cfg.input);
  const JointPmf& pmf = src.pmf();
  const std::string config = "simulate;n=" + std::to_string(cfg.n) + ";M1=" + std::to_string(cfg.M1) +
                             ";M2=" + std::to_string(cfg.M2) + ";trials=" + std::to_string(cfg.trials) +
                             ";seed=" + std::to_string(cfg.seed) + ";redraw=" + std::string(to_string(cfg.redraw)) +
                             ";empty=" + std::to_string(static_cast<int>(cfg.empty_policy)) +
                             ";gamma=" + exact(cfg.gamma) + ";src=" + hex(src.hash);
  const TrialReport r =
      ensemble_error(pmf, cfg.n, cfg.M1, cfg.M2, cfg.trials, cfg.redraw, cfg.seed, cfg.empty_policy);
  json doc;
  doc["version"] = std::string(kVersion);
  doc["config_hash"] = hex(fnv1a(config));
  doc["source_hash"] = hex(src.hash);
  doc["n"] = r.n;
  doc["M1"] = r.M1;
  doc["M2"] = r.M2;
  doc["trials"] = r.trials;
  doc["errors"] = r.errors;
  doc["rate"] = r.rate;
  doc["ci95"] = {r.ci_low, r.ci_high};
  doc["ci95_half_width"] = r.ci_half;
  doc["empty_bin_pairs"] = r.empty_bin_pairs;
  doc["seed"] = r.seed;
  doc["redraw"] = std::string(to_string(r.redraw));
  doc["gamma"] = cfg.gamma;
  auto lemma = [&](const LemmaBound& b) {
    return json{{"value", b.value}, {"raw", b.raw}, {"event", b.event}, {"z", b.z}, {"clamped", b.clamped}};
  };
  try {
    doc["lemma1_upper"] = lemma(lemma1_upper(pmf, cfg.n, double(cfg.M1), double(cfg.M2), cfg.gamma));
    doc["lemma2_lower"] = lemma(lemma2_lower(pmf, cfg.n, double(cfg.M1), double(cfg.M2), cfg.gamma));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    doc["lemma1_upper"] = nullptr;
    doc["lemma2_lower"] = nullptr;
  }
  out << doc.dump(2) << '\n';
}

void cmd_mixed(const MixedConfig& cfg, std::ostream& out) {
  const SourceFile src = load_source(cfg.input);
  std::vector<ComponentStats> comps;
  if (src.is_mixture()) {
    comps = mixture_stats(src.mixture());
  } else {
    comps.push_back({1.0, compute_stats(src.pmf())});
  }
  RegionQuery q;
  const auto at = cfg.anchor.find('@');
  if (at != std::string::npos) {
    int k = 0;
    const std::string idx = cfg.anchor.substr(at + 1);
    const auto res = std::from_chars(idx.data(), idx.data() + idx.size(), k);
    if (res.ec != std::errc() || res.ptr != idx.data() + idx.size() || k < 1 ||
        k > static_cast<int>(comps.size())) {
      throw Error(ErrorCode::InvalidArgument, "component index out of range in '" + cfg.anchor + "'");
    }
    q = resolve_anchor(comps[k - 1].stats, cfg.anchor.substr(0, at), cfg.epsilon, cfg.units);
  } else {
    const auto [a1, a2] = parse_pair(cfg.anchor);
    q = {to_nats(a1, cfg.units), to_nats(a2, cfg.units), cfg.epsilon};
  }
  validate(q);

  std::vector<std::pair<double, double>> pts;
  if (cfg.point) {
    pts.push_back(*cfg.point);
  } else {
    const LinearGrid g1 = cfg.grid_l1.value_or(LinearGrid{-2.0, 2.0, 9});
    const LinearGrid g2 = cfg.grid_l2.value_or(LinearGrid{-2.0, 2.0, 9});
    for (double x : g1.values()) {
      for (double y : g2.values()) pts.emplace_back(x, y);
    }
  }
  const RegionVerdict overall = mixed_membership(comps, q, {0.0, 0.0});
  std::string region = "formula";
  if (overall.kind == VerdictKind::AllOfPlane) region = "all-of-plane";
  if (overall.kind == VerdictKind::Empty) region = "empty";

  const std::string config = "mixed;units=" + std::string(to_string(cfg.units)) + ";eps=" + exact(cfg.epsilon) +
                             ";anchor=" + cfg.anchor + ";l1=" + opt_grid(cfg.grid_l1) +
                             ";l2=" + opt_grid(cfg.grid_l2) + ";point=" + opt_pair(cfg.point) +
                             ";src=" + hex(src.hash);
  Header h;
  h.add("source_hash", hex(src.hash));
  h.add("units", std::string(to_string(cfg.units)));
  h.add("epsilon", num(cfg.epsilon));
  h.add("anchor", describe_query(q, cfg.units));
  h.add("components", std::to_string(comps.size()));
  h.add("region", region);
  h.write(out, "mixed", config);
  out << "L1,L2,phi,verdict\n";
  for (const auto& [x, y] : pts) {
    const RegionVerdict v = mixed_membership(comps, q, point_in_nats(x, y, cfg.units));
    out << num(x) << ',' << num(y) << ',' << (v.probability ? num(*v.probability) : "") << ','
        << to_string(v.kind) << '\n';
  }
}

int exit_code(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::BudgetExceeded: return 3;
      case ErrorCode::DegenerateSigma:
      case ErrorCode::DegenerateComponentSigma: return 4;
      default: return 2;
    }
  }
  return 2;
}

}  // namespace swdisp::cli
