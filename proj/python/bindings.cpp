#include "swdisp/bounds.hpp"
#include "swdisp/cli.hpp"
#include "swdisp/error.hpp"
#include "swdisp/region.hpp"
#include "swdisp/simulator.hpp"
#include "swdisp/source_model.hpp"
#include "swdisp/spectrum.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace swdisp;

namespace {

using Rows = std::vector<std::vector<double>>;

py::dict stats_dict(const SourceStats& s) {
  py::dict d;
  d["h1_given_2"] = s.h1_given_2;
  d["h2_given_1"] = s.h2_given_1;
  d["h12"] = s.h12;
  d["h1"] = s.h1;
  d["h2"] = s.h2;
  d["mutual_info"] = s.mutual_info;
  Rows sigma(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sigma[i][j] = s.sigma(i, j);
  d["sigma"] = sigma;
  d["positive_definite"] = s.positive_definite;
  return d;
}

py::tuple verdict(const RegionVerdict& v) {
  return py::make_tuple(std::string(to_string(v.kind)), v.probability ? py::cast(*v.probability) : py::none());
}

MixedSource mixture(const std::vector<std::pair<double, Rows>>& comps) {
  std::vector<MixedSource::Component> out;
  for (const auto& [w, rows] : comps) out.push_back({w, make_joint_pmf(rows)});
  return make_mixed(std::move(out));
}

}  // namespace

PYBIND11_MODULE(_swdisp, m) {
  m.doc() = "Second-order Slepian-Wolf analysis (nats throughout)";
  m.attr("__version__") = std::string(cli::kVersion);

  static py::exception<Error> error(m, "SwdispError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("stats", [](const Rows& p) { return stats_dict(compute_stats(make_joint_pmf(p))); }, py::arg("p"));

  m.def("anchor",
        [](const Rows& p, const std::string& spec, double epsilon) {
          const RegionQuery q = cli::resolve_anchor(compute_stats(make_joint_pmf(p)), spec, epsilon, cli::Units::Nats);
          return py::make_tuple(q.a1, q.a2);
        },
        py::arg("p"), py::arg("spec"), py::arg("epsilon"),
        "Named anchor (corner1, corner2, caseII:<lambda>, caseIII-a[:x], caseIII-b[:x]) as (a1, a2).");

  m.def("classify",
        [](const Rows& p, double a1, double a2, double epsilon) {
          return describe(classify(compute_stats(make_joint_pmf(p)), {a1, a2, epsilon}));
        },
        py::arg("p"), py::arg("a1"), py::arg("a2"), py::arg("epsilon"));

  m.def("membership",
        [](const Rows& p, double a1, double a2, double epsilon, double L1, double L2) {
          return verdict(membership(compute_stats(make_joint_pmf(p)), {a1, a2, epsilon}, {L1, L2}));
        },
        py::arg("p"), py::arg("a1"), py::arg("a2"), py::arg("epsilon"), py::arg("L1"), py::arg("L2"));

  m.def("boundary_curve",
        [](const Rows& p, double a1, double a2, double epsilon, double lo, double hi, int count) {
          std::vector<std::pair<double, double>> out;
          for (const auto& pt : boundary_curve(compute_stats(make_joint_pmf(p)), {a1, a2, epsilon},
                                               {lo, hi, count}, InfeasiblePolicy::Skip)) {
            out.emplace_back(pt.L1, pt.L2);
          }
          return out;
        },
        py::arg("p"), py::arg("a1"), py::arg("a2"), py::arg("epsilon"), py::arg("lo"), py::arg("hi"),
        py::arg("count"));

  m.def("koshelev_bound",
        [](const Rows& p, double R1, double R2, double n) {
          const KoshelevBound b = koshelev_bound(make_joint_pmf(p), R1, R2, n);
          py::dict d;
          d["value"] = b.value;
          d["raw"] = b.raw;
          d["clamped"] = b.clamped;
          d["s"] = b.s;
          d["exponent"] = b.exponent;
          return d;
        },
        py::arg("p"), py::arg("R1"), py::arg("R2"), py::arg("n"));

  m.def("exact_Fn",
        [](const Rows& p, int n, double a1, double a2, double L1, double L2) {
          return exact_Fn(make_joint_pmf(p), n, {a1, a2, 0.0}, {L1, L2});
        },
        py::arg("p"), py::arg("n"), py::arg("a1"), py::arg("a2"), py::arg("L1"), py::arg("L2"));

  m.def("mc_Fn",
        [](const Rows& p, int n, double a1, double a2, double L1, double L2, std::uint64_t samples,
           std::uint64_t seed) {
          const McEstimate e = mc_Fn(make_joint_pmf(p), n, {a1, a2, 0.0}, {L1, L2}, samples, seed);
          return py::make_tuple(e.estimate, e.std_error);
        },
        py::arg("p"), py::arg("n"), py::arg("a1"), py::arg("a2"), py::arg("L1"), py::arg("L2"),
        py::arg("samples"), py::arg("seed") = 1);

  auto lemma = [](const LemmaBound& b) {
    py::dict d;
    d["value"] = b.value;
    d["raw"] = b.raw;
    d["event"] = b.event;
    d["z"] = b.z;
    d["clamped"] = b.clamped;
    return d;
  };
  m.def("lemma1_upper",
        [lemma](const Rows& p, int n, double M1, double M2, double gamma) {
          return lemma(lemma1_upper(make_joint_pmf(p), n, M1, M2, gamma));
        },
        py::arg("p"), py::arg("n"), py::arg("M1"), py::arg("M2"), py::arg("gamma") = kDefaultGamma);
  m.def("lemma2_lower",
        [lemma](const Rows& p, int n, double M1, double M2, double gamma) {
          return lemma(lemma2_lower(make_joint_pmf(p), n, M1, M2, gamma));
        },
        py::arg("p"), py::arg("n"), py::arg("M1"), py::arg("M2"), py::arg("gamma") = kDefaultGamma);

  m.def("ensemble_error",
        [](const Rows& p, int n, std::uint64_t M1, std::uint64_t M2, std::uint64_t trials, std::uint64_t seed,
           bool fixed_code) {
          const TrialReport r = ensemble_error(make_joint_pmf(p), n, M1, M2, trials,
                                               fixed_code ? CodeRedraw::Fixed : CodeRedraw::PerTrial, seed);
          py::dict d;
          d["errors"] = r.errors;
          d["trials"] = r.trials;
          d["rate"] = r.rate;
          d["ci"] = py::make_tuple(r.ci_low, r.ci_high);
          return d;
        },
        py::arg("p"), py::arg("n"), py::arg("M1"), py::arg("M2"), py::arg("trials"), py::arg("seed") = 1,
        py::arg("fixed_code") = false);

  m.def("mixed_membership",
        [](const std::vector<std::pair<double, Rows>>& comps, double a1, double a2, double epsilon, double L1,
           double L2) { return verdict(mixed_membership(mixture(comps), {a1, a2, epsilon}, {L1, L2})); },
        py::arg("components"), py::arg("a1"), py::arg("a2"), py::arg("epsilon"), py::arg("L1"), py::arg("L2"),
        "components: list of (weight, pmf rows).");
}
