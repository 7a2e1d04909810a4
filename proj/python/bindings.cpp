#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparse_ergodic/common.hpp"
#include "sparse_ergodic/czd.hpp"
#include "sparse_ergodic/ergosim.hpp"
#include "sparse_ergodic/experiments.hpp"
#include "sparse_ergodic/expsum.hpp"
#include "sparse_ergodic/fit.hpp"
#include "sparse_ergodic/kernels.hpp"
#include "sparse_ergodic/oscfun.hpp"
#include "sparse_ergodic/seq.hpp"

namespace py = pybind11;
namespace se = sparse_ergodic;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw se::DomainError("expected a one-dimensional array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict kernel_dict(const se::kernels::Kernel& k) {
  py::dict d;
  d["offset"] = k.offset;
  d["values"] = to_array(k.values);
  d["N"] = k.N;
  return d;
}

se::kernels::Kernel kernel_from(std::int64_t offset, const Array& values) {
  se::kernels::Kernel k;
  k.offset = offset;
  const auto v = view(values);
  k.values.assign(v.begin(), v.end());
  return k;
}

py::object parse_json(const std::string& s) { return py::module_::import("json").attr("loads")(s); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse ergodic averages: sequences, oscillation functionals, kernels and experiments";
  m.attr("__version__") = se::version();

  py::register_exception<se::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<se::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("set_threads", &se::set_worker_threads, py::arg("n"));

  // sequences
  m.def("floor_power_sequence", [](double c, std::int64_t count) { return se::seq::floor_power_sequence(c, count).terms; },
        py::arg("c"), py::arg("count"));
  m.def("floor_power", &se::seq::floor_power, py::arg("n"), py::arg("c"));
  m.def(
      "bernoulli_indicators",
      [](double alpha, std::int64_t n_max, std::uint64_t seed) {
        const auto ind = se::seq::bernoulli_indicators(alpha, n_max, seed);
        return py::array_t<std::uint8_t>(static_cast<py::ssize_t>(ind.values.size()), ind.values.data());
      },
      py::arg("alpha"), py::arg("n_max"), py::arg("seed"));
  m.def(
      "hitting_times",
      [](double alpha, std::int64_t count, std::int64_t n_max, std::uint64_t seed) {
        return se::seq::hitting_times(se::seq::bernoulli_indicators(alpha, n_max, seed), count).terms;
      },
      py::arg("alpha"), py::arg("count"), py::arg("n_max"), py::arg("seed"));
  m.def("lacunary_grid", [](int R, std::int64_t n_max) { return se::seq::lacunary_grid(R, n_max).times; },
        py::arg("R"), py::arg("n_max"));
  m.def("concentration_envelope", &se::seq::concentration_envelope, py::arg("N"), py::arg("alpha"));

  // oscillation functionals
  m.def("jump_count", [](const Array& a, double eps) { return se::oscfun::jump_count(view(a), eps); }, py::arg("a"),
        py::arg("epsilon"));
  m.def("variation", [](const Array& a, double r) { return se::oscfun::variation(view(a), r); }, py::arg("a"),
        py::arg("r"));
  m.def("diameter", [](const Array& a) { return se::oscfun::diameter(view(a)); }, py::arg("a"));
  m.def(
      "oscillation",
      [](const Array& a, const std::vector<std::size_t>& bps) { return se::oscfun::oscillation(view(a), bps); },
      py::arg("a"), py::arg("breakpoints"));

  // kernels
  m.def("power_average_kernel", [](std::int64_t N, double c) { return kernel_dict(se::kernels::power_average_kernel(N, c)); },
        py::arg("N"), py::arg("c"));
  m.def(
      "correlate",
      [](std::int64_t oa, const Array& a, std::int64_t ob, const Array& b) {
        return kernel_dict(se::kernels::correlate(kernel_from(oa, a), kernel_from(ob, b)));
      },
      py::arg("offset_a"), py::arg("a"), py::arg("offset_b"), py::arg("b"));
  m.def(
      "fourier_sup",
      [](const Array& values, int oversample) { return se::kernels::fourier_sup(kernel_from(0, values), oversample).value; },
      py::arg("values"), py::arg("oversample") = 8);
  m.def(
      "correlation_gap",
      [](std::int64_t N, double c) {
        const auto g = se::kernels::correlation_gap(N, c);
        py::dict d;
        d["gap_main"] = g.gap_main;
        d["gap_small"] = g.gap_small;
        d["at_zero"] = g.at_zero;
        return d;
      },
      py::arg("N"), py::arg("c"));
  m.def(
      "sawtooth_identity_holds",
      [](std::int64_t n, double c) {
        return se::kernels::sawtooth_identity_check(n, c).status == se::kernels::IdentityStatus::holds;
      },
      py::arg("n"), py::arg("c"));

  // exponential sums
  m.def(
      "twofreq_check",
      [](int which, std::int64_t N, double c, const py::kwargs& kw) {
        se::expsum::TwoFreqParams p;
        p.which = which;
        p.N = N;
        p.c = c;
        for (auto item : kw) {
          const auto key = item.first.cast<std::string>();
          if (key == "theta") p.theta = item.second.cast<double>();
          else if (key == "t") p.t = item.second.cast<std::int64_t>();
          else if (key == "h") p.h = item.second.cast<double>();
          else if (key == "u") p.u = item.second.cast<double>();
          else if (key == "h1") p.h1 = item.second.cast<double>();
          else if (key == "h2") p.h2 = item.second.cast<double>();
          else if (key == "u1") p.u1 = item.second.cast<double>();
          else if (key == "u2") p.u2 = item.second.cast<double>();
          else if (key == "x") p.x = item.second.cast<double>();
          else if (key == "N0") p.N0 = item.second.cast<double>();
          else if (key == "H") p.H = item.second.cast<double>();
          else throw se::ConfigError("unknown parameter '" + key + "'");
        }
        const auto r = se::expsum::twofreq_check(p);
        return py::make_tuple(r.direct, r.bound);
      },
      py::arg("case"), py::arg("N"), py::arg("c"));
  m.def(
      "counting_function",
      [](std::int64_t N, double c) { return se::expsum::counting_function(N, c, 0, N).counts; }, py::arg("N"),
      py::arg("c"));

  // Calderon-Zygmund
  m.def(
      "hl_maximal",
      [](std::int64_t offset, const Array& f, std::int64_t lo, std::int64_t hi) {
        se::czd::Signal s;
        s.offset = offset;
        const auto v = view(f);
        s.values.assign(v.begin(), v.end());
        return to_array(se::czd::hl_maximal(s, lo, hi));
      },
      py::arg("offset"), py::arg("f"), py::arg("lo"), py::arg("hi"));
  m.def(
      "cz_split",
      [](const std::vector<std::pair<std::int64_t, double>>& masses, int n, double alpha, double level) {
        return parse_json(se::czd::to_json(se::czd::cz_split(se::czd::Signal::point_masses(masses), n, alpha, level)));
      },
      py::arg("masses"), py::arg("n"), py::arg("alpha"), py::arg("level") = se::czd::kDefaultLevel);

  // ergodic simulation
  m.def(
      "rotation_averages",
      [](std::int64_t m_, std::int64_t a, const Array& f, double c, const std::vector<std::int64_t>& times) {
        if (times.empty()) throw se::DomainError("times must not be empty");
        const auto s = se::seq::floor_power_sequence(c, times.back());
        const auto field = se::ergosim::ergodic_averages(se::ergosim::CyclicRotation{m_, a}, view(f), s, times);
        const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(field.states),
                                             static_cast<py::ssize_t>(times.size())};
        return py::array_t<double>(shape, field.values.data());
      },
      py::arg("m"), py::arg("a"), py::arg("f"), py::arg("c"), py::arg("times"));
  m.def(
      "census",
      [](const Array& field, const std::vector<std::int64_t>& times, double tau) {
        if (field.ndim() != 2 || static_cast<std::size_t>(field.shape(1)) != times.size())
          throw se::DomainError("field must have shape (states, len(times))");
        se::ergosim::SeriesField sf;
        sf.times = times;
        sf.states = field.shape(0);
        sf.values.assign(field.data(), field.data() + field.size());
        return se::ergosim::c_tau_census(sf, tau).K;
      },
      py::arg("field"), py::arg("times"), py::arg("tau"));

  // fitting and experiments
  m.def(
      "fit_slope",
      [](const std::vector<double>& N, const std::vector<double>& v, std::optional<double> claimed) {
        return parse_json(se::fit::to_json(se::fit::fit_slope(N, v, claimed)));
      },
      py::arg("N"), py::arg("values"), py::arg("claimed") = py::none());
  m.def("experiment_names", &se::experiments::experiment_names);
  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto cfg = se::experiments::config_from_json(nlohmann::json::parse(config_json));
        se::experiments::Report r;
        {
          py::gil_scoped_release release;
          r = se::experiments::compute(cfg);
        }
        py::dict d;
        d["summary"] = parse_json(r.summary(se::experiments::resolve(cfg)).dump());
        d["csv"] = r.csv();
        return d;
      },
      py::arg("config_json"));
}
