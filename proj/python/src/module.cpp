#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rislab/closed_form.hpp"
#include "rislab/energy.hpp"
#include "rislab/monte_carlo.hpp"
#include "rislab/optimizer.hpp"
#include "rislab/phase.hpp"
#include "rislab/rng.hpp"
#include "rislab/scenario_io.hpp"
#include "rislab/topology.hpp"
#include "rislab/units.hpp"

namespace py = pybind11;
using namespace rislab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> to_array(const Grid<double>& g) {
  py::array_t<double> out({g.rows(), g.cols()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) view(r, c) = g(r, c);
  }
  return out;
}

/// A built deployment with its closed-form model, transmit setup and energy coefficients.
class Deployment {
 public:
  explicit Deployment(ScenarioFile file)
      : file_(std::move(file)),
        scenario_(build_scenario(file_.scenario)),
        tx_(file_.scenario.transmit()),
        energy_(file_.energy.model(scenario_.topology)),
        model_(std::make_unique<RateModel>(scenario_.topology, scenario_.stats)) {}

  const Topology& topo() const { return scenario_.topology; }
  const ChannelStats& stats() const { return scenario_.stats; }
  const TransmitConfig& tx() const { return tx_; }
  const EnergyModel& energy() const { return energy_; }
  const RateModel& model() const { return *model_; }
  const ScenarioFile& file() const { return file_; }

  PhaseConfig phases(const Array& a) const {
    const std::size_t n = topo().num_ris();
    const std::size_t nr = topo().elements_per_ris;
    if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != n || static_cast<std::size_t>(a.shape(1)) != nr) {
      throw std::invalid_argument("phases must have shape (" + std::to_string(n) + ", " + std::to_string(nr) + ")");
    }
    return PhaseConfig(n, nr, std::span<const double>(a.data(), n * nr));
  }

  py::array_t<double> to_numpy(const PhaseConfig& p) const {
    py::array_t<double> out({p.num_ris(), p.elements_per_ris()});
    std::copy(p.angles().begin(), p.angles().end(), out.mutable_data());
    return out;
  }

  Objective objective(const std::string& kind) const {
    if (kind == "sum") return sum_rate_objective(*model_, tx_);
    if (kind == "min") return min_rate_objective(*model_, tx_);
    if (kind == "ee") return ee_objective(*model_, tx_, energy_, scenario_.topology);
    throw std::invalid_argument("objective must be one of sum, min, ee");
  }

 private:
  ScenarioFile file_;
  Scenario scenario_;
  TransmitConfig tx_;
  EnergyModel energy_;
  std::unique_ptr<RateModel> model_;
};

py::dict breakdown_dict(const RateBreakdown& r) {
  py::dict d;
  d["e_noise"] = to_array(r.e_noise);
  d["e_signal"] = to_array(r.e_signal);
  d["interference"] = to_array(r.interference);
  d["sinr"] = to_array(r.sinr);
  d["rate"] = to_array(r.rate);
  return d;
}

py::dict mc_moments_dict(const McMoments& m) {
  py::dict d;
  d["e_noise"] = to_array(m.e_noise);
  d["e_signal"] = to_array(m.e_signal);
  d["interference"] = to_array(m.interference);
  d["trials"] = m.trials;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rislab, m) {
  m.doc() = "Uplink rate analysis and phase-shift optimization for RIS-aided cell-free massive MIMO.";

  m.def("dbm_to_watt", &dbm_to_watt, py::arg("dbm"));
  m.def("watt_to_dbm", &watt_to_dbm, py::arg("watt"));
  m.def("baseline_json", [] { return scenario_to_json(ScenarioFile{default_paper_scenario(), {}}); });

  py::class_<Deployment>(m, "Deployment")
      .def(py::init([](const std::string& json) { return Deployment(parse_scenario(json)); }), py::arg("json"))
      .def("to_json", [](const Deployment& d) { return scenario_to_json(d.file()); })
      .def_property_readonly("num_aps", [](const Deployment& d) { return d.topo().num_aps(); })
      .def_property_readonly("num_ris", [](const Deployment& d) { return d.topo().num_ris(); })
      .def_property_readonly("num_users", [](const Deployment& d) { return d.topo().num_users(); })
      .def_property_readonly("antennas_per_ap", [](const Deployment& d) { return d.topo().antennas_per_ap; })
      .def_property_readonly("elements_per_ris", [](const Deployment& d) { return d.topo().elements_per_ris; })
      .def_property_readonly("user_positions",
                             [](const Deployment& d) {
                               py::array_t<double> out({d.topo().num_users(), std::size_t{3}});
                               auto v = out.mutable_unchecked<2>();
                               for (std::size_t k = 0; k < d.topo().num_users(); ++k) {
                                 const Vec3& p = d.topo().user_positions[k];
                                 v(k, 0) = p.x;
                                 v(k, 1) = p.y;
                                 v(k, 2) = p.z;
                               }
                               return out;
                             })
      .def_property_readonly("transmit_power", [](const Deployment& d) { return to_array(d.tx().power); })
      .def_property_readonly("noise_power", [](const Deployment& d) { return d.tx().noise; })
      .def(
          "random_phases",
          [](const Deployment& d, std::uint64_t seed, unsigned bits) {
            Rng rng = make_stream(seed, "phases");
            return d.to_numpy(random_phases(d.topo().num_ris(), d.topo().elements_per_ris, rng, bits));
          },
          py::arg("seed"), py::arg("bits") = 0)
      .def(
          "rate",
          [](const Deployment& d, const Array& phases) {
            const PhaseConfig p = d.phases(phases);
            return breakdown_dict(d.model().evaluate(p, d.tx()));
          },
          py::arg("phases"))
      .def("rate_ris_free", [](const Deployment& d) { return to_array(rate_ris_free(d.stats(), d.topo(), d.tx())); })
      .def("rate_random_phase_asymptotic",
           [](const Deployment& d) { return to_array(rate_random_phase_asymptotic(d.stats(), d.topo(), d.tx())); })
      .def(
          "mc_rate",
          [](const Deployment& d, const Array& phases, std::size_t trials, std::uint64_t seed) {
            const PhaseConfig p = d.phases(phases);
            McRate r;
            {
              py::gil_scoped_release release;
              r = mc_rate(d.topo(), d.stats(), p, d.tx(), trials, seed);
            }
            py::dict out;
            out["rate"] = to_array(r.rate);
            out["std_error"] = to_array(r.std_error);
            return out;
          },
          py::arg("phases"), py::arg("trials") = default_trials, py::arg("seed") = 1)
      .def(
          "mc_moments",
          [](const Deployment& d, const Array& phases, std::size_t trials, std::uint64_t seed) {
            const PhaseConfig p = d.phases(phases);
            McMoments r;
            {
              py::gil_scoped_release release;
              r = mc_moments(d.topo(), d.stats(), p, trials, seed);
            }
            return mc_moments_dict(r);
          },
          py::arg("phases"), py::arg("trials") = default_trials, py::arg("seed") = 1)
      .def(
          "optimize",
          [](const Deployment& d, const std::string& objective, std::size_t max_iters, std::uint64_t seed,
             unsigned bits, std::size_t stall_generations) {
            GAConfig cfg;
            cfg.max_iters = max_iters;
            cfg.seed = seed;
            cfg.phase_bits = bits;
            cfg.stall_generations = stall_generations;
            const Objective f = d.objective(objective);
            GAResult r;
            {
              py::gil_scoped_release release;
              r = ga_optimize(f, d.topo().num_ris(), d.topo().elements_per_ris, cfg);
            }
            std::vector<double> best_trace;
            for (const TracePoint& t : r.trace) best_trace.push_back(t.best_fitness);
            py::dict out;
            out["phases"] = d.to_numpy(r.best);
            out["fitness"] = r.best_fitness;
            out["iterations"] = r.iterations;
            out["converged"] = r.converged;
            out["trace"] = to_array(best_trace);
            return out;
          },
          py::arg("objective") = "sum", py::arg("max_iters") = 10000, py::arg("seed") = 1, py::arg("bits") = 0,
          py::arg("stall_generations") = 50)
      .def(
          "exhaustive",
          [](const Deployment& d, const std::string& objective, unsigned bits, std::size_t cap) {
            const Objective f = d.objective(objective);
            SearchResult r;
            {
              py::gil_scoped_release release;
              r = exhaustive_search(f, d.topo().num_ris(), d.topo().elements_per_ris, bits, cap);
            }
            py::dict out;
            out["phases"] = d.to_numpy(r.best);
            out["fitness"] = r.best_fitness;
            out["evaluated"] = r.evaluated;
            return out;
          },
          py::arg("objective") = "sum", py::arg("bits") = 1, py::arg("cap") = default_search_cap)
      .def(
          "total_power",
          [](const Deployment& d, const Array& rates, bool include_ris) {
            return total_power(d.energy(), d.tx(), std::span<const double>(rates.data(), rates.size()), d.topo(),
                               include_ris);
          },
          py::arg("rates"), py::arg("include_ris") = true)
      .def(
          "energy_efficiency",
          [](const Deployment& d, const Array& rates, bool include_ris) {
            return energy_efficiency(d.energy(), d.tx(), std::span<const double>(rates.data(), rates.size()),
                                     d.topo(), include_ris);
          },
          py::arg("rates"), py::arg("include_ris") = true);
}
