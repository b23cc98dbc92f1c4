#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wbsense/edgedet.hpp"
#include "wbsense/ged.hpp"
#include "wbsense/harness.hpp"
#include "wbsense/mathkit.hpp"
#include "wbsense/optimizer.hpp"
#include "wbsense/refdet.hpp"
#include "wbsense/spectral.hpp"

namespace py = pybind11;
using namespace wbsense;

namespace {

mathkit::Probability prob(double p) { return mathkit::Probability(p); }

edgedet::EdgeMeanConvention convention_from(const std::string& name) {
  if (name == "unit-variance") return edgedet::EdgeMeanConvention::kUnitVariance;
  if (name == "published") return edgedet::EdgeMeanConvention::kPublished;
  throw py::value_error("convention must be 'unit-variance' or 'published'");
}

py::dict table_dict(const harness::Table& t) {
  py::dict d;
  d["columns"] = t.columns;
  d["rows"] = t.rows;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wideband spectrum sensing: edge detection, reference isolation, GED and throughput optimization.";

  py::register_exception<mathkit::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<harness::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("erfc_inv", &mathkit::erfc_inv, py::arg("y"));
  m.def("chi2_quantile", [](double p, double dof) { return mathkit::chi2_quantile(prob(p), dof); },
        py::arg("p_tail"), py::arg("dof"));
  m.def("marcum_q", [](double order, double a, double b) { return mathkit::marcum_q(order, a, b).value(); },
        py::arg("order"), py::arg("a"), py::arg("b"));

  m.def("centered_psd",
        [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> x) {
          const auto in = x.unchecked<1>();
          const auto out = spectral::centered_psd(std::span(in.data(0), static_cast<std::size_t>(in.shape(0))));
          return py::array_t<double>(static_cast<py::ssize_t>(out.size()), out.data());
        },
        py::arg("time_samples"), "Unitary |DFT|^2, ordered from -B/2 to B/2.");

  m.def("tw_min",
        [](double bandwidth_hz, double quality, double snr) {
          return refdet::tw_min(bandwidth_hz, {prob(quality), snr});
        },
        py::arg("bandwidth_hz"), py::arg("quality"), py::arg("snr"));
  m.def("required_tw",
        [](double bandwidth_hz, const std::vector<double>& edges_hz, double quality, double snr) {
          return refdet::required_tw({bandwidth_hz, edges_hz}, {prob(quality), snr});
        },
        py::arg("bandwidth_hz"), py::arg("edges_hz"), py::arg("quality"), py::arg("snr"));

  m.def("ged_statistic",
        [](double target_energy, std::size_t target_bins, double reference_energy, std::size_t reference_bins) {
          const spectral::BandEnergy t{{0, target_bins}, target_energy, target_bins};
          const spectral::BandEnergy r{{0, reference_bins}, reference_energy, reference_bins};
          return ged::ged_statistic(t, r).statistic;
        },
        py::arg("target_energy"), py::arg("target_bins"), py::arg("reference_energy"), py::arg("reference_bins"));
  m.def("ged_pf", [](double lambda) { return ged::ged_pf(lambda).value(); }, py::arg("lam"));
  m.def("ged_pd", [](double lambda, double snr, double n_dk, double beta) { return ged::ged_pd(lambda, snr, n_dk, beta).value(); },
        py::arg("lam"), py::arg("snr"), py::arg("n_dk"), py::arg("beta"));
  m.def("threshold_for_target_pf", [](double p) { return ged::threshold_for_target_pf(prob(p)); }, py::arg("target_pf"));
  m.def("threshold_for_target_pd",
        [](double p, double snr, double t, double band_hz, double beta) {
          return ged::threshold_for_target_pd(prob(p), snr, t, band_hz, beta);
        },
        py::arg("target_pd"), py::arg("snr"), py::arg("sense_time_s"), py::arg("band_hz"), py::arg("beta"));

  m.def("edge_frame_count",
        [](double b_min_hz, std::size_t s_max, double sense_duration_s, double snr, double target_pf, double target_pd,
           const std::string& convention) {
          edgedet::EdgeScanConfig c;
          c.b_min_hz = b_min_hz;
          c.s_max = s_max;
          c.frame_sense_duration_s = sense_duration_s;
          c.design_snr = snr;
          c.target_pf = prob(target_pf);
          c.target_pd = prob(target_pd);
          c.convention = convention_from(convention);
          const auto s = edgedet::solve_frame_count(c);
          py::dict d;
          d["frames"] = s.frames;
          d["lambda"] = s.lambda;
          d["n_eh"] = s.n_eh;
          d["pd"] = s.pd.value();
          return d;
        },
        py::arg("b_min_hz"), py::arg("s_max"), py::arg("sense_duration_s"), py::arg("snr"), py::arg("target_pf") = 0.001,
        py::arg("target_pd") = 0.999, py::arg("convention") = "unit-variance");

  py::class_<harness::ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("from_ini", &harness::parse_config, py::arg("text"))
      .def_static("load", [](const std::string& path) { return harness::load_config(path); }, py::arg("path"))
      .def("set", [](harness::ExperimentConfig& c, const std::string& key, const std::string& value) {
             harness::apply_setting(c, key, value);
             return &c;
           },
           py::arg("key"), py::arg("value"), py::return_value_policy::reference_internal,
           "Apply one section.key = value assignment, as in a config file.")
      .def_readwrite("trials", &harness::ExperimentConfig::trials)
      .def_readwrite("seed", &harness::ExperimentConfig::seed)
      .def_readwrite("threads", &harness::ExperimentConfig::threads);

  py::class_<harness::CampaignResult>(m, "CampaignResult")
      .def_readonly("experiment", &harness::CampaignResult::experiment)
      .def_property_readonly("tables",
                             [](const harness::CampaignResult& r) {
                               py::dict d;
                               for (const auto& t : r.tables) d[py::str(t.name)] = table_dict(t);
                               return d;
                             })
      .def_property_readonly("summary",
                             [](const harness::CampaignResult& r) {
                               py::dict d;
                               for (const auto& [k, v] : r.summary) d[py::str(k)] = v;
                               return d;
                             })
      .def_property_readonly("checks",
                             [](const harness::CampaignResult& r) {
                               py::list l;
                               for (const auto& c : r.checks) l.append(py::make_tuple(c.name, c.passed, c.detail));
                               return l;
                             })
      .def("all_passed", &harness::CampaignResult::all_passed)
      .def("write", [](const harness::CampaignResult& r, const harness::ExperimentConfig& c, const std::string& dir,
                       bool gnuplot) { harness::write_outputs(r, c, dir, gnuplot); },
           py::arg("config"), py::arg("directory"), py::arg("gnuplot") = false);

  m.def("experiment_ids", &harness::experiment_ids);
  m.def("run_experiment", &harness::run_experiment, py::arg("experiment"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  m.def("optimal_sensing_time",
        [](const harness::ExperimentConfig& config, bool perfect_noise) {
          DetectorConfig det = config.detector;
          det.total_bandwidth_hz = config.scenario.total_bandwidth_hz;
          det.validate();
          const auto layout = edgedet::SubBandLayout::equal_bands(det.total_bandwidth_hz, det.s_max);
          const auto params = optimizer::build_params(
              layout, 0, det, optimizer::uniform_priors(layout, det.prior_h0),
              perfect_noise ? optimizer::NoiseKnowledge::kPerfect : optimizer::NoiseKnowledge::kEstimated);
          const double floor = refdet::tw_min(det.total_bandwidth_hz, {det.reference_quality, det.reference_snr});
          const auto opt = optimizer::optimal_sensing_time(params, floor);
          py::dict d;
          d["t_o_s"] = opt.t_o_s;
          d["at_boundary"] = opt.at_boundary;
          d["throughput"] = optimizer::throughput(opt.t_o_s, params);
          return d;
        },
        py::arg("config") = harness::ExperimentConfig{}, py::arg("perfect_noise") = false,
        "Optimal sensing time on s_max equal sub-bands with sub-band 1 as the reference.");
}
