#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ftmoea/cases.hpp"
#include "ftmoea/dataset.hpp"
#include "ftmoea/galileo.hpp"
#include "ftmoea/metrics.hpp"
#include "ftmoea/moea.hpp"

namespace py = pybind11;
using namespace ftmoea;

namespace {

std::vector<std::vector<std::string>> mcs_as_names(const FaultTree& ft) {
  std::vector<std::vector<std::string>> out;
  for (CutSet cs : ft.minimal_cut_sets())
    out.push_back(cut_set_names(cs, ft.universe()));
  return out;
}

std::vector<std::vector<std::string>> matrix_as_names(const McsMatrix& m) {
  std::vector<std::vector<std::string>> out;
  for (auto row : m.rows) out.push_back(cut_set_names(row, m.be_names));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fault-tree inference from labeled binary failure data";

  py::register_exception<FtError>(m, "FtError");

  py::class_<FaultTree>(m, "FaultTree")
      .def_property_readonly("universe", &FaultTree::universe)
      .def_property_readonly("phi_s", &FaultTree::phi_s)
      .def_property_readonly("disconnected", &FaultTree::disconnected)
      .def("connected_unique_bes",
           [](const FaultTree& ft) {
             auto s = ft.connected_unique_bes();
             return std::vector<std::string>(s.begin(), s.end());
           })
      .def("evaluate", &FaultTree::evaluate, py::arg("assignment"))
      .def("canonical_encoding",
           [](const FaultTree& ft) { return ft.canonical_encoding(); })
      .def("minimal_cut_sets", &mcs_as_names)
      .def("__str__", [](const FaultTree& ft) { return serialize_ft(ft); });

  py::class_<FailureDataset>(m, "FailureDataset")
      .def_property_readonly(
          "be_names", [](const FailureDataset& ds) { return ds.be_names; })
      .def_property_readonly("n_points", &FailureDataset::n_points)
      .def("__len__", [](const FailureDataset& ds) { return ds.rows.size(); })
      .def("is_complete", [](const FailureDataset& ds) {
        return check_complete(ds);
      })
      .def("to_csv", [](const FailureDataset& ds) { return to_csv(ds); });

  py::class_<ObjectiveVector>(m, "ObjectiveVector")
      .def_readonly("phi_s", &ObjectiveVector::phi_s)
      .def_readonly("phi_d", &ObjectiveVector::phi_d)
      .def_readonly("phi_c", &ObjectiveVector::phi_c);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly(
          "best_tree", [](const RunResult& r) { return r.best().ft; })
      .def_property_readonly(
          "best_objectives",
          [](const RunResult& r) { return r.best().objectives; })
      .def_property_readonly(
          "termination",
          [](const RunResult& r) { return termination_name(r.termination); })
      .def_property_readonly("generations", [](const RunResult& r) {
        return r.generations.size();
      });

  m.def("parse_ft", &parse_ft, py::arg("text"));
  m.def("serialize_ft", &serialize_ft, py::arg("tree"));
  m.def("csd_tree", &csd_tree);

  m.def("generate_dataset", &generate_dataset, py::arg("truth"),
        py::arg("n_points"), py::arg("p"), py::arg("seed"));
  m.def("generate_exhaustive", &generate_exhaustive, py::arg("truth"),
        py::arg("max_width") = 24);
  m.def("parse_csv", &parse_csv, py::arg("text"));
  m.def("inject_superfluous", &inject_superfluous, py::arg("dataset"),
        py::arg("rho"), py::arg("seed"), py::arg("cross") = false);

  m.def("extract_mcs_from_data", [](const FailureDataset& ds) {
    return matrix_as_names(extract_mcs_from_data(ds));
  });

  m.def("phi_d", &phi_d, py::arg("tree"), py::arg("dataset"));
  m.def(
      "phi_c",
      [](const FaultTree& ft, const FailureDataset& ds) {
        return phi_c(extract_mcs_from_data(ds),
                     ft_mcs_matrix(ft, ds.be_names));
      },
      py::arg("tree"), py::arg("dataset"));

  m.def(
      "infer",
      [](const FailureDataset& ds, const std::string& mof, std::size_t ps,
         std::size_t ng, std::size_t uc, const std::string& parents,
         std::uint64_t seed) {
        MoeaConfig config;
        config.setup = parse_mof(mof);
        config.ps = ps;
        config.ng = ng;
        config.uc = uc;
        config.seed = seed;
        if (parents == "A")
          config.parent_strategy = ParentStrategy::OrAndPair;
        else if (parents == "B")
          config.parent_strategy = ParentStrategy::Dnf;
        else {
          config.parent_strategy = ParentStrategy::File;
          config.parent_file = parents;
        }
        py::gil_scoped_release release;
        return run(config, ds);
      },
      py::arg("dataset"), py::arg("mof") = "sdc", py::arg("ps") = 400,
      py::arg("ng") = 100, py::arg("uc") = 20, py::arg("parents") = "A",
      py::arg("seed") = 1);
}
