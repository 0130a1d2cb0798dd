#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "statusrank/analysis.hpp"
#include "statusrank/cli.hpp"
#include "statusrank/em.hpp"
#include "statusrank/json_io.hpp"
#include "statusrank/mvr.hpp"
#include "statusrank/network.hpp"
#include "statusrank/random.hpp"
#include "statusrank/rank_model.hpp"

namespace py = pybind11;
using namespace statusrank;

namespace {

DirectedNetwork network_from_edges(const std::vector<std::pair<std::string, std::string>>& edges,
                                   const std::vector<std::string>& extra_nodes) {
  std::ostringstream text;
  for (const auto& [src, dst] : edges) text << src << ' ' << dst << '\n';
  std::istringstream in(text.str());
  DirectedNetwork net = parse_edge_list(in);
  if (extra_nodes.empty()) return net;
  std::vector<std::string> labels = net.labels();
  for (const std::string& l : extra_nodes) {
    if (!net.index_of(l)) labels.push_back(l);
  }
  return DirectedNetwork::from_parts(labels, net.mutual(), net.oneway());
}

std::vector<int> ranks_of(const DirectedNetwork& net, const std::map<std::string, int>& by_label) {
  std::vector<int> ranks(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) {
    const auto it = by_label.find(net.labels()[v]);
    if (it == by_label.end()) throw py::value_error("no rank given for node '" + net.labels()[v] + "'");
    ranks[v] = it->second;
  }
  return ranks;
}

std::map<std::string, int> ranks_by_label(const DirectedNetwork& net, std::span<const int> ranks) {
  std::map<std::string, int> out;
  for (std::size_t v = 0; v < net.size(); ++v) out[net.labels()[v]] = ranks[v];
  return out;
}

py::dict estep_dict(const DirectedNetwork& net, const EStepResult& e) {
  py::dict d;
  d["a"] = e.histograms.a;
  d["b"] = e.histograms.b;
  d["labels"] = net.labels();
  d["mean_rank"] = e.posterior.mean_rank;
  d["std_rank"] = e.posterior.std_rank;
  d["acceptance_rate"] = e.acceptance_rate;
  return d;
}

py::object json_to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Json python_to_json(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Latent status rankings from directed friendship networks";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<JsonFormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<DirectedNetwork>(m, "Network")
      .def(py::init(&network_from_edges), py::arg("edges"), py::arg("nodes") = std::vector<std::string>{},
           "Network from (src, dst) claims; `nodes` adds isolated nodes.")
      .def_static("read", &read_edge_list, py::arg("path"))
      .def("__len__", &DirectedNetwork::size)
      .def_property_readonly("labels", &DirectedNetwork::labels)
      .def_property_readonly("mutual",
                             [](const DirectedNetwork& n) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const MutualPair& p : n.mutual()) out.emplace_back(n.label(p.lo), n.label(p.hi));
                               return out;
                             })
      .def_property_readonly("oneway",
                             [](const DirectedNetwork& n) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const Claim& c : n.oneway()) out.emplace_back(n.label(c.from), n.label(c.to));
                               return out;
                             })
      .def("largest_component",
           [](const DirectedNetwork& n, const std::string& mode) { return largest_component(n, parse_component_mode(mode)); },
           py::arg("mode") = "strong")
      .def("degrees",
           [](const DirectedNetwork& n) {
             const DegreeSummary d = degree_summary(n);
             py::dict out;
             out["in"] = d.in_degree;
             out["out"] = d.out_degree;
             out["total"] = d.total_degree;
             out["mean"] = d.mean_degree;
             return out;
           })
      .def("to_edge_list", [](const DirectedNetwork& n) {
        std::ostringstream os;
        write_edge_list(os, n);
        return os.str();
      });

  m.def(
      "synthetic_params", [](int n) { return json_to_python(to_json(synthetic_params(n))); }, py::arg("n") = 500,
      "Benchmark model parameters as a dict.");

  m.def(
      "generate",
      [](const py::object& params, std::uint64_t seed) {
        const ModelParams p = model_params_from_json(python_to_json(params));
        const RankAssignment truth = random_ranking(static_cast<std::size_t>(p.n), derive_seed(seed, "generate-ranks"));
        DirectedNetwork net = generate_network(truth, p, derive_seed(seed, "generate-edges"));
        auto ranks = ranks_by_label(net, truth.values());
        return py::make_tuple(std::move(net), ranks);
      },
      py::arg("params"), py::arg("seed") = 1, "Sample (network, true ranks by label) from the model.");

  m.def(
      "log_likelihood",
      [](const DirectedNetwork& net, const std::map<std::string, int>& ranks, const py::object& params) {
        return log_likelihood(net, RankAssignment(ranks_of(net, ranks)), model_params_from_json(python_to_json(params)));
      },
      py::arg("network"), py::arg("ranks"), py::arg("params"));

  m.def(
      "count_violations",
      [](const DirectedNetwork& net, const std::map<std::string, int>& ranks) {
        return json_to_python(to_json(count_violations(net, RankAssignment(ranks_of(net, ranks)))));
      },
      py::arg("network"), py::arg("ranks"));

  m.def(
      "minimum_violations_ranking",
      [](const DirectedNetwork& net, std::uint64_t seed, int restarts) {
        AnnealSchedule schedule;
        schedule.restarts = restarts;
        const MvrResult r = minimum_violations_ranking(net, seed, schedule);
        py::dict d = json_to_python(to_json(r.report)).cast<py::dict>();
        d["ranks"] = ranks_by_label(net, r.ranking.values());
        return d;
      },
      py::arg("network"), py::arg("seed") = 1, py::arg("restarts") = 1);

  m.def("randomize_directions", &randomize_directions, py::arg("network"), py::arg("seed") = 1);

  m.def(
      "exact_estep",
      [](const DirectedNetwork& net, const py::object& params) {
        return estep_dict(net, exact_estep(net, model_params_from_json(python_to_json(params))));
      },
      py::arg("network"), py::arg("params"));

  m.def(
      "mcmc_estep",
      [](const DirectedNetwork& net, const py::object& params, int samples, int burn_in, int chains, std::uint64_t seed) {
        McmcConfig cfg;
        cfg.n_samples = samples;
        cfg.burn_in_sweeps = burn_in;
        cfg.n_chains = chains;
        cfg.seed = seed;
        const ModelParams p = model_params_from_json(python_to_json(params));
        EStepResult e;
        {
          py::gil_scoped_release release;
          e = mcmc_estep(net, p, cfg);
        }
        return estep_dict(net, e);
      },
      py::arg("network"), py::arg("params"), py::arg("samples") = 200, py::arg("burn_in") = 200,
      py::arg("chains") = 4, py::arg("seed") = 1);

  m.def(
      "fit",
      [](const DirectedNetwork& net, std::uint64_t seed, int max_iter, double tol, int samples, int chains) {
        EmConfig em;
        em.max_iter = max_iter;
        em.tol = tol;
        em.seed = derive_seed(seed, "em");
        McmcConfig mcmc;
        mcmc.n_samples = samples;
        mcmc.n_chains = chains;
        mcmc.seed = derive_seed(seed, "mcmc");
        FitResult fit;
        {
          py::gil_scoped_release release;
          fit = run_em(net, em, mcmc);
        }
        return json_to_python(to_json(fit));
      },
      py::arg("network"), py::arg("seed") = 1, py::arg("max_iter") = 100, py::arg("tol") = 0.001,
      py::arg("samples") = 200, py::arg("chains") = 4,
      "Run EM; returns the fit in its JSON form.");

  m.def(
      "attribute_summary",
      [](const py::object& fit, const std::string& attributes_csv, int permutations, std::uint64_t seed) {
        const FitResult f = fit_result_from_json(python_to_json(fit));
        std::istringstream in(attributes_csv);
        AttributeOptions options;
        options.permutations = permutations;
        options.seed = seed;
        py::list out;
        for (const AttributeSummary& s : attribute_rank_summary(f, parse_attributes(in), options)) {
          out.append(json_to_python(to_json(s)));
        }
        return out;
      },
      py::arg("fit"), py::arg("attributes_csv"), py::arg("permutations") = 10000, py::arg("seed") = 1);

  m.def(
      "main",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        py::print(out.str(), py::arg("end") = "");
        if (!err.str().empty()) py::print(err.str(), py::arg("end") = "", py::arg("file") = py::module_::import("sys").attr("stderr"));
        return code;
      },
      py::arg("args"), "Run the command-line tool in-process; returns its exit code.");

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
