// Python bindings for the core operations: graph ingestion and generation,
// walk censuses with their brute-force oracles, the four aggregation-scheme
// forward passes, and the verification/analysis entry points. Reports cross
// the boundary as plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "walkgnn/analysis.hpp"
#include "walkgnn/graph.hpp"
#include "walkgnn/lipschitz.hpp"
#include "walkgnn/model.hpp"
#include "walkgnn/walks.hpp"

namespace py = pybind11;
using namespace walkgnn;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list list;
      for (const auto& item : j) list.append(json_to_py(item));
      return list;
    }
    case nlohmann::json::value_t::object: {
      py::dict dict;
      for (const auto& [key, value] : j.items()) dict[py::str(key)] = json_to_py(value);
      return dict;
    }
    default: return py::none();
  }
}

std::vector<std::vector<double>> matrix_to_rows(const DenseMatrix& m) {
  std::vector<std::vector<double>> rows(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
  return rows;
}

DenseMatrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  DenseMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) throw DimensionError("ragged matrix rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

ModelSpec make_spec(const std::string& variant, std::size_t depth, std::size_t width,
                    double epsilon, const std::string& bias, std::size_t mlp_layers,
                    const std::string& gat_isolated) {
  ModelSpec spec = ModelSpec::uniform(variant_from_string(variant), depth, width);
  if (variant == "gin0" && epsilon != 0.0)
    throw UsageError("gin0 fixes epsilon = 0; use variant=\"gin\"");
  spec.epsilon = spec.variant == Variant::GIN ? epsilon : 0.0;
  if (bias == "zero") spec.bias_mode = BiasMode::Zero;
  else if (bias == "random-small") spec.bias_mode = BiasMode::RandomSmall;
  else throw UsageError("bias must be \"zero\" or \"random-small\"");
  spec.mlp_layers = mlp_layers;
  if (gat_isolated == "error") spec.gat_isolated = IsolatedPolicy::Error;
  else if (gat_isolated == "zero-row") spec.gat_isolated = IsolatedPolicy::ZeroRow;
  else throw UsageError("gat_isolated must be \"error\" or \"zero-row\"");
  return spec;
}

WalkKind kind_from_string(const std::string& kind) {
  if (kind == "raw") return WalkKind::Raw;
  if (kind == "normalized") return WalkKind::Normalized;
  throw UsageError("walk kind must be \"raw\" or \"normalized\"");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact walk censuses and representation checks for four MPNN aggregation schemes";

  py::register_exception<Error>(m, "WalkgnnError", PyExc_ValueError);

  py::class_<Graph>(m, "Graph")
      .def(py::init<>())
      .def(py::init<std::size_t, const std::vector<std::pair<NodeId, NodeId>>&>(),
           py::arg("node_count"), py::arg("edges"))
      .def_property_readonly("node_count", &Graph::node_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def("degree", &Graph::degree, py::arg("v"))
      .def("min_degree", &Graph::min_degree)
      .def("neighbors",
           [](const Graph& g, NodeId v) {
             const auto nbrs = g.neighbors(v);
             return std::vector<NodeId>(nbrs.begin(), nbrs.end());
           },
           py::arg("v"))
      .def("edges", &Graph::edges)
      .def("to_edge_list", &Graph::to_edge_list_text)
      .def("to_dict", [](const Graph& g) { return json_to_py(g.to_json()); })
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.node_count()) +
               ", m=" + std::to_string(g.edge_count()) + ")";
      });

  py::class_<GraphCollection>(m, "GraphCollection")
      .def(py::init<std::vector<Graph>, std::optional<std::vector<long>>>(), py::arg("graphs"),
           py::arg("labels") = std::nullopt)
      .def("__len__", &GraphCollection::size)
      .def("__getitem__", &GraphCollection::graph, py::return_value_policy::copy)
      .def_property_readonly("labels", [](const GraphCollection& c) { return c.labels(); })
      .def_property_readonly("total_nodes", &GraphCollection::total_nodes)
      .def("origin", &GraphCollection::origin, py::arg("global_id"))
      .def("global_id", &GraphCollection::global_id, py::arg("graph_index"), py::arg("local"));

  m.def("parse_edge_list", &parse_edge_list, py::arg("text"),
        py::arg("node_count_hint") = std::nullopt,
        "Parse \"u v\" lines; '#' comments and blank lines ignored; self-loops rejected.");
  m.def(
      "parse_tu_collection",
      [](const std::string& adjacency, const std::string& indicator,
         const std::optional<std::string>& labels) {
        return parse_tu_collection(adjacency, indicator,
                                   labels ? std::optional<std::string_view>(*labels)
                                          : std::nullopt);
      },
      py::arg("adjacency_text"), py::arg("indicator_text"), py::arg("labels_text") = std::nullopt);
  m.def(
      "generate",
      [](const std::string& spec, std::uint64_t seed) {
        SyntheticSpec parsed = SyntheticSpec::parse(spec);
        if (spec.find("seed=") == std::string::npos) parsed.seed = seed;
        return generate(parsed);
      },
      py::arg("spec"), py::arg("seed") = 0,
      "Generate from \"kind:key=value,...\", e.g. \"erdos-renyi:n=20,p=0.3\" or \"fig2-star3\".");
  m.attr("FIG2_RED_NODE") = kFig2RedNode;

  py::class_<WalkTable>(m, "WalkTable")
      .def_readonly("max_length", &WalkTable::max_length)
      .def_property_readonly("node_count", &WalkTable::node_count)
      .def("count",
           [](const WalkTable& t, NodeId v, std::size_t k) {
             if (!t.has_raw()) throw UsageError("table has no raw counts");
             return t.counts.at(v).at(k);
           },
           py::arg("v"), py::arg("k"))
      .def("normalized",
           [](const WalkTable& t, NodeId v, std::size_t k) {
             if (!t.has_normalized()) throw UsageError("table has no normalized sums");
             return t.normalized.at(v).at(k);
           },
           py::arg("v"), py::arg("k"))
      .def("to_csv", &WalkTable::to_csv)
      .def("to_dict", [](const WalkTable& t) { return json_to_py(t.to_json()); });

  m.def("walk_counts", &walk_counts, py::arg("graph"), py::arg("max_length"));
  m.def("normalized_walk_sums", &normalized_walk_sums, py::arg("graph"), py::arg("max_length"));
  m.def("walk_census", &walk_census, py::arg("graph"), py::arg("max_length"));
  m.def("enumerate_walks_bruteforce", &enumerate_walks_bruteforce, py::arg("graph"),
        py::arg("v"), py::arg("k"), py::arg("budget") = kDefaultEnumerationBudget);
  m.def("enumerate_normalized_walks_bruteforce", &enumerate_normalized_walks_bruteforce,
        py::arg("graph"), py::arg("v"), py::arg("k"),
        py::arg("budget") = kDefaultEnumerationBudget);

  py::class_<Model>(m, "Model")
      .def_property_readonly("depth", &Model::depth)
      .def_property_readonly("variant",
                             [](const Model& m_) { return to_string(m_.spec.variant); })
      .def_readonly("seed", &Model::seed)
      .def("to_dict", [](const Model& m_) { return json_to_py(m_.to_json()); })
      .def("to_json", [](const Model& m_) { return m_.to_json().dump(); })
      .def_static("from_json",
                  [](const std::string& text) { return Model::from_json(nlohmann::json::parse(text)); })
      .def("__eq__", [](const Model& a, const Model& b) { return a == b; });

  m.def(
      "init_model",
      [](const std::string& variant, std::size_t depth, std::size_t width, std::uint64_t seed,
         double epsilon, const std::string& bias, std::size_t mlp_layers,
         const std::string& gat_isolated) {
        return init_model(make_spec(variant, depth, width, epsilon, bias, mlp_layers,
                                    gat_isolated),
                          seed);
      },
      py::arg("variant"), py::arg("depth") = 3, py::arg("width") = 8, py::arg("seed") = 0,
      py::arg("epsilon") = 0.0, py::arg("bias") = "zero", py::arg("mlp_layers") = 2,
      py::arg("gat_isolated") = "error",
      "Deterministic weights: variant in {gcn, dgcnn, gat, gin0, gin}.");

  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def_property_readonly("depth", &EmbeddingTable::depth)
      .def("layer",
           [](const EmbeddingTable& t, std::size_t k) { return matrix_to_rows(t.at(k)); },
           py::arg("k"))
      .def("row",
           [](const EmbeddingTable& t, std::size_t k, NodeId v) {
             const auto row = t.at(k).row(v);
             return std::vector<double>(row.begin(), row.end());
           },
           py::arg("k"), py::arg("v"))
      .def("to_csv", &EmbeddingTable::to_csv);

  m.def("forward", &forward, py::arg("graph"), py::arg("model"));
  m.def(
      "readout",
      [](const EmbeddingTable& table, const std::string& mode) {
        if (mode == "sum") return readout(table, ReadoutMode::Sum);
        if (mode == "mean") return readout(table, ReadoutMode::Mean);
        throw UsageError("readout mode must be \"sum\" or \"mean\"");
      },
      py::arg("table"), py::arg("mode") = "sum");

  m.def(
      "spectral_norm",
      [](const std::vector<std::vector<double>>& rows, double tol, std::size_t max_iter) {
        return spectral_norm(rows_to_matrix(rows), tol, max_iter);
      },
      py::arg("matrix"), py::arg("tol") = kSpectralNormTol,
      py::arg("max_iter") = kSpectralNormMaxIter);
  m.def("lipschitz_profile", [](const Model& model) {
    return json_to_py(lipschitz_profile(model).to_json());
  });
  m.def(
      "verify_bound",
      [](const Graph& graph, const Model& model, std::size_t k, double tol) {
        const WalkTable walks = model.spec.variant == Variant::GCN
                                    ? normalized_walk_sums(graph, k)
                                    : walk_counts(graph, k);
        return json_to_py(verify_bound(graph, model, k, walks, tol).to_json());
      },
      py::arg("graph"), py::arg("model"), py::arg("k"), py::arg("tol") = kBoundSlackTol);

  m.def(
      "pearson",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const PearsonResult r = pearson(xs, ys);
        return py::make_tuple(r.r, r.degenerate);
      },
      py::arg("xs"), py::arg("ys"), "Returns (r, degenerate).");
  m.def(
      "correlate",
      [](const GraphCollection& collection, const Model& model, std::size_t k) {
        const CorrelationReport report = correlate(collection, model, k);
        py::dict d = json_to_py(report.to_json());
        d["walk_distances"] = report.walk_distances.values;
        d["embedding_distances"] = report.embedding_distances.values;
        return d;
      },
      py::arg("collection"), py::arg("model"), py::arg("k") = 3);
  m.def(
      "collapse_check",
      [](const EmbeddingTable& table, std::size_t k, double rel_tol) {
        return json_to_py(collapse_check(table, k, rel_tol).to_json());
      },
      py::arg("table"), py::arg("k"), py::arg("rel_tol") = 1e-10);
  m.def(
      "proportionality_check",
      [](const EmbeddingTable& table, const WalkTable& walks, const std::string& kind,
         std::size_t k, double rel_tol) {
        return json_to_py(
            proportionality_check(table, walks, kind_from_string(kind), k, rel_tol).to_json());
      },
      py::arg("table"), py::arg("walks"), py::arg("kind"), py::arg("k"),
      py::arg("rel_tol") = 1e-9);
  m.def(
      "readout_census",
      [](const GraphCollection& collection, const Model& model, const std::string& mode) {
        const ReadoutMode m_ = mode == "mean" ? ReadoutMode::Mean : ReadoutMode::Sum;
        return json_to_py(readout_census(collection, model, m_).to_json());
      },
      py::arg("collection"), py::arg("model"), py::arg("mode") = "sum");
  m.def(
      "find_walk_collisions",
      [](const GraphCollection& collection, std::size_t k, bool require_distinct_degrees,
         const std::optional<Model>& model) {
        const std::vector<CollisionWitness> witnesses =
            find_walk_collisions(collection, k, require_distinct_degrees,
                                 model ? &*model : nullptr);
        py::list out;
        for (const CollisionWitness& w : witnesses) out.append(json_to_py(w.to_json()));
        return out;
      },
      py::arg("collection"), py::arg("k") = 2, py::arg("require_distinct_degrees") = true,
      py::arg("model") = std::nullopt);

#ifdef WALKGNN_VERSION
  m.attr("__version__") = WALKGNN_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
