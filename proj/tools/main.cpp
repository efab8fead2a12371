// walkgnn: walk censuses, MPNN forward passes, and collapse / walk-bound /
// correlation verification as reproducible batch commands. Every output file
// embeds the resolved configuration and a schema version; identical configs
// produce byte-identical outputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "walkgnn/analysis.hpp"
#include "walkgnn/format.hpp"
#include "walkgnn/graph.hpp"
#include "walkgnn/lipschitz.hpp"
#include "walkgnn/model.hpp"
#include "walkgnn/rng.hpp"
#include "walkgnn/walks.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace walkgnn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::string command;
  std::optional<std::string> graph_path;
  std::optional<std::string> tu_dir;
  std::optional<std::string> synthetic;
  std::optional<std::size_t> graph_index;
  bool builtin_fig2 = false;

  std::string model = "gin0";
  double epsilon = 0.0;
  std::size_t depth = 3;
  std::size_t width = 8;
  std::string bias = "zero";
  std::string gat_isolated = "error";
  std::uint64_t seed = 0;

  std::size_t k = 3;
  double collapse_tol = 1e-10;
  double prop_tol = 1e-9;
  double bound_tol = 1e-8;
  std::optional<double> tol;  // overrides the command's primary tolerance
  bool allow_same_degree = false;
  bool with_model = false;

  std::string out_dir;
  std::string format = "both";

  json to_json() const {
    json j{{"command", command},
           {"model", model},
           {"epsilon", epsilon},
           {"depth", depth},
           {"width", width},
           {"bias", bias},
           {"gat_isolated", gat_isolated},
           {"seed", seed},
           {"k", k},
           {"collapse_tol", collapse_tol},
           {"prop_tol", prop_tol},
           {"bound_tol", bound_tol},
           {"allow_same_degree", allow_same_degree},
           {"with_model", with_model},
           {"out", out_dir},
           {"format", format},
           {"builtin_fig2", builtin_fig2}};
    if (graph_path) j["graph"] = *graph_path;
    if (tu_dir) j["tu_dir"] = *tu_dir;
    if (synthetic) j["synthetic"] = *synthetic;
    if (graph_index) j["graph_index"] = *graph_index;
    if (tol) j["tol"] = *tol;
    return j;
  }
};

bool want_json(const RunConfig& c) { return c.format != "csv"; }
bool want_csv(const RunConfig& c) { return c.format != "json"; }

// Temp-file-then-rename so partially written outputs never appear.
void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path output_dir(const RunConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("WALKGNN_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string csv_with_header(const RunConfig& config, const std::string& body) {
  std::ostringstream out;
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# config=" << config.to_json().dump() << "\n";
  out << body;
  return out.str();
}

json report_skeleton(const RunConfig& config) {
  return {{"schema_version", kSchemaVersion}, {"config", config.to_json()}};
}

void write_json(const RunConfig& config, const std::string& filename, const json& payload) {
  atomic_write(output_dir(config) / filename, payload.dump(2) + "\n");
}

void write_csv(const RunConfig& config, const std::string& filename, const std::string& body) {
  atomic_write(output_dir(config) / filename, csv_with_header(config, body));
}

// --- input resolution -------------------------------------------------------

// Extended synthetic grammar for collections: a `count=N` key generates N
// graphs with seeds derived from one SplitMix64 stream, and `n=lo..hi` draws
// each size uniformly from the range.
GraphCollection parse_synthetic_collection(const std::string& text, std::uint64_t default_seed) {
  std::string base = text;
  std::optional<std::size_t> count;
  std::optional<std::pair<std::size_t, std::size_t>> n_range;

  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    std::ostringstream kept;
    kept << text.substr(0, colon);
    bool first = true;
    std::string params = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= params.size()) {
      const std::size_t comma = params.find(',', pos);
      const std::string item =
          params.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      pos = comma == std::string::npos ? params.size() + 1 : comma + 1;
      if (item.empty()) continue;
      const auto eq = item.find('=');
      const std::string key = item.substr(0, eq);
      const std::string value = eq == std::string::npos ? "" : item.substr(eq + 1);
      if (key == "count") {
        count = std::stoull(value);
        continue;
      }
      if (key == "n") {
        if (const auto dots = value.find(".."); dots != std::string::npos) {
          n_range = {std::stoull(value.substr(0, dots)), std::stoull(value.substr(dots + 2))};
          continue;
        }
      }
      kept << (first ? ":" : ",") << item;
      first = false;
    }
    base = kept.str();
  }

  if (!count) {
    if (n_range) throw ConstructionError("synthetic spec: n ranges need count=");
    SyntheticSpec spec = SyntheticSpec::parse(base);
    if (base.find("seed=") == std::string::npos) spec.seed = default_seed;
    return GraphCollection({generate(spec)});
  }

  if (*count == 0) throw ConstructionError("synthetic spec: count must be >= 1");
  SyntheticSpec proto = SyntheticSpec::parse(base);
  const std::uint64_t master_seed =
      base.find("seed=") == std::string::npos ? default_seed : proto.seed;
  SplitMix64 master(master_seed);
  std::vector<Graph> graphs;
  graphs.reserve(*count);
  for (std::size_t i = 0; i < *count; ++i) {
    SyntheticSpec spec = proto;
    if (n_range) spec.n = master.next_in_range(n_range->first, n_range->second);
    spec.seed = master.next_u64();
    graphs.push_back(generate(spec));
  }
  return GraphCollection(std::move(graphs));
}

GraphCollection load_tu_dir(const fs::path& dir) {
  std::optional<fs::path> adjacency, indicator, labels;
  if (!fs::is_directory(dir)) throw Error("--tu-dir: " + dir.string() + " is not a directory");
  std::vector<fs::path> entries;
  for (const auto& entry : fs::directory_iterator(dir)) entries.push_back(entry.path());
  std::sort(entries.begin(), entries.end());
  for (const fs::path& p : entries) {
    const std::string name = p.filename().string();
    if (name.ends_with("_A.txt")) adjacency = p;
    else if (name.ends_with("_graph_indicator.txt")) indicator = p;
    else if (name.ends_with("_graph_labels.txt")) labels = p;
  }
  if (!adjacency || !indicator)
    throw Error("--tu-dir: need <name>_A.txt and <name>_graph_indicator.txt in " + dir.string());
  std::optional<std::string> labels_text;
  if (labels) labels_text = read_file(*labels);
  const std::string adjacency_text = read_file(*adjacency);
  const std::string indicator_text = read_file(*indicator);
  return parse_tu_collection(adjacency_text, indicator_text,
                             labels_text ? std::optional<std::string_view>(*labels_text)
                                         : std::nullopt);
}

GraphCollection resolve_collection(const RunConfig& config) {
  const int sources = (config.graph_path ? 1 : 0) + (config.tu_dir ? 1 : 0) +
                      (config.synthetic ? 1 : 0);
  if (sources > 1) throw UsageError("pick one input: --graph, --tu-dir or --synthetic");

  std::vector<Graph> graphs;
  std::optional<std::vector<long>> labels;
  if (config.graph_path) {
    graphs.push_back(parse_edge_list(read_file(*config.graph_path)));
  } else if (config.tu_dir) {
    GraphCollection c = load_tu_dir(*config.tu_dir);
    graphs = c.graphs();
    labels = c.labels();
  } else if (config.synthetic) {
    GraphCollection c = parse_synthetic_collection(*config.synthetic, config.seed);
    graphs = c.graphs();
  }

  if (config.builtin_fig2) {
    graphs.push_back(generate({.kind = SyntheticKind::Fig2LeafOnHub}));
    graphs.push_back(generate({.kind = SyntheticKind::Fig2Deg2Node}));
    graphs.push_back(generate({.kind = SyntheticKind::Fig2Star3}));
    labels.reset();
  }
  if (graphs.empty()) throw UsageError("no input: pass --graph, --tu-dir or --synthetic");
  return GraphCollection(std::move(graphs), std::move(labels));
}

Graph resolve_single_graph(const RunConfig& config) {
  const GraphCollection c = resolve_collection(config);
  if (config.graph_index) {
    if (*config.graph_index >= c.size())
      throw UsageError("--graph-index " + std::to_string(*config.graph_index) +
                       " out of range for " + std::to_string(c.size()) + " graphs");
    return c.graph(*config.graph_index);
  }
  if (c.size() != 1)
    throw UsageError("input holds " + std::to_string(c.size()) +
                     " graphs; this command needs one (use --graph-index)");
  return c.graph(0);
}

Model build_model(const RunConfig& config) {
  const Variant variant = variant_from_string(config.model);
  ModelSpec spec = ModelSpec::uniform(variant, config.depth, config.width);
  if (config.model == "gin0" && config.epsilon != 0.0)
    throw UsageError("gin0 fixes epsilon = 0; use --model gin for nonzero epsilon");
  spec.epsilon = variant == Variant::GIN ? config.epsilon : 0.0;
  if (config.bias == "zero") spec.bias_mode = BiasMode::Zero;
  else if (config.bias == "random-small") spec.bias_mode = BiasMode::RandomSmall;
  else throw UsageError("--bias must be zero or random-small");
  if (config.gat_isolated == "error") spec.gat_isolated = IsolatedPolicy::Error;
  else if (config.gat_isolated == "zero-row") spec.gat_isolated = IsolatedPolicy::ZeroRow;
  else throw UsageError("--gat-isolated must be error or zero-row");
  return init_model(spec, config.seed);
}

// --- commands ----------------------------------------------------------------

int cmd_walks(const RunConfig& config) {
  const Graph g = resolve_single_graph(config);
  const WalkTable table = walk_census(g, config.k);
  if (want_csv(config)) write_csv(config, "walks.csv", table.to_csv());
  if (want_json(config)) {
    json j = report_skeleton(config);
    j["graph"] = g.to_json();
    j["walks"] = table.to_json();
    write_json(config, "walks.json", j);
  }
  return kExitOk;
}

int cmd_embed(const RunConfig& config) {
  const Graph g = resolve_single_graph(config);
  const Model model = build_model(config);
  const EmbeddingTable table = forward(g, model);
  if (want_csv(config)) write_csv(config, "embeddings.csv", table.to_csv());
  if (want_json(config)) {
    json j = report_skeleton(config);
    j["model"] = model.to_json();
    write_json(config, "model.json", j);
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& config) {
  const GraphCollection collection = resolve_collection(config);
  const Model model = build_model(config);
  const Variant variant = model.spec.variant;
  const double collapse_tol = config.tol.value_or(config.collapse_tol);
  const double bound_tol = config.tol.value_or(config.bound_tol);

  if (variant == Variant::GIN && model.spec.epsilon != 0.0)
    throw UsageError("verify covers gin0 (epsilon = 0); got epsilon = " +
                     std::to_string(model.spec.epsilon));

  json checks = json::array();
  bool certified = true;
  for (std::size_t gi = 0; gi < collection.size(); ++gi) {
    const Graph& g = collection.graph(gi);
    const EmbeddingTable table = forward(g, model);

    if (variant == Variant::DGCNN || variant == Variant::GAT) {
      for (std::size_t k = 1; k <= model.depth(); ++k) {
        const CollapseReport report = collapse_check(table, k, collapse_tol);
        json entry = report.to_json();
        entry["name"] = "collapse";
        entry["graph"] = gi;
        entry["layer"] = k;
        checks.push_back(std::move(entry));
        certified = certified && report.pass;
      }
      continue;
    }

    // GIN-0 / GCN: proportionality plus the walk-distance bound
    const bool raw = variant == Variant::GIN;
    const bool expected_fail = model.spec.bias_mode == BiasMode::RandomSmall;
    const WalkTable walks =
        raw ? walk_counts(g, model.depth()) : normalized_walk_sums(g, model.depth());
    for (std::size_t k = 1; k <= model.depth(); ++k) {
      const ProportionalityReport prop = proportionality_check(
          table, walks, raw ? WalkKind::Raw : WalkKind::Normalized, k, config.prop_tol);
      json entry = prop.to_json();
      entry["name"] = "proportionality";
      entry["graph"] = gi;
      entry["layer"] = k;
      if (expected_fail) entry["expected_fail"] = true;
      else certified = certified && prop.pass;
      checks.push_back(std::move(entry));

      if (!expected_fail) {
        const BoundReport bound = verify_bound(g, model, k, walks, bound_tol);
        json bound_entry = bound.to_json();
        bound_entry["name"] = "lipschitz_bound";
        bound_entry["graph"] = gi;
        checks.push_back(std::move(bound_entry));
        certified = certified && bound.certified();
        if (want_csv(config) && k == config.k) {
          write_csv(config, "bounds_" + std::to_string(gi) + ".csv", bound.to_csv());
        }
      }
    }
  }

  json j = report_skeleton(config);
  j["graph_count"] = collection.size();
  j["checks"] = checks;
  j["certified"] = certified;
  write_json(config, "verification.json", j);
  return certified ? kExitOk : kExitCheckFailed;
}

int cmd_correlate(const RunConfig& config) {
  const GraphCollection collection = resolve_collection(config);
  const Model model = build_model(config);
  // nonzero-epsilon GIN is allowed here; the exactness claims only cover
  // epsilon = 0, and the embedded config records epsilon either way
  const CorrelationReport report = correlate(collection, model, config.k);
  if (want_csv(config)) write_csv(config, "scatter.csv", report.scatter_csv());
  json j = report_skeleton(config);
  j["correlation"] = report.to_json();
  write_json(config, "correlation.json", j);
  return kExitOk;
}

int cmd_collide(const RunConfig& config) {
  const GraphCollection collection = resolve_collection(config);
  std::optional<Model> model;
  if (config.with_model) model = build_model(config);
  const std::vector<CollisionWitness> witnesses = find_walk_collisions(
      collection, config.k, !config.allow_same_degree, model ? &*model : nullptr);
  json array = json::array();
  for (const CollisionWitness& w : witnesses) array.push_back(w.to_json());
  json j = report_skeleton(config);
  j["witnesses"] = array;
  j["witness_count"] = witnesses.size();
  write_json(config, "collisions.json", j);
  return kExitOk;
}

int cmd_lipschitz(const RunConfig& config) {
  const Model model = build_model(config);
  const LipschitzProfile profile = lipschitz_profile(model);
  if (want_csv(config)) write_csv(config, "lipschitz.csv", profile.to_csv());
  json j = report_skeleton(config);
  j["lipschitz"] = profile.to_json();
  write_json(config, "lipschitz.json", j);
  return kExitOk;
}

void add_input_flags(CLI::App* cmd, RunConfig& config, bool with_index) {
  cmd->add_option("--graph", config.graph_path, "Edge-list file (lines \"u v\", # comments)");
  cmd->add_option("--tu-dir", config.tu_dir,
                  "Directory with <name>_A.txt and <name>_graph_indicator.txt");
  cmd->add_option("--synthetic", config.synthetic,
                  "Synthetic spec kind:key=value,... (kinds: erdos-renyi, path, cycle, star, "
                  "complete, fig2-leaf-on-hub, fig2-deg2-node, fig2-star3; keys n, p, leaves, "
                  "seed, count, n=lo..hi with count)");
  if (with_index)
    cmd->add_option("--graph-index", config.graph_index,
                    "Select one graph from a multi-graph input");
}

void add_model_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--model", config.model, "gcn | dgcnn | gat | gin0 | gin")
      ->check(CLI::IsMember({"gcn", "dgcnn", "gat", "gin0", "gin"}));
  cmd->add_option("--epsilon", config.epsilon, "GIN epsilon (gin only; gin0 pins 0)");
  cmd->add_option("--depth", config.depth, "Number of aggregation layers K (default 3)");
  cmd->add_option("--width", config.width, "Hidden width (default 8)");
  cmd->add_option("--bias", config.bias, "zero | random-small (GIN MLP biases)")
      ->check(CLI::IsMember({"zero", "random-small"}));
  cmd->add_option("--gat-isolated", config.gat_isolated,
                  "Isolated-node policy for GAT: error | zero-row")
      ->check(CLI::IsMember({"error", "zero-row"}));
}

void add_common_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--seed", config.seed, "Seed for weights and synthetic graphs (default 0)");
  cmd->add_option("--out", config.out_dir,
                  "Output directory (default $WALKGNN_OUT_DIR, else .)");
  cmd->add_option("--format", config.format, "both | json | csv")
      ->check(CLI::IsMember({"both", "json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"walk censuses and MPNN representation checks"};
  app.require_subcommand(1);
  RunConfig config;

  CLI::App* walks = app.add_subcommand("walks", "Exact and normalized walk census of a graph");
  add_input_flags(walks, config, true);
  walks->add_option("--k", config.k, "Maximum walk length (default 3)");
  add_common_flags(walks, config);

  CLI::App* embed = app.add_subcommand("embed", "Forward pass; per-layer node embeddings");
  add_input_flags(embed, config, true);
  add_model_flags(embed, config);
  add_common_flags(embed, config);

  CLI::App* verify = app.add_subcommand(
      "verify", "Certify collapse (dgcnn/gat) or proportionality + walk bounds (gin0/gcn)");
  add_input_flags(verify, config, false);
  add_model_flags(verify, config);
  verify->add_option("--k", config.k, "Layer whose bound pairs are exported as CSV (default 3)");
  verify->add_option("--tol", config.tol,
                     "Override the primary tolerance (collapse or bound slack)");
  verify->add_option("--collapse-tol", config.collapse_tol,
                     "Relative collapse tolerance (default 1e-10)");
  verify->add_option("--prop-tol", config.prop_tol,
                     "Relative proportionality tolerance (default 1e-9)");
  verify->add_option("--bound-tol", config.bound_tol,
                     "Absolute bound slack tolerance (default 1e-8)");
  add_common_flags(verify, config);

  CLI::App* correlate_cmd = app.add_subcommand(
      "correlate", "Pearson correlation of embedding vs walk distances over all node pairs");
  add_input_flags(correlate_cmd, config, false);
  add_model_flags(correlate_cmd, config);
  correlate_cmd->add_option("--k", config.k, "Layer / walk length (default 3)");
  add_common_flags(correlate_cmd, config);

  CLI::App* collide = app.add_subcommand(
      "collide", "Find nodes sharing an exact walk count w^(k) across a collection");
  add_input_flags(collide, config, false);
  collide->add_flag("--builtin-fig2", config.builtin_fig2,
                    "Append the three built-in equal-walk-count constructions");
  collide->add_option("--k", config.k, "Walk length to group by (default 2)");
  collide->add_flag("--allow-same-degree", config.allow_same_degree,
                    "Keep groups whose nodes all share one degree");
  collide->add_flag("--with-model", config.with_model,
                    "Attach embedding distances from the model flags");
  add_model_flags(collide, config);
  add_common_flags(collide, config);

  CLI::App* lipschitz_cmd =
      app.add_subcommand("lipschitz", "Per-layer Lipschitz constants and running products");
  add_model_flags(lipschitz_cmd, config);
  add_common_flags(lipschitz_cmd, config);

  // collide defaults to the figure's walk length
  collide->parse_complete_callback([&]() {
    if (collide->count("--k") == 0) config.k = 2;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (walks->parsed()) {
      config.command = "walks";
      return cmd_walks(config);
    }
    if (embed->parsed()) {
      config.command = "embed";
      return cmd_embed(config);
    }
    if (verify->parsed()) {
      config.command = "verify";
      return cmd_verify(config);
    }
    if (correlate_cmd->parsed()) {
      config.command = "correlate";
      return cmd_correlate(config);
    }
    if (collide->parsed()) {
      config.command = "collide";
      return cmd_collide(config);
    }
    if (lipschitz_cmd->parsed()) {
      config.command = "lipschitz";
      return cmd_lipschitz(config);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
