#include "grassclust/cli.hpp"

#include "grassclust/config.hpp"
#include "grassclust/csv.hpp"
#include "grassclust/errors.hpp"
#include "grassclust/evaluation.hpp"
#include "grassclust/parallel.hpp"
#include "grassclust/pipeline.hpp"
#include "grassclust/synthgen.hpp"

#ifdef GRASSCLUST_SYSTEM_CLI11
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#ifdef GRASSCLUST_SYSTEM_JSON
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

#include <filesystem>
#include <map>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace grassclust {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::string input;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string dump_affinity;
  std::string partition;
  std::string truth;
};

PipelineConfig load_config(const CommonOptions& o) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig::defaults() : PipelineConfig::load(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

json stage_json(const StageConfig& s) {
  return {{"window_count", s.karma.window_count},
          {"block_rows", s.karma.block_rows},
          {"rank", s.karma.rank},
          {"forward_width", s.karma.forward_width},
          {"backward_width", s.karma.backward_width},
          {"buffer", s.karma.buffer},
          {"stride", s.karma.stride},
          {"kernel", s.kernel.to_string()},
          {"k_nn", s.egct.k_nn},
          {"sigma_alpha", s.egct.sigma_alpha},
          {"sigma_theta", s.egct.sigma_theta},
          {"pca_energy", s.egct.pca_energy},
          {"resolution", s.egct.louvain_resolution}};
}

json intervals_json(const StatePartition& p) {
  json arr = json::array();
  for (const auto& iv : p.intervals()) arr.push_back({{"start", iv.start}, {"end", iv.end}, {"label", iv.label}});
  return arr;
}

std::vector<int> int_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of integers");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw InputError(what + " must be an array of integers");
    out.push_back(v.get<int>());
  }
  return out;
}

/// A partition from a report ("intervals") or a truth sidecar ("time_labels").
StatePartition load_partition(const std::string& path) {
  const json j = read_json(path);
  if (j.contains("intervals")) {
    std::vector<Interval> ivs;
    for (const auto& iv : j.at("intervals")) {
      ivs.push_back({iv.at("start").get<long>(), iv.at("end").get<long>(), iv.at("label").get<int>()});
    }
    return StatePartition(std::move(ivs));
  }
  if (j.contains("time_labels")) return StatePartition::from_time_labels(int_vector(j.at("time_labels"), "time_labels"));
  throw InputError(path + " has neither 'intervals' nor 'time_labels'");
}

void maybe_dump_affinity(const std::string& path, const WeightedGraph& g) {
  if (!path.empty()) write_matrix_csv(path, g.weights());
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

json base_report(const std::string& command, const PipelineConfig& cfg) {
  json params = {{"seed", cfg.seed},
                 {"min_dwell", cfg.min_dwell},
                 {"states", stage_json(cfg.states)},
                 {"communities", stage_json(cfg.communities)},
                 {"subnets", stage_json(cfg.subnets)}};
  return {{"command", command}, {"parameters", params}, {"seed", cfg.seed}, {"metrics", json::object()},
          {"warnings", json::array()}};
}

void add_warnings(json& report, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) report["warnings"].push_back(w);
}

// --- subcommands ---------------------------------------------------------

int cmd_simulate(const std::string& preset, std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
  if (out_dir.empty()) throw InputError("simulate needs an output directory (-o)");
  const auto states = preset_states(preset);
  const SyntheticDataset ds = gen_timeseries(states, seed);
  fs::create_directories(out_dir);

  std::vector<std::string> names;
  for (Eigen::Index c = 0; c < ds.series.channels(); ++c) names.push_back("node" + std::to_string(c));
  write_matrix_csv((fs::path(out_dir) / "series.csv").string(), ds.series.data(), names);

  json spec = json::array();
  for (const auto& s : states) {
    spec.push_back({{"communities", s.communities},
                    {"outlier_magnitude", s.outlier_magnitude},
                    {"noise_db", s.noise_db},
                    {"outlier_entries", s.outlier_entries},
                    {"samples", s.samples},
                    {"latent_ids", s.latent_ids}});
  }
  json truth = {{"time_labels", ds.time_labels},
                {"node_labels_per_state", ds.node_labels},
                {"subnet_labels", ds.subnet_labels},
                {"spec", {{"preset", preset}, {"states", spec}}},
                {"seed", seed}};
  std::ofstream f(fs::path(out_dir) / "truth.json");
  if (!f) throw InputError("cannot write truth.json in " + out_dir);
  f << truth.dump(2) << '\n';
  out << "wrote " << ds.series.samples() << "x" << ds.series.channels() << " series to " << out_dir << '\n';
  return kExitOk;
}

int cmd_extract(const CommonOptions& o, const std::string& stage_name, std::ostream& out) {
  const PipelineConfig cfg = load_config(o);
  const NamedSeries input = read_series_csv(o.input);
  const int threads = resolve_threads(cfg.threads);
  Eigen::MatrixXd rows;
  std::vector<std::string> names;
  if (stage_name == "states") {
    const auto& st = cfg.states;
    const auto vectors = assemble_state_snapshots(input.series);
    const auto anchors = horizon_anchors(static_cast<long>(vectors.size()), st.karma);
    const auto hf = extract_features_over_horizon(vectors, anchors, st.karma, st.kernel, threads);
    const Eigen::Index dim = static_cast<Eigen::Index>(st.karma.ambient_dim()) * st.karma.rank;
    rows.resize(static_cast<Eigen::Index>(hf.features.size()), dim + 1);
    for (std::size_t i = 0; i < hf.features.size(); ++i) {
      const auto& b = hf.features[i].point.basis();
      rows(static_cast<Eigen::Index>(i), 0) = static_cast<double>(hf.features[i].anchor);
      rows.row(static_cast<Eigen::Index>(i)).tail(dim) = Eigen::Map<const Eigen::RowVectorXd>(b.data(), dim);
    }
    names.push_back("anchor");
    for (Eigen::Index k = 0; k < dim; ++k) names.push_back("b" + std::to_string(k));
  } else if (stage_name == "communities" || stage_name == "subnets") {
    if (o.partition.empty()) throw InputError("nodal extraction needs --partition");
    const StageConfig& st = stage_name == "communities" ? cfg.communities : cfg.subnets;
    const auto nodal = extract_state_nodal_features(input.series, load_partition(o.partition), st, threads);
    const Eigen::Index dim = static_cast<Eigen::Index>(st.karma.ambient_dim()) * st.karma.rank;
    std::vector<Eigen::RowVectorXd> acc;
    for (const auto& sc : nodal.states) {
      for (std::size_t v = 0; v < sc.features.size(); ++v) {
        Eigen::RowVectorXd r(dim + 3);
        r(0) = sc.state;
        r(1) = static_cast<double>(v);
        r(2) = static_cast<double>(sc.anchor);
        r.tail(dim) = Eigen::Map<const Eigen::RowVectorXd>(sc.features[v].basis().data(), dim);
        acc.push_back(r);
      }
    }
    rows.resize(static_cast<Eigen::Index>(acc.size()), dim + 3);
    for (std::size_t i = 0; i < acc.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = acc[i];
    names = {"state", "node", "anchor"};
    for (Eigen::Index k = 0; k < dim; ++k) names.push_back("b" + std::to_string(k));
  } else {
    throw InputError("unknown stage '" + stage_name + "' (expected states, communities or subnets)");
  }
  std::ostringstream csv;
  write_matrix_csv(csv, rows, names);
  write_output(o.output, csv.str(), out);
  return kExitOk;
}

void score_time_labels(json& report, const std::string& truth_path, const ClusterAssignment& pred) {
  if (truth_path.empty()) return;
  const json t = read_json(truth_path);
  const auto truth = ClusterAssignment::from_raw(int_vector(t.at("time_labels"), "time_labels"));
  report["metrics"]["accuracy"] = accuracy(pred, truth);
  report["metrics"]["nmi"] = nmi(pred, truth);
}

StateClustering run_states(const CommonOptions& o, const PipelineConfig& cfg, const TimeSeriesMatrix& ts,
                           json& report) {
  StateClustering sc = cluster_states(ts, cfg);
  report["intervals"] = intervals_json(sc.partition);
  report["metrics"]["modularity"] = sc.egct.modularity;
  report["metrics"]["num_states"] = sc.time_labels.num_clusters();
  report["metrics"]["num_features"] = sc.anchors.size();
  add_warnings(report, sc.warnings);
  (void)o;
  return sc;
}

int cmd_cluster_states(const CommonOptions& o, std::ostream& out) {
  const PipelineConfig cfg = load_config(o);
  const NamedSeries input = read_series_csv(o.input);
  json report = base_report("cluster-states", cfg);
  const StateClustering sc = run_states(o, cfg, input.series, report);
  report["labels"] = sc.time_labels.labels();
  report["anchors"] = sc.anchors;
  report["feature_labels"] = sc.feature_labels.labels();
  score_time_labels(report, o.truth, sc.time_labels);
  maybe_dump_affinity(o.dump_affinity, sc.egct.affinity);
  write_output(o.output, report.dump(2) + "\n", out);
  return kExitOk;
}

StatePartition partition_for(const CommonOptions& o, const PipelineConfig& cfg, const TimeSeriesMatrix& ts,
                             json& report) {
  if (!o.partition.empty()) {
    StatePartition p = load_partition(o.partition);
    report["intervals"] = intervals_json(p);
    return p;
  }
  return run_states(o, cfg, ts, report).partition;
}

int cmd_detect_communities(const CommonOptions& o, std::ostream& out) {
  const PipelineConfig cfg = load_config(o);
  const NamedSeries input = read_series_csv(o.input);
  json report = base_report("detect-communities", cfg);
  const StatePartition partition = partition_for(o, cfg, input.series, report);
  const CommunityDetection cd = detect_communities(input.series, partition, cfg);

  std::optional<json> truth;
  if (!o.truth.empty()) truth = read_json(o.truth);
  json labels = json::array();
  json per_state = json::array();
  for (const auto& sc : cd.states) {
    labels.push_back(sc.assignment.labels());
    json entry = {{"state", sc.state},
                  {"anchor", sc.anchor},
                  {"interval", {{"start", sc.interval.start}, {"end", sc.interval.end}}},
                  {"num_communities", sc.assignment.num_clusters()}};
    if (truth) {
      // Score against the true state that dominates the interval.
      const auto tl = int_vector(truth->at("time_labels"), "time_labels");
      std::map<int, long> votes;
      for (long t = sc.interval.start; t <= sc.interval.end && t < static_cast<long>(tl.size()); ++t) {
        ++votes[tl[static_cast<std::size_t>(t)]];
      }
      int dominant = votes.begin()->first;
      for (const auto& [label, count] : votes) {
        if (count > votes[dominant]) dominant = label;
      }
      const auto node_truth = ClusterAssignment::from_raw(
          int_vector(truth->at("node_labels_per_state").at(static_cast<std::size_t>(dominant)), "node labels"));
      entry["true_state"] = dominant;
      entry["accuracy"] = accuracy(sc.assignment, node_truth);
      entry["nmi"] = nmi(sc.assignment, node_truth);
    }
    per_state.push_back(entry);
    add_warnings(report, sc.warnings);
    if (!o.dump_affinity.empty()) {
      EgctParams ep = cfg.communities.egct;
      ep.seed = cfg.seed;
      maybe_dump_affinity(with_suffix(o.dump_affinity, "_state" + std::to_string(sc.state)),
                          egct(sc.features, ep, resolve_threads(cfg.threads)).affinity);
    }
  }
  add_warnings(report, cd.skipped);
  report["labels"] = labels;
  report["states"] = per_state;
  report["metrics"]["states_processed"] = cd.states.size();
  report["metrics"]["states_skipped"] = cd.skipped.size();
  write_output(o.output, report.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_track_subnets(const CommonOptions& o, std::ostream& out) {
  const PipelineConfig cfg = load_config(o);
  const NamedSeries input = read_series_csv(o.input);
  json report = base_report("track-subnets", cfg);
  const StatePartition partition = partition_for(o, cfg, input.series, report);
  const SubnetTracking st = track_subnetworks(input.series, partition, cfg);
  json items = json::array();
  for (const auto& it : st.items) items.push_back({it.node, it.state});
  report["items"] = items;
  report["labels"] = st.assignment.labels();
  report["metrics"]["num_subnetworks"] = st.assignment.num_clusters();
  report["metrics"]["modularity"] = st.egct.modularity;
  add_warnings(report, st.warnings);
  add_warnings(report, st.skipped);
  maybe_dump_affinity(o.dump_affinity, st.egct.affinity);
  write_output(o.output, report.dump(2) + "\n", out);
  return kExitOk;
}

/// Labels to score: `key` when given, else "time_labels", else "labels".
json pick_labels(const json& doc, const std::string& key, const std::string& path) {
  if (!key.empty()) {
    if (!doc.contains(key)) throw InputError(path + " has no key '" + key + "'");
    return doc.at(key);
  }
  if (doc.is_array()) return doc;
  if (doc.contains("time_labels")) return doc.at("time_labels");
  if (doc.contains("labels")) return doc.at("labels");
  throw InputError(path + " has neither 'time_labels' nor 'labels'");
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path, const std::string& pred_key,
                 const std::string& truth_key, const std::string& output, std::ostream& out) {
  const json pred = pick_labels(read_json(pred_path), pred_key, pred_path);
  const json truth = pick_labels(read_json(truth_path), truth_key, truth_path);
  json report = {{"command", "evaluate"}, {"metrics", json::object()}, {"warnings", json::array()}};
  const bool nested = pred.is_array() && !pred.empty() && pred.front().is_array();
  if (!nested) {
    const auto p = ClusterAssignment::from_raw(int_vector(pred, "predicted labels"));
    const auto t = ClusterAssignment::from_raw(int_vector(truth, "true labels"));
    report["metrics"]["accuracy"] = accuracy(p, t);
    report["metrics"]["nmi"] = nmi(p, t);
  } else {
    if (!truth.is_array() || truth.size() != pred.size()) {
      throw InputError("per-state label lists differ in count");
    }
    json rows = json::array();
    double acc_sum = 0.0;
    double nmi_sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const auto p = ClusterAssignment::from_raw(int_vector(pred[i], "predicted labels"));
      const auto t = ClusterAssignment::from_raw(int_vector(truth[i], "true labels"));
      const double a = accuracy(p, t);
      const double n = nmi(p, t);
      rows.push_back({{"accuracy", a}, {"nmi", n}});
      acc_sum += a;
      nmi_sum += n;
    }
    report["metrics"]["per_list"] = rows;
    report["metrics"]["accuracy"] = acc_sum / static_cast<double>(pred.size());
    report["metrics"]["nmi"] = nmi_sum / static_cast<double>(pred.size());
  }
  write_output(output, report.dump(2) + "\n", out);
  return kExitOk;
}

void add_common(CLI::App* sub, CommonOptions& o, bool needs_input) {
  sub->add_option("-c,--config", o.config_path, "Pipeline config file");
  auto* in = sub->add_option("-i,--input", o.input, "Series CSV (header row of node ids)");
  if (needs_input) in->required();
  sub->add_option("-o,--output", o.output, "Output file (stdout when omitted)");
  sub->add_option("--seed", o.seed, "Override the config seed");
  sub->add_option("--threads", o.threads, "Worker threads (default: GRASSCLUST_THREADS, then all cores)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clustering of network time series on the Grassmannian"};
  app.name("grassclust");
  app.require_subcommand(1);

  std::string preset = "d1";
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset (series.csv, truth.json)");
  simulate->add_option("--preset", preset, "Dataset preset d1..d6")
      ->check(CLI::IsMember({"d1", "d2", "d3", "d4", "d5", "d6"}));
  simulate->add_option("--seed", sim_seed, "Generator seed");
  simulate->add_option("-o,--output", sim_out, "Output directory")->required();

  CommonOptions ex;
  std::string stage = "states";
  auto* extract = app.add_subcommand("extract", "Write Grassmann features as CSV");
  add_common(extract, ex, true);
  extract->add_option("--stage", stage, "states, communities or subnets");
  extract->add_option("--partition", ex.partition, "Report or truth JSON with the state partition");

  CommonOptions cs;
  auto* states = app.add_subcommand("cluster-states", "Partition the horizon into network states");
  add_common(states, cs, true);
  states->add_option("--dump-affinity", cs.dump_affinity, "Write the feature affinity matrix as CSV");
  states->add_option("--truth", cs.truth, "Truth JSON; adds accuracy and NMI to the report");

  CommonOptions dc;
  auto* communities = app.add_subcommand("detect-communities", "Node communities within each state");
  add_common(communities, dc, true);
  communities->add_option("--partition", dc.partition, "Report or truth JSON (state clustering runs otherwise)");
  communities->add_option("--dump-affinity", dc.dump_affinity, "Affinity CSV path; one file per state");
  communities->add_option("--truth", dc.truth, "Truth JSON; adds per-state accuracy and NMI");

  CommonOptions ts;
  auto* subnets = app.add_subcommand("track-subnets", "Subnetwork sequences across states");
  add_common(subnets, ts, true);
  subnets->add_option("--partition", ts.partition, "Report or truth JSON (state clustering runs otherwise)");
  subnets->add_option("--dump-affinity", ts.dump_affinity, "Write the pooled affinity matrix as CSV");

  std::string pred_path;
  std::string truth_path;
  std::string pred_key;
  std::string truth_key;
  std::string eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "Accuracy and NMI of predicted against true labels");
  evaluate->add_option("--pred", pred_path, "Predicted labels (JSON)")->required();
  evaluate->add_option("--truth", truth_path, "True labels (JSON)")->required();
  evaluate->add_option("--pred-key", pred_key, "Key holding the predicted labels");
  evaluate->add_option("--truth-key", truth_key, "Key holding the true labels");
  evaluate->add_option("-o,--output", eval_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    err << app.help();
    return kExitInput;
  }

  try {
    if (*simulate) return cmd_simulate(preset, sim_seed, sim_out, out);
    if (*extract) return cmd_extract(ex, stage, out);
    if (*states) return cmd_cluster_states(cs, out);
    if (*communities) return cmd_detect_communities(dc, out);
    if (*subnets) return cmd_track_subnets(ts, out);
    if (*evaluate) return cmd_evaluate(pred_path, truth_path, pred_key, truth_key, eval_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DegenerateDataError& e) {
    err << "degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  }
  err << app.help();
  return kExitInput;
}

}  // namespace grassclust
