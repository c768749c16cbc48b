#include "cbir/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cbir/database.hpp"
#include "cbir/error.hpp"
#include "cbir/eval.hpp"
#include "cbir/ingest.hpp"
#include "cbir/pipeline.hpp"
#include "cbir/retrieval.hpp"
#include "cbir/synthetic.hpp"
#include "format.hpp"

namespace fs = std::filesystem;

namespace cbir {

namespace {

struct Options {
  fs::path root;
  fs::path db;
  std::uint64_t seed = kDefaultSplitSeed;
  std::vector<std::string> synthetic;
  bool stamp_time = false;

  double eoh_threshold = kDefaultEohThreshold;
  bool eoh_blocks = false;

  double c = 1.0;
  int epochs = 200;
  std::uint64_t train_seed = 42;
  std::size_t topk = 3;

  std::string image;
  std::optional<std::uint32_t> id;
  std::optional<std::string> label;
  std::string metric = "canberra";
  bool as_printed = false;
  std::string weights;
  std::string auto_method;
  std::string method = "ratio";
  std::string oracle = "gt";
  double increment_factor = 1.1;
  std::size_t window = 10;
  bool no_prune = false;
  std::size_t topn = 10;
  std::size_t query_topk = 0;
  std::string out;
  std::string svg;
  std::string trace;

  std::size_t n_queries = 50;
  std::uint64_t eval_seed = 7;
  std::string metrics = "all";
  std::string modes = "single,combined";
  std::string dataset;

  bool json = false;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

MetricId require_metric(const std::string& name) {
  const auto m = parse_metric(name);
  if (!m) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + name + "' (canberra|chisq|euclid)");
  return *m;
}

WeightMethod require_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "' (ratio|meandiff)");
  return *m;
}

FeedbackConfig feedback_from(const Options& o) {
  FeedbackConfig fb;
  const auto oracle = parse_oracle(o.oracle);
  if (!oracle) throw Error(ErrorCode::InvalidArgument, "unknown oracle '" + o.oracle + "' (gt|pseudo)");
  fb.oracle = *oracle;
  fb.increment_factor = o.increment_factor;
  fb.window = o.window;
  fb.validate();
  return fb;
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoError, "cannot write " + path);
  file << text;
  if (!file.flush()) throw Error(ErrorCode::IoError, "failed writing " + path);
}

std::int64_t creation_time(bool stamp) {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return std::stoll(epoch);
    } catch (const std::exception&) {
    }
  }
  if (!stamp) return 0;
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

FeatureDatabase load_with_descriptors(const fs::path& path) {
  FeatureDatabase db = load_database(path);
  if (!db.header.has_descriptors) {
    throw Error(ErrorCode::InvalidArgument, path.string() + " has no descriptors yet; run `extract` first");
  }
  return db;
}

// --- subcommands ---------------------------------------------------------

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.root.empty()) throw Error(ErrorCode::InvalidArgument, "--root is required");
  IngestReport report;
  const FeatureDatabase db = ingest_database(o.root, o.seed, creation_time(o.stamp_time), &report);
  if (report.skipped_files) err << "warning: skipped " << report.skipped_files << " non-image entries\n";
  if (report.undecodable_files) err << "warning: " << report.undecodable_files << " file(s) could not be decoded\n";
  for (const auto& label : report.dropped_classes) {
    err << "warning: dropped class '" << label << "' (fewer than two images)\n";
  }
  save_database(db, o.db);
  out << "ingested " << db.records.size() << " images, " << db.split->train_ids.size() << " train / "
      << db.split->test_ids.size() << " test\n";
  return 0;
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream&) {
  FeatureDatabase db = load_database(o.db);
  DescriptorConfig config = descriptor_config(db.header);
  config.eoh_threshold = o.eoh_threshold;
  config.eoh_block_based = o.eoh_blocks;
  extract_descriptors(db, config);
  save_database(db, o.db);
  out << "extracted descriptors for " << db.records.size() << " images\n";
  return 0;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream&) {
  FeatureDatabase db = load_with_descriptors(o.db);
  TrainConfig config;
  config.c = o.c;
  config.epochs = o.epochs;
  config.seed = o.train_seed;
  config.top_k = o.topk;
  const IndexModel& model = train_database(db, config);
  save_database(db, o.db);
  const std::size_t k = std::min(config.top_k, model.models.size());
  out << "classes=" << model.models.size() << " test_accuracy=" << detail::fixed(model.test_accuracy, 4) << " top"
      << k << "_accuracy=" << detail::fixed(top_k_accuracy(model, db.records, db.split->test_ids, k), 4) << '\n';
  return 0;
}

struct ResolvedQuery {
  QuerySource source;
  std::optional<std::string> label;
  std::optional<fs::path> image;
};

ResolvedQuery resolve_query(const Options& o, const FeatureDatabase& db) {
  if (o.id && !o.image.empty()) throw Error(ErrorCode::InvalidArgument, "give either --id or --image, not both");
  if (o.id) {
    if (*o.id >= db.records.size()) throw Error(ErrorCode::InvalidArgument, "unknown image id");
    return {*o.id, db.records[*o.id].label, std::nullopt};
  }
  if (o.image.empty()) throw Error(ErrorCode::InvalidArgument, "--id or --image is required");
  ExternalQuery external;
  external.descriptors = compute_all(load_and_resize(o.image), descriptor_config(db.header));
  external.label = o.label;
  return {external, o.label, fs::path(o.image)};
}

int cmd_query(const Options& o, std::ostream& out, std::ostream&) {
  FeatureDatabase db = load_with_descriptors(o.db);
  const ResolvedQuery q = resolve_query(o, db);
  QueryOptions options;
  options.metric = {require_metric(o.metric), o.as_printed};
  if (!o.weights.empty() && !o.auto_method.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--weights and --auto are mutually exclusive");
  }
  if (!o.weights.empty()) options.weights = WeightVector::parse(o.weights);
  if (!o.auto_method.empty()) options.auto_method = require_method(o.auto_method);
  options.feedback = feedback_from(o);
  options.top_n = o.topn;
  options.prune = !o.no_prune;
  options.top_k = o.query_topk;
  if (options.prune && !db.model) throw Error(ErrorCode::InvalidArgument, "no index model; run `train` or pass --no-prune");

  const QueryResult result = query(db.records, db.model ? &*db.model : nullptr, q.source, options);
  write_or_print(o.out, ranked_list_csv(result.ranked), out);
  if (!o.svg.empty()) write_or_print(o.svg, contact_sheet_svg(result.ranked, db.records, q.label, q.image), out);
  return 0;
}

int cmd_weights(const Options& o, std::ostream& out, std::ostream&) {
  FeatureDatabase db = load_with_descriptors(o.db);
  const ResolvedQuery q = resolve_query(o, db);
  const bool prune = !o.no_prune;
  if (prune && !db.model) throw Error(ErrorCode::InvalidArgument, "no index model; run `train` or pass --no-prune");

  const DescriptorSet& descriptors = std::holds_alternative<std::uint32_t>(q.source)
                                         ? db.records[std::get<std::uint32_t>(q.source)].descriptors
                                         : std::get<ExternalQuery>(q.source).descriptors;
  std::optional<std::uint32_t> qid;
  if (std::holds_alternative<std::uint32_t>(q.source)) qid = std::get<std::uint32_t>(q.source);

  const auto ids = candidate_ids(db.records, db.model ? &*db.model : nullptr, descriptors, qid, prune,
                                 o.query_topk, nullptr);
  const CandidatePool pool = build_pool(descriptors, db.records, ids, {require_metric(o.metric), o.as_printed});
  const FeedbackContext ctx = make_feedback_context(pool, q.label, feedback_from(o));
  const WeightingResult result = optimize_weights(ctx, require_method(o.method));

  const auto pct = result.weights.percentages();
  out << "method=" << method_name(result.method) << " best_iteration=" << result.best_iteration
      << " score=" << detail::fixed(result.best_score, 6) << '\n';
  out << "descriptor,weight,percent\n";
  for (Descriptor d : kAllDescriptors) {
    const auto f = static_cast<std::size_t>(d);
    out << descriptor_name(d) << ',' << detail::fixed(result.weights.values()[f], 6) << ','
        << detail::fixed(pct[f], 2) << '\n';
  }
  if (!o.trace.empty()) write_or_print(o.trace, trace_csv(result), out);
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  FeatureDatabase db = load_with_descriptors(o.db);
  if (!db.split) throw Error(ErrorCode::InvalidArgument, "database has no train/test split");
  const bool prune = !o.no_prune;
  if (prune && !db.model) throw Error(ErrorCode::InvalidArgument, "no index model; run `train` or pass --no-prune");

  EvalConfig config;
  config.dataset = o.dataset.empty() ? fs::path(db.header.corpus_root).filename().string() : o.dataset;
  if (config.dataset.empty()) config.dataset = "dataset";
  config.n_queries = o.n_queries;
  if (o.n_queries > db.split->test_ids.size()) {
    err << "warning: --n " << o.n_queries << " exceeds the " << db.split->test_ids.size()
        << " test images; using all of them\n";
  }
  config.metrics.clear();
  if (o.metrics == "all") {
    config.metrics.assign(std::begin(kAllMetrics), std::end(kAllMetrics));
  } else {
    for (const auto& m : split_list(o.metrics)) config.metrics.push_back(require_metric(m));
  }
  config.single = config.combined = false;
  for (const auto& mode : split_list(o.modes)) {
    if (mode == "single") config.single = true;
    else if (mode == "combined") config.combined = true;
    else throw Error(ErrorCode::InvalidArgument, "unknown mode '" + mode + "' (single|combined)");
  }
  config.as_printed = o.as_printed;
  config.method = require_method(o.method);
  config.feedback = feedback_from(o);
  config.seed = o.eval_seed;
  config.prune = prune;
  config.top_k = o.query_topk;

  static const IndexModel kNoModel;
  const ExperimentReport report =
      batch_evaluate(db.records, db.model ? *db.model : kNoModel, *db.split, config);
  const fs::path out_dir = o.out.empty() ? fs::path("report") : fs::path(o.out);
  emit_report(report, out_dir);
  out << auc_csv(report);
  return 0;
}

int cmd_export(const Options& o, std::ostream& out, std::ostream&) {
  if (!o.json) throw Error(ErrorCode::InvalidArgument, "only --json export is supported");
  write_or_print(o.out, export_json(load_database(o.db)), out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-descriptor content-based image retrieval", "cbir"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Scan a directory-per-class corpus into a new database");
  ingest->add_option("--root", o.root, "Corpus root (root/<class>/<image>)");
  ingest->add_option("--db", o.db, "Database file to create")->required();
  ingest->add_option("--seed", o.seed, "Train/test split seed")->capture_default_str();
  ingest->add_option("--synthetic", o.synthetic, "Generate a synthetic corpus into --root first: "
                                                 "classes=N per-class=M seed=S")
      ->expected(0, -1);
  ingest->add_flag("--stamp-time", o.stamp_time, "Record the current time in the header");

  auto* extract = app.add_subcommand("extract", "Compute CDH, LBP, CLD and EOH descriptors");
  extract->add_option("--db", o.db)->required();
  extract->add_option("--eoh-threshold", o.eoh_threshold, "Edge response threshold")->capture_default_str();
  extract->add_flag("--eoh-blocks", o.eoh_blocks, "Use the 4x4 block-based EOH (80 dims)");

  auto* train = app.add_subcommand("train", "Train the one-vs-rest SVM index");
  train->add_option("--db", o.db)->required();
  train->add_option("--c", o.c, "Regularization C")->capture_default_str();
  train->add_option("--epochs", o.epochs)->capture_default_str();
  train->add_option("--seed", o.train_seed)->capture_default_str();
  train->add_option("--topk", o.topk, "Categories kept when pruning")->capture_default_str();

  auto add_query_options = [&](CLI::App* sub) {
    sub->add_option("--db", o.db)->required();
    sub->add_option("--image", o.image, "External query image");
    sub->add_option("--id", o.id, "Database image id to query with");
    sub->add_option("--label", o.label, "Class of an external query (ground-truth feedback)");
    sub->add_option("--metric", o.metric, "canberra|chisq|euclid")->capture_default_str();
    sub->add_flag("--as-printed", o.as_printed, "Use the literal Canberra/Euclidean variants");
    sub->add_option("--oracle", o.oracle, "gt|pseudo")->capture_default_str();
    sub->add_option("--if", o.increment_factor, "Increment factor (> 1)")->capture_default_str();
    sub->add_option("--k", o.window, "Feedback window")->capture_default_str();
    sub->add_flag("--no-prune", o.no_prune, "Rank the whole database");
    sub->add_option("--topk", o.query_topk, "Override the model's category count");
  };

  auto* query_cmd = app.add_subcommand("query", "Rank database images for a query");
  add_query_options(query_cmd);
  query_cmd->add_option("--weights", o.weights, "Fixed weights a,b,c,d");
  query_cmd->add_option("--auto", o.auto_method, "Learn weights: ratio|meandiff");
  query_cmd->add_option("--topn", o.topn)->capture_default_str();
  query_cmd->add_option("--out", o.out, "Ranked-list CSV (default stdout)");
  query_cmd->add_option("--svg", o.svg, "Contact sheet SVG");

  auto* weights = app.add_subcommand("weights", "Learn descriptor weights for one query");
  add_query_options(weights);
  weights->add_option("--method", o.method, "ratio|meandiff")->capture_default_str();
  weights->add_option("--trace", o.trace, "Per-iteration trace CSV");

  auto* evaluate = app.add_subcommand("evaluate", "Batch precision-recall evaluation");
  evaluate->add_option("--db", o.db)->required();
  evaluate->add_option("--n", o.n_queries, "Number of test queries")->capture_default_str();
  evaluate->add_option("--seed", o.eval_seed)->capture_default_str();
  evaluate->add_option("--metrics", o.metrics, "all or a list of canberra,chisq,euclid")->capture_default_str();
  evaluate->add_option("--modes", o.modes, "single,combined")->capture_default_str();
  evaluate->add_option("--method", o.method, "ratio|meandiff")->capture_default_str();
  evaluate->add_option("--oracle", o.oracle, "gt|pseudo")->capture_default_str();
  evaluate->add_option("--if", o.increment_factor)->capture_default_str();
  evaluate->add_option("--k", o.window)->capture_default_str();
  evaluate->add_option("--topk", o.query_topk, "Override the model's category count");
  evaluate->add_flag("--no-prune", o.no_prune);
  evaluate->add_flag("--as-printed", o.as_printed);
  evaluate->add_option("--dataset", o.dataset, "Dataset name in the report");
  evaluate->add_option("--out", o.out, "Report directory")->capture_default_str();

  auto* export_cmd = app.add_subcommand("export", "Dump a database for inspection");
  export_cmd->add_option("--db", o.db)->required();
  export_cmd->add_flag("--json", o.json, "JSON output");
  export_cmd->add_option("--out", o.out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (ingest->parsed()) {
      if (ingest->count("--synthetic")) {
        if (o.root.empty()) throw Error(ErrorCode::InvalidArgument, "--synthetic needs --root for the images");
        const SyntheticSpec spec = parse_synthetic_spec(o.synthetic);
        write_synthetic_corpus(spec, o.root);
      }
      return cmd_ingest(o, out, err);
    }
    if (extract->parsed()) return cmd_extract(o, out, err);
    if (train->parsed()) return cmd_train(o, out, err);
    if (query_cmd->parsed()) return cmd_query(o, out, err);
    if (weights->parsed()) return cmd_weights(o, out, err);
    if (evaluate->parsed()) return cmd_evaluate(o, out, err);
    if (export_cmd->parsed()) return cmd_export(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Internal ? 2 : 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace cbir
