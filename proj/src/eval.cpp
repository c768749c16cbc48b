#include "cbir/eval.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "cbir/error.hpp"
#include "cbir/parallel.hpp"
#include "format.hpp"
#include "random.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace cbir {

std::vector<std::uint32_t> sample_queries(const SplitAssignment& split, std::size_t n, std::uint64_t seed) {
  std::vector<std::uint32_t> ids = split.test_ids;
  std::mt19937_64 rng(seed);
  detail::shuffle(ids, rng);
  ids.resize(std::min(n, ids.size()));
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

struct QueryOutcome {
  std::vector<PRCurve> curves;  // one per configuration
  std::size_t pool_size = 0;
  std::string weights;
};

std::string weights_field(const WeightVector& w) {
  std::string out;
  for (std::size_t f = 0; f < kDescriptorCount; ++f) out += (f ? ";" : "") + detail::fixed(w.values()[f], 6);
  return out;
}

}  // namespace

ExperimentReport batch_evaluate(const std::vector<FeatureRecord>& records, const IndexModel& model,
                                const SplitAssignment& split, const EvalConfig& config) {
  config.feedback.validate();
  ExperimentReport report;
  report.dataset = config.dataset;
  if (config.single) {
    for (Descriptor d : kAllDescriptors) report.configurations.emplace_back(descriptor_name(d));
  }
  if (config.combined) report.configurations.emplace_back(kCombinedName);
  report.query_ids = sample_queries(split, config.n_queries, config.seed);

  for (MetricId metric_id : config.metrics) {
    const Metric metric{metric_id, config.as_printed};
    std::vector<QueryOutcome> outcomes(report.query_ids.size());

    parallel_for(report.query_ids.size(), [&](std::size_t q) {
      const std::uint32_t qid = report.query_ids[q];
      const FeatureRecord& query = records.at(qid);
      RelevantSet relevant;
      for (const auto& r : records) {
        if (r.id != qid && r.label == query.label) relevant.insert(r.id);
      }

      const std::vector<std::uint32_t> ids =
          candidate_ids(records, &model, query.descriptors, qid, config.prune, config.top_k, nullptr);
      QueryOutcome& out = outcomes[q];
      if (ids.empty()) {
        // Nothing survives pruning: every curve is flat zero.
        out.curves.assign(report.configurations.size(), pr_curve({}, relevant));
        return;
      }
      const CandidatePool pool = build_pool(query.descriptors, records, ids, metric);
      out.pool_size = pool.size();
      if (config.single) {
        for (Descriptor d : kAllDescriptors) {
          out.curves.push_back(pr_curve(ids_in_order(pool, rank_pool_single(pool, d)), relevant));
        }
      }
      if (config.combined) {
        const FeedbackContext ctx = make_feedback_context(pool, query.label, config.feedback);
        const WeightingResult learned = optimize_weights(ctx, config.method);
        out.weights = weights_field(learned.weights);
        out.curves.push_back(pr_curve(ids_in_order(pool, rank_pool(pool, learned.weights)), relevant));
      }
    });

    MetricResult result;
    result.metric = metric_id;
    for (std::size_t c = 0; c < report.configurations.size(); ++c) {
      std::vector<PRCurve> per_query;
      per_query.reserve(outcomes.size());
      for (const auto& o : outcomes) per_query.push_back(o.curves[c]);
      result.curves.push_back(average_curves(per_query));
      result.aucs.push_back(result.curves.back().auc);
    }
    report.results.push_back(std::move(result));

    for (std::size_t q = 0; q < outcomes.size(); ++q) {
      for (std::size_t c = 0; c < report.configurations.size(); ++c) {
        PerQueryRow row;
        row.query_id = report.query_ids[q];
        row.label = records[row.query_id].label;
        row.metric = metric_id;
        row.configuration = report.configurations[c];
        row.auc = outcomes[q].curves[c].auc;
        row.pool_size = outcomes[q].pool_size;
        if (report.configurations[c] == kCombinedName) row.weights = outcomes[q].weights;
        report.per_query.push_back(std::move(row));
      }
    }
  }
  return report;
}

std::string auc_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "dataset,metric";
  for (const auto& c : report.configurations) os << ',' << c;
  os << '\n';
  for (const auto& r : report.results) {
    os << report.dataset << ',' << metric_label(r.metric);
    for (double auc : r.aucs) os << ',' << detail::fixed(auc, 4);
    os << '\n';
  }
  return os.str();
}

std::string per_query_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "query_id,label,metric,configuration,auc,pool_size,weights\n";
  for (const auto& r : report.per_query) {
    os << r.query_id << ',' << r.label << ',' << metric_label(r.metric) << ',' << r.configuration << ','
       << detail::fixed(r.auc, 6) << ',' << r.pool_size << ',' << r.weights << '\n';
  }
  return os.str();
}

std::string pr_curves_svg(const ExperimentReport& report) {
  constexpr int panel = 320, margin = 48, legend = 110;
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#000000", "#9467bd", "#8c564b"};
  const std::size_t panels = std::max<std::size_t>(1, report.results.size());
  const int width = static_cast<int>(panels) * (panel + 2 * margin + legend);
  const int height = panel + 2 * margin;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels; ++p) {
    const int ox = static_cast<int>(p) * (panel + 2 * margin + legend) + margin;
    const int oy = margin;
    auto px = [&](double recall) { return detail::fixed(ox + recall * panel, 2); };
    auto py = [&](double precision) { return detail::fixed(oy + (1.0 - precision) * panel, 2); };

    std::string title = report.dataset;
    if (p < report.results.size()) title += " " + std::string(metric_label(report.results[p].metric));
    os << "<g>\n";
    os << "<text x=\"" << ox + panel / 2 << "\" y=\"" << oy - 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << detail::xml_escape(title)
       << "</text>\n";
    os << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << panel << "\" height=\"" << panel
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int t = 0; t <= 10; t += 2) {
      const double v = t / 10.0;
      os << "<text x=\"" << px(v) << "\" y=\"" << oy + panel + 14
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << detail::fixed(v, 1)
         << "</text>\n";
      os << "<text x=\"" << ox - 6 << "\" y=\"" << py(v)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << detail::fixed(v, 1)
         << "</text>\n";
    }
    os << "<text x=\"" << ox + panel / 2 << "\" y=\"" << oy + panel + 32
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">Recall</text>\n";
    os << "<text x=\"" << ox - 34 << "\" y=\"" << oy + panel / 2 << "\" transform=\"rotate(-90 " << ox - 34 << ' '
       << oy + panel / 2 << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">Precision</text>\n";

    if (p < report.results.size()) {
      const auto& r = report.results[p];
      for (std::size_t c = 0; c < r.curves.size(); ++c) {
        const char* color = colors[c % std::size(colors)];
        os << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < r.curves[c].recall.size(); ++j) {
          os << (j ? " " : "") << px(r.curves[c].recall[j]) << ',' << py(r.curves[c].precision[j]);
        }
        os << "\"/>\n";
        const int ly = oy + 14 + static_cast<int>(c) * 16;
        os << "<g class=\"legend-entry\"><line x1=\"" << ox + panel + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
           << ox + panel + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
           << "<text x=\"" << ox + panel + 34 << "\" y=\"" << ly
           << "\" font-family=\"sans-serif\" font-size=\"11\">"
           << detail::xml_escape(report.configurations[c]) << " (" << detail::fixed(r.aucs[c], 3) << ")</text></g>\n";
      }
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    fields.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return fields;
}

}  // namespace

void emit_report(const ExperimentReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  write_text(out_dir / "auc.csv", auc_csv(report));
  write_text(out_dir / "per_query.csv", per_query_csv(report));
  write_text(out_dir / "pr_curves.svg", pr_curves_svg(report));
}

std::vector<AucCsvRow> parse_auc_csv(const std::string& text, std::vector<std::string>* header) {
  std::istringstream in(text);
  std::string line;
  std::vector<AucCsvRow> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (first) {
      if (header) header->assign(fields.begin() + std::min<std::size_t>(2, fields.size()), fields.end());
      first = false;
      continue;
    }
    if (fields.size() < 2) throw Error(ErrorCode::InvalidArgument, "malformed AUC row: " + line);
    AucCsvRow row{fields[0], fields[1], {}};
    for (std::size_t i = 2; i < fields.size(); ++i) row.aucs.push_back(std::stod(fields[i]));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cbir
