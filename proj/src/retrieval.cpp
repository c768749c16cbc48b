#include "cbir/retrieval.hpp"

#include <algorithm>
#include <sstream>

#include "cbir/error.hpp"
#include "format.hpp"
#include "svg.hpp"

namespace cbir {

std::vector<std::uint32_t> candidate_ids(const std::vector<FeatureRecord>& records, const IndexModel* model,
                                         const DescriptorSet& query, std::optional<std::uint32_t> query_id,
                                         bool prune, std::size_t top_k, std::vector<CategoryScore>* categories) {
  if (!prune) {
    std::vector<std::uint32_t> ids;
    ids.reserve(records.size());
    for (const auto& r : records) {
      if (!query_id || r.id != *query_id) ids.push_back(r.id);
    }
    return ids;
  }
  if (!model) throw Error(ErrorCode::InvalidArgument, "pruning needs a trained index model");
  std::vector<CategoryScore> top = predict_top_categories(*model, query, top_k);
  std::vector<std::string> labels;
  for (const auto& c : top) labels.push_back(c.label);
  if (categories) *categories = std::move(top);
  return reduce_search_space(records, labels, query_id);
}

RankedList rank_candidates(const CandidatePool& pool, const WeightVector& weights,
                           std::optional<std::uint32_t> query_id) {
  RankedList list;
  list.query_id = query_id;
  list.weights = weights;
  list.metric = pool.metric;
  list.pool_size = pool.size();
  for (std::size_t i : rank_pool(pool, weights)) {
    RankedEntry e;
    e.id = pool.ids[i];
    e.combined = combined_distance(pool, i, weights);
    e.per_descriptor = pool.normalized_at(i);
    e.label = pool.labels[i];
    list.entries.push_back(std::move(e));
  }
  return list;
}

QueryResult query(const std::vector<FeatureRecord>& records, const IndexModel* model, const QuerySource& source,
                  const QueryOptions& options) {
  std::optional<std::uint32_t> query_id;
  const DescriptorSet* descriptors = nullptr;
  std::optional<std::string> label;
  if (const auto* id = std::get_if<std::uint32_t>(&source)) {
    if (*id >= records.size()) throw Error(ErrorCode::InvalidArgument, "unknown query id " + std::to_string(*id));
    query_id = *id;
    descriptors = &records[*id].descriptors;
    label = records[*id].label;
  } else {
    const auto& external = std::get<ExternalQuery>(source);
    descriptors = &external.descriptors;
    label = external.label;
  }

  QueryResult result;
  const std::vector<std::uint32_t> ids =
      candidate_ids(records, model, *descriptors, query_id, options.prune, options.top_k, &result.categories);
  const CandidatePool pool = build_pool(*descriptors, records, ids, options.metric);

  WeightVector weights;
  if (options.auto_method) {
    const FeedbackContext ctx = make_feedback_context(pool, label, options.feedback);
    result.weighting = optimize_weights(ctx, *options.auto_method);
    weights = result.weighting->weights;
  } else if (options.weights) {
    weights = options.weights->normalized_copy();
  }

  result.ranked = rank_candidates(pool, weights, query_id);
  if (result.ranked.entries.size() > options.top_n) result.ranked.entries.resize(options.top_n);
  return result;
}

std::string ranked_list_csv(const RankedList& list) {
  std::ostringstream os;
  os << "rank,id,label,combined,d_cdh,d_lbp,d_cld,d_eoh\n";
  for (std::size_t r = 0; r < list.entries.size(); ++r) {
    const auto& e = list.entries[r];
    os << r + 1 << ',' << e.id << ',' << e.label << ',' << detail::fixed(e.combined, 8);
    for (double d : e.per_descriptor) os << ',' << detail::fixed(d, 8);
    os << '\n';
  }
  return os.str();
}

std::string contact_sheet_svg(const RankedList& list, const std::vector<FeatureRecord>& records,
                              const std::optional<std::string>& query_label,
                              const std::optional<std::filesystem::path>& query_image) {
  constexpr int thumb = 96, pad = 12, border = 4;
  const int cell = thumb + 2 * border + pad;
  const int columns = static_cast<int>(list.entries.size()) + 1;
  const int width = pad + columns * cell;
  const int height = pad + cell + 20;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto tile = [&](int column, const std::optional<std::filesystem::path>& path, const std::string& stroke,
                  const std::string& caption) {
    const int x = pad + column * cell, y = pad;
    os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << thumb + 2 * border << "\" height=\""
       << thumb + 2 * border << "\" fill=\"" << stroke << "\"/>\n";
    const auto uri = path ? detail::thumbnail_data_uri(*path, thumb) : std::nullopt;
    if (uri) {
      os << "<image x=\"" << x + border << "\" y=\"" << y + border << "\" width=\"" << thumb << "\" height=\""
         << thumb << "\" preserveAspectRatio=\"xMidYMid meet\" href=\"" << *uri << "\"/>\n";
    } else {
      os << "<rect x=\"" << x + border << "\" y=\"" << y + border << "\" width=\"" << thumb << "\" height=\""
         << thumb << "\" fill=\"#dddddd\"/>\n";
    }
    os << "<text x=\"" << x << "\" y=\"" << y + thumb + 2 * border + 14
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(caption) << "</text>\n";
  };

  std::optional<std::filesystem::path> qpath = query_image;
  if (!qpath && list.query_id && *list.query_id < records.size()) qpath = records[*list.query_id].path;
  tile(0, qpath, "#1565c0", "query");
  for (std::size_t r = 0; r < list.entries.size(); ++r) {
    const auto& e = list.entries[r];
    std::string stroke = "#9e9e9e";
    if (query_label) stroke = e.label == *query_label ? "#2e7d32" : "#c62828";
    const std::optional<std::filesystem::path> path =
        e.id < records.size() ? std::optional<std::filesystem::path>(records[e.id].path) : std::nullopt;
    tile(static_cast<int>(r) + 1, path, stroke, std::to_string(r + 1) + ". " + e.label);
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cbir
