#include "cbir/pipeline.hpp"

#include "cbir/error.hpp"
#include "cbir/parallel.hpp"

namespace cbir {

FeatureDatabase ingest_database(const std::filesystem::path& root, std::uint64_t seed, std::int64_t created_unix,
                                IngestReport* report) {
  IngestReport scanned = ingest_corpus(root);
  FeatureDatabase db;
  db.header = make_header(DescriptorConfig{});
  db.header.corpus_root = root.string();
  db.header.seed = seed;
  db.header.created_unix = created_unix;
  std::vector<std::string> labels;
  for (const auto& rec : scanned.records) {
    db.records.push_back({rec.id, rec.label, rec.path.string(), {}});
    labels.push_back(rec.label);
  }
  db.header.record_count = static_cast<std::uint32_t>(db.records.size());
  db.split = make_split(labels, seed);
  if (report) {
    for (auto& rec : scanned.records) rec.pixels = Image();
    *report = std::move(scanned);
  }
  return db;
}

void extract_descriptors(FeatureDatabase& db, const DescriptorConfig& config) {
  parallel_for(db.records.size(), [&](std::size_t i) {
    db.records[i].descriptors = compute_all(load_and_resize(db.records[i].path), config);
  });
  DatabaseHeader header = make_header(config);
  header.corpus_root = db.header.corpus_root;
  header.seed = db.header.seed;
  header.created_unix = db.header.created_unix;
  header.has_descriptors = true;
  header.record_count = static_cast<std::uint32_t>(db.records.size());
  db.header = header;
  db.model.reset();
}

const IndexModel& train_database(FeatureDatabase& db, const TrainConfig& config) {
  if (!db.header.has_descriptors) throw Error(ErrorCode::InvalidArgument, "database has no descriptors yet");
  if (!db.split) throw Error(ErrorCode::InvalidArgument, "database has no train/test split");
  db.model = train_index(db.records, *db.split, config);
  return *db.model;
}

}  // namespace cbir
