#include "cbir/database.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <json.hpp>

#include "cbir/error.hpp"

namespace fs = std::filesystem;

namespace cbir {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'B', 'I', 'R'};
constexpr std::array<char, 4> kHeaderTag = {'H', 'E', 'A', 'D'};
constexpr std::array<char, 4> kRecordsTag = {'R', 'E', 'C', 'S'};
constexpr std::array<char, 4> kSplitTag = {'S', 'P', 'L', 'T'};
constexpr std::array<char, 4> kModelTag = {'M', 'O', 'D', 'L'};
constexpr std::size_t kPreambleSize = 8;  // magic + u16 + u16
constexpr std::size_t kTrailerSize = 4;

static_assert(std::endian::native == std::endian::little, "serializer assumes a little-endian host");

class Writer {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void tag(const std::array<char, 4>& t) { bytes_.insert(bytes_.end(), t.begin(), t.end()); }
  void str(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  template <typename T>
  void vec(const std::vector<T>& v) {
    put<std::uint32_t>(static_cast<std::uint32_t>(v.size()));
    for (const T& x : v) put<T>(x);
  }
  void section(const std::array<char, 4>& t, const Writer& payload) {
    tag(t);
    put<std::uint64_t>(payload.bytes_.size());
    bytes_.insert(bytes_.end(), payload.bytes_.begin(), payload.bytes_.end());
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::array<char, 4> tag() {
    need(4);
    std::array<char, 4> t;
    std::memcpy(t.data(), bytes_.data() + pos_, 4);
    pos_ += 4;
    return t;
  }
  std::string str() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  template <typename T>
  std::vector<T> vec() {
    const auto n = get<std::uint32_t>();
    need(static_cast<std::size_t>(n) * sizeof(T));
    std::vector<T> v(n);
    if (n) std::memcpy(v.data(), bytes_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (n > bytes_.size() - pos_) throw Error(ErrorCode::IoError, "database section is malformed");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

Writer encode_header(const DatabaseHeader& h) {
  Writer w;
  w.str(h.corpus_root);
  w.put<std::uint64_t>(h.seed);
  for (auto d : h.dims) w.put<std::uint32_t>(d);
  w.put<std::uint32_t>(h.cdh_lightness_levels);
  w.put<std::uint32_t>(h.cdh_chroma_levels);
  w.put<std::uint32_t>(h.cdh_orientation_bins);
  w.put<double>(h.cdh_chroma_threshold);
  w.put<std::int32_t>(h.lbp.neighbors);
  w.put<std::int32_t>(h.lbp.radius);
  for (double v : h.cld_weights.luma) w.put<double>(v);
  for (double v : h.cld_weights.cb) w.put<double>(v);
  for (double v : h.cld_weights.cr) w.put<double>(v);
  w.put<double>(h.eoh_threshold);
  w.put<std::uint8_t>(h.eoh_block_based ? 1 : 0);
  w.put<std::int64_t>(h.created_unix);
  w.put<std::uint8_t>(h.has_descriptors ? 1 : 0);
  w.put<std::uint32_t>(h.record_count);
  return w;
}

DatabaseHeader decode_header(Reader& r, std::uint16_t major, std::uint16_t minor) {
  DatabaseHeader h;
  h.version_major = major;
  h.version_minor = minor;
  h.corpus_root = r.str();
  h.seed = r.get<std::uint64_t>();
  for (auto& d : h.dims) d = r.get<std::uint32_t>();
  h.cdh_lightness_levels = r.get<std::uint32_t>();
  h.cdh_chroma_levels = r.get<std::uint32_t>();
  h.cdh_orientation_bins = r.get<std::uint32_t>();
  h.cdh_chroma_threshold = r.get<double>();
  h.lbp.neighbors = r.get<std::int32_t>();
  h.lbp.radius = r.get<std::int32_t>();
  for (double& v : h.cld_weights.luma) v = r.get<double>();
  for (double& v : h.cld_weights.cb) v = r.get<double>();
  for (double& v : h.cld_weights.cr) v = r.get<double>();
  h.eoh_threshold = r.get<double>();
  h.eoh_block_based = r.get<std::uint8_t>() != 0;
  h.created_unix = r.get<std::int64_t>();
  h.has_descriptors = r.get<std::uint8_t>() != 0;
  h.record_count = r.get<std::uint32_t>();
  return h;
}

Writer encode_records(const std::vector<FeatureRecord>& records) {
  Writer w;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(records.size()));
  for (const auto& rec : records) {
    w.put<std::uint32_t>(rec.id);
    w.str(rec.label);
    w.str(rec.path);
    for (Descriptor d : kAllDescriptors) w.vec(rec.descriptors.get(d));
  }
  return w;
}

std::vector<FeatureRecord> decode_records(Reader& r) {
  const auto n = r.get<std::uint32_t>();
  std::vector<FeatureRecord> records;
  records.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    FeatureRecord rec;
    rec.id = r.get<std::uint32_t>();
    rec.label = r.str();
    rec.path = r.str();
    for (Descriptor d : kAllDescriptors) rec.descriptors.get(d) = r.vec<double>();
    records.push_back(std::move(rec));
  }
  return records;
}

Writer encode_split(const SplitAssignment& split) {
  Writer w;
  w.put<std::uint64_t>(split.seed);
  w.vec(split.train_ids);
  w.vec(split.test_ids);
  return w;
}

SplitAssignment decode_split(Reader& r) {
  SplitAssignment split;
  split.seed = r.get<std::uint64_t>();
  split.train_ids = r.vec<std::uint32_t>();
  split.test_ids = r.vec<std::uint32_t>();
  return split;
}

Writer encode_model(const IndexModel& m) {
  Writer w;
  w.put<double>(m.config.c);
  w.put<std::int32_t>(m.config.epochs);
  w.put<std::uint64_t>(m.config.seed);
  w.put<std::uint64_t>(m.config.top_k);
  w.put<double>(m.test_accuracy);
  w.vec(m.scaler.min);
  w.vec(m.scaler.max);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.models.size()));
  for (const auto& c : m.models) {
    w.str(c.label);
    w.vec(c.weights);
    w.put<double>(c.bias);
  }
  return w;
}

IndexModel decode_model(Reader& r) {
  IndexModel m;
  m.config.c = r.get<double>();
  m.config.epochs = r.get<std::int32_t>();
  m.config.seed = r.get<std::uint64_t>();
  m.config.top_k = r.get<std::uint64_t>();
  m.test_accuracy = r.get<double>();
  m.scaler.min = r.vec<double>();
  m.scaler.max = r.vec<double>();
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    CategoryModel c;
    c.label = r.str();
    c.weights = r.vec<double>();
    c.bias = r.get<double>();
    m.models.push_back(std::move(c));
  }
  return m;
}

void validate(const FeatureDatabase& db) {
  if (db.header.record_count != db.records.size()) {
    throw Error(ErrorCode::ChecksumMismatch, "header declares " + std::to_string(db.header.record_count) +
                                                 " records, file holds " + std::to_string(db.records.size()));
  }
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    const auto& rec = db.records[i];
    if (rec.id != i) throw Error(ErrorCode::IoError, "record ids are not dense");
    if (!db.header.has_descriptors) continue;
    for (Descriptor d : kAllDescriptors) {
      if (rec.descriptors.get(d).size() != db.header.dims[static_cast<std::size_t>(d)]) {
        throw Error(ErrorCode::DimensionMismatch, "record " + std::to_string(i) + " " +
                                                      std::string(descriptor_name(d)) +
                                                      " does not match the header dimension");
      }
    }
  }
}

}  // namespace

DatabaseHeader make_header(const DescriptorConfig& config) {
  DatabaseHeader h;
  h.lbp = config.lbp;
  h.cld_weights = config.cld_weights;
  h.eoh_threshold = config.eoh_threshold;
  h.eoh_block_based = config.eoh_block_based;
  h.dims = {static_cast<std::uint32_t>(kCdhDims), static_cast<std::uint32_t>(1u << config.lbp.neighbors),
            static_cast<std::uint32_t>(kCldDims), static_cast<std::uint32_t>(config.eoh_block_based ? 80 : kEohDims)};
  return h;
}

DescriptorConfig descriptor_config(const DatabaseHeader& header) {
  DescriptorConfig config;
  config.lbp = header.lbp;
  config.cld_weights = header.cld_weights;
  config.eoh_threshold = header.eoh_threshold;
  config.eoh_block_based = header.eoh_block_based;
  return config;
}

void check_descriptor_constants(const DatabaseHeader& header) {
  const DatabaseHeader expected = make_header(descriptor_config(header));
  auto mismatch = [](const std::string& what) {
    throw Error(ErrorCode::ConfigMismatch, what + " differs from this build; re-run extraction");
  };
  if (header.lbp.neighbors < 1 || header.lbp.neighbors > 16 || header.lbp.radius < 1) mismatch("LBP parameters");
  if (header.dims != expected.dims) mismatch("descriptor dimensions");
  if (header.cdh_lightness_levels != expected.cdh_lightness_levels ||
      header.cdh_chroma_levels != expected.cdh_chroma_levels ||
      header.cdh_orientation_bins != expected.cdh_orientation_bins ||
      header.cdh_chroma_threshold != expected.cdh_chroma_threshold) {
    mismatch("CDH quantization");
  }
}

std::vector<std::uint8_t> serialize_database(const FeatureDatabase& db) {
  DatabaseHeader header = db.header;
  header.version_major = kFormatMajor;
  header.version_minor = kFormatMinor;
  header.record_count = static_cast<std::uint32_t>(db.records.size());

  Writer w;
  w.tag(kMagic);
  w.put<std::uint16_t>(header.version_major);
  w.put<std::uint16_t>(header.version_minor);
  w.section(kHeaderTag, encode_header(header));
  w.section(kRecordsTag, encode_records(db.records));
  if (db.split) w.section(kSplitTag, encode_split(*db.split));
  if (db.model) w.section(kModelTag, encode_model(*db.model));
  w.put<std::uint32_t>(crc_of(w.bytes()));
  return std::move(w.bytes());
}

FeatureDatabase deserialize_database(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw Error(ErrorCode::IoError, "not a feature database (bad magic)");
  }
  if (bytes.size() < kPreambleSize + kTrailerSize) throw Error(ErrorCode::ChecksumMismatch, "file is truncated");
  const auto body = bytes.first(bytes.size() - kTrailerSize);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), sizeof stored);
  if (stored != crc_of(body)) throw Error(ErrorCode::ChecksumMismatch, "CRC-32 does not match contents");

  Reader r(body);
  r.tag();
  const auto major = r.get<std::uint16_t>();
  const auto minor = r.get<std::uint16_t>();
  if (major != kFormatMajor) {
    throw Error(ErrorCode::FormatVersionMismatch,
                "file version " + std::to_string(major) + "." + std::to_string(minor) + ", expected major " +
                    std::to_string(kFormatMajor));
  }

  FeatureDatabase db;
  bool saw_header = false, saw_records = false;
  while (!r.done()) {
    const auto tag = r.tag();
    const auto length = r.get<std::uint64_t>();
    Reader section(r.take(static_cast<std::size_t>(length)));
    if (tag == kHeaderTag) {
      db.header = decode_header(section, major, minor);
      saw_header = true;
    } else if (tag == kRecordsTag) {
      db.records = decode_records(section);
      saw_records = true;
    } else if (tag == kSplitTag) {
      db.split = decode_split(section);
    } else if (tag == kModelTag) {
      db.model = decode_model(section);
    }
    // Unknown sections are skipped.
  }
  if (!saw_header || !saw_records) throw Error(ErrorCode::IoError, "missing header or records section");
  check_descriptor_constants(db.header);
  validate(db);
  return db;
}

std::vector<std::uint8_t> append_section(std::span<const std::uint8_t> bytes, const std::array<char, 4>& tag,
                                         std::span<const std::uint8_t> payload) {
  if (bytes.size() < kPreambleSize + kTrailerSize) throw Error(ErrorCode::ChecksumMismatch, "file is truncated");
  Writer w;
  w.bytes().assign(bytes.begin(), bytes.end() - kTrailerSize);
  w.tag(tag);
  w.put<std::uint64_t>(payload.size());
  w.bytes().insert(w.bytes().end(), payload.begin(), payload.end());
  w.put<std::uint32_t>(crc_of(w.bytes()));
  return std::move(w.bytes());
}

namespace {

class FileLock {
 public:
  explicit FileLock(const fs::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::IoError, "database is locked by another writer: " + path.string());
    }
  }
  ~FileLock() {
    ::unlink(path_.c_str());
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

}  // namespace

void save_database(const FeatureDatabase& db, const fs::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_database(db);
  FileLock lock(fs::path(path.string() + ".lock"));
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush()) throw Error(ErrorCode::IoError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot replace " + path.string() + ": " + ec.message());
}

FeatureDatabase load_database(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open database " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_database(bytes);
}

std::string export_json(const FeatureDatabase& db) {
  using nlohmann::json;
  const auto& h = db.header;
  json out;
  out["header"] = {
      {"version", std::to_string(h.version_major) + "." + std::to_string(h.version_minor)},
      {"corpus_root", h.corpus_root},
      {"seed", h.seed},
      {"dims", {{"cdh", h.dims[0]}, {"lbp", h.dims[1]}, {"cld", h.dims[2]}, {"eoh", h.dims[3]}}},
      {"cdh", {{"lightness_levels", h.cdh_lightness_levels},
               {"chroma_levels", h.cdh_chroma_levels},
               {"orientation_bins", h.cdh_orientation_bins},
               {"chroma_threshold", h.cdh_chroma_threshold}}},
      {"lbp", {{"neighbors", h.lbp.neighbors}, {"radius", h.lbp.radius}}},
      {"cld_weights", {{"y", h.cld_weights.luma}, {"cb", h.cld_weights.cb}, {"cr", h.cld_weights.cr}}},
      {"eoh_threshold", h.eoh_threshold},
      {"eoh_block_based", h.eoh_block_based},
      {"created_unix", h.created_unix},
      {"has_descriptors", h.has_descriptors},
      {"record_count", db.records.size()},
  };
  json records = json::array();
  for (const auto& r : db.records) {
    records.push_back({{"id", r.id},
                       {"label", r.label},
                       {"path", r.path},
                       {"cdh", r.descriptors.cdh},
                       {"lbp", r.descriptors.lbp},
                       {"cld", r.descriptors.cld},
                       {"eoh", r.descriptors.eoh}});
  }
  out["records"] = std::move(records);
  if (db.split) out["split"] = {{"seed", db.split->seed}, {"train", db.split->train_ids}, {"test", db.split->test_ids}};
  if (db.model) {
    json models = json::array();
    for (const auto& m : db.model->models) models.push_back({{"label", m.label}, {"weights", m.weights}, {"bias", m.bias}});
    out["model"] = {{"c", db.model->config.c},
                    {"epochs", db.model->config.epochs},
                    {"seed", db.model->config.seed},
                    {"top_k", db.model->config.top_k},
                    {"test_accuracy", db.model->test_accuracy},
                    {"scaler_min", db.model->scaler.min},
                    {"scaler_max", db.model->scaler.max},
                    {"categories", std::move(models)}};
  }
  return out.dump(2) + "\n";
}

}  // namespace cbir
