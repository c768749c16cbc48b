#include <cstring>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>
#include <zlib.h>

#include "cbir/database.hpp"
#include "cbir/error.hpp"
#include "fixtures.hpp"

using namespace cbir;

namespace {

FeatureDatabase sample_database() {
  FeatureDatabase db;
  db.header = make_header(DescriptorConfig{});
  db.header.corpus_root = "corpus/root";
  db.header.seed = 1234;
  db.header.created_unix = 1700000000;
  db.header.has_descriptors = true;
  db.records = fixture::separable_records(3, 6);
  db.header.record_count = static_cast<std::uint32_t>(db.records.size());
  db.split = make_split(record_labels(db.records), 1234);
  db.model = train_index(db.records, *db.split, TrainConfig{0.5, 20, 9, 2});
  return db;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

void reseal(std::vector<std::uint8_t>& bytes) {
  const auto crc = static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(bytes.size() - 4)));
  std::memcpy(bytes.data() + bytes.size() - 4, &crc, 4);
}

}  // namespace

TEST(Database, RoundTripIsBitwiseEqual) {
  const FeatureDatabase db = sample_database();
  const auto bytes = serialize_database(db);
  const FeatureDatabase back = deserialize_database(bytes);
  EXPECT_TRUE(back == db);
  EXPECT_EQ(serialize_database(back), bytes);
  EXPECT_EQ(std::memcmp(bytes.data(), "CBIR", 4), 0);
}

TEST(Database, SaveLoadFile) {
  const auto dir = fixture::scratch_dir("db_file");
  const FeatureDatabase db = sample_database();
  save_database(db, dir / "db.bin");
  EXPECT_TRUE(load_database(dir / "db.bin") == db);
  EXPECT_FALSE(std::filesystem::exists(dir / "db.bin.tmp"));
  EXPECT_EQ(code_of([&] { load_database(dir / "missing.bin"); }), ErrorCode::IoError);
}

TEST(Database, WithoutOptionalSections) {
  FeatureDatabase db;
  db.records = {FeatureRecord{0, "a", "a/0.png", {}}, FeatureRecord{1, "b", "b/0.png", {}}};
  db.header.record_count = 2;
  EXPECT_TRUE(deserialize_database(serialize_database(db)) == db);
}

TEST(Database, TruncatedOrCorruptedFileFailsChecksum) {
  const auto bytes = serialize_database(sample_database());
  for (std::size_t keep : {bytes.size() - 1, bytes.size() / 2, std::size_t{10}}) {
    const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + keep);
    EXPECT_EQ(code_of([&] { deserialize_database(cut); }), ErrorCode::ChecksumMismatch) << keep;
  }
  auto flipped = bytes;
  flipped[bytes.size() / 3] ^= 0x40;
  EXPECT_EQ(code_of([&] { deserialize_database(flipped); }), ErrorCode::ChecksumMismatch);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(code_of([&] { deserialize_database(magic); }), ErrorCode::IoError);
}

TEST(Database, MajorVersionChecked) {
  auto bytes = serialize_database(sample_database());
  const std::uint16_t major = kFormatMajor + 1;
  std::memcpy(bytes.data() + 4, &major, 2);
  reseal(bytes);
  EXPECT_EQ(code_of([&] { deserialize_database(bytes); }), ErrorCode::FormatVersionMismatch);
  const std::uint16_t minor = kFormatMinor + 3;
  std::memcpy(bytes.data() + 4, &kFormatMajor, 2);
  std::memcpy(bytes.data() + 6, &minor, 2);
  reseal(bytes);
  EXPECT_NO_THROW(deserialize_database(bytes));
}

TEST(Database, UnknownTrailingSectionIgnored) {
  const FeatureDatabase db = sample_database();
  const std::vector<std::uint8_t> payload{1, 2, 3, 4, 5, 6, 7};
  const auto extended = append_section(serialize_database(db), {'X', 'T', 'R', 'A'}, payload);
  EXPECT_TRUE(deserialize_database(extended) == db);
}

TEST(Database, DescriptorConstantsChecked) {
  FeatureDatabase db = sample_database();
  db.header.cdh_lightness_levels = 8;
  EXPECT_EQ(code_of([&] { deserialize_database(serialize_database(db)); }), ErrorCode::ConfigMismatch);
  db = sample_database();
  db.header.dims[0] = 100;
  EXPECT_EQ(code_of([&] { deserialize_database(serialize_database(db)); }), ErrorCode::ConfigMismatch);
  db = sample_database();
  db.records[2].descriptors.eoh.pop_back();
  EXPECT_EQ(code_of([&] { deserialize_database(serialize_database(db)); }), ErrorCode::DimensionMismatch);
}

TEST(Database, HeaderRoundTripsDescriptorConfig) {
  DescriptorConfig config;
  config.eoh_threshold = 20;
  config.eoh_block_based = true;
  config.lbp = {8, 2};
  const DatabaseHeader h = make_header(config);
  EXPECT_EQ(h.dims[3], 80u);
  const DescriptorConfig back = descriptor_config(h);
  EXPECT_EQ(back.eoh_threshold, 20);
  EXPECT_TRUE(back.eoh_block_based);
  EXPECT_EQ(back.lbp, config.lbp);
}

TEST(Database, JsonExport) {
  const FeatureDatabase db = sample_database();
  const auto j = nlohmann::json::parse(export_json(db));
  EXPECT_EQ(j["header"]["seed"], 1234);
  EXPECT_EQ(j["header"]["dims"]["cdh"], 108);
  EXPECT_EQ(j["records"].size(), db.records.size());
  EXPECT_EQ(j["records"][0]["label"], db.records[0].label);
}
