#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cbir/cli.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cbir::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// One synthetic pipeline shared by the tests below.
const fs::path& pipeline_dir() {
  static const fs::path dir = [] {
    const fs::path d = cbir::fixture::scratch_dir("cli_pipeline");
    const std::string db = (d / "db.bin").string();
    EXPECT_EQ(cli({"ingest", "--root", (d / "corpus").string(), "--db", db, "--synthetic", "classes=4",
                   "per-class=20", "seed=1"})
                  .code,
              0);
    EXPECT_EQ(cli({"extract", "--db", db}).code, 0);
    EXPECT_EQ(cli({"train", "--db", db}).code, 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST(Cli, HelpExitsZero) {
  const CliRun r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"ingest", "extract", "train", "query", "weights", "evaluate", "export"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
  const CliRun sub = cli({"query", "--help"});
  EXPECT_EQ(sub.code, 0);
  EXPECT_NE(sub.out.find("--metric"), std::string::npos);
}

TEST(Cli, UserErrorsExitOne) {
  const CliRun unknown = cli({"frobnicate"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_TRUE(unknown.out.empty());
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"train", "--db"}).code, 1);
  const CliRun missing = cli({"train", "--db", "/nonexistent/db.bin"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("IoError"), std::string::npos);
}

TEST(Cli, PipelineProducesReport) {
  const fs::path& d = pipeline_dir();
  const std::string db = (d / "db.bin").string();
  const CliRun eval = cli({"evaluate", "--db", db, "--out", (d / "report").string()});
  EXPECT_EQ(eval.code, 0) << eval.err;
  for (const char* f : {"auc.csv", "per_query.csv", "pr_curves.svg"}) EXPECT_TRUE(fs::exists(d / "report" / f));
  EXPECT_EQ(eval.out, slurp(d / "report" / "auc.csv"));
  EXPECT_NE(eval.err.find("warning"), std::string::npos);  // --n 50 exceeds the test set
}

TEST(Cli, QueryWeightsAndExport) {
  const fs::path& d = pipeline_dir();
  const std::string db = (d / "db.bin").string();
  const CliRun q = cli({"query", "--db", db, "--id", "3", "--metric", "chisq", "--auto", "ratio", "--topn", "5",
                     "--svg", (d / "sheet.svg").string()});
  ASSERT_EQ(q.code, 0) << q.err;
  EXPECT_EQ(std::count(q.out.begin(), q.out.end(), '\n'), 6);
  EXPECT_NE(slurp(d / "sheet.svg").find("data:image/png;base64,"), std::string::npos);

  const CliRun ext = cli({"query", "--db", db, "--image", (d / "corpus" / "c01_texture" / "000.png").string(),
                       "--weights", "1,1,1,1", "--no-prune", "--out", (d / "ranked.csv").string()});
  ASSERT_EQ(ext.code, 0) << ext.err;
  EXPECT_NE(slurp(d / "ranked.csv").find("\n1,20,c01_texture,0.00000000"), std::string::npos);

  const CliRun w = cli({"weights", "--db", db, "--id", "3", "--method", "meandiff", "--trace",
                     (d / "trace.csv").string()});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NE(w.out.find("descriptor,weight,percent"), std::string::npos);
  EXPECT_EQ(slurp(d / "trace.csv").rfind("iteration,w_cdh,w_lbp,w_cld,w_eoh,AUC", 0), 0u);

  const CliRun j = cli({"export", "--json", "--db", db});
  ASSERT_EQ(j.code, 0);
  EXPECT_NE(j.out.find("\"records\""), std::string::npos);

  EXPECT_EQ(cli({"query", "--db", db, "--id", "3", "--metric", "cosine"}).code, 1);
  EXPECT_EQ(cli({"query", "--db", db, "--id", "3", "--weights", "1,1", "--no-prune"}).code, 1);
  EXPECT_EQ(cli({"weights", "--db", db, "--id", "3", "--if", "0.5"}).code, 1);
}

TEST(Cli, SubcommandsAreIdempotent) {
  const fs::path& d = pipeline_dir();
  const fs::path copy = cbir::fixture::scratch_dir("cli_idem");
  const std::string db = (copy / "db.bin").string();
  ASSERT_EQ(cli({"ingest", "--root", (d / "corpus").string(), "--db", db}).code, 0);
  const std::string first = slurp(db);
  ASSERT_EQ(cli({"ingest", "--root", (d / "corpus").string(), "--db", db}).code, 0);
  EXPECT_EQ(first, slurp(db));
  ASSERT_EQ(cli({"extract", "--db", db}).code, 0);
  ASSERT_EQ(cli({"train", "--db", db}).code, 0);
  EXPECT_EQ(slurp(db), slurp(d / "db.bin"));
  for (int i = 0; i < 2; ++i) {
    ASSERT_EQ(cli({"evaluate", "--db", db, "--n", "12", "--out", (copy / ("r" + std::to_string(i))).string()}).code,
              0);
  }
  EXPECT_EQ(slurp(copy / "r0" / "auc.csv"), slurp(copy / "r1" / "auc.csv"));
  EXPECT_EQ(slurp(copy / "r0" / "pr_curves.svg"), slurp(copy / "r1" / "pr_curves.svg"));
}

TEST(Cli, PruningWithoutModelIsUserError) {
  const fs::path d = cbir::fixture::scratch_dir("cli_nomodel");
  const std::string db = (d / "db.bin").string();
  ASSERT_EQ(cli({"ingest", "--root", (pipeline_dir() / "corpus").string(), "--db", db}).code, 0);
  EXPECT_EQ(cli({"query", "--db", db, "--id", "0"}).code, 1);  // no descriptors yet
  ASSERT_EQ(cli({"extract", "--db", db}).code, 0);
  const CliRun r = cli({"query", "--db", db, "--id", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("train"), std::string::npos);
}
