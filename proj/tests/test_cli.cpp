#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mtscore/cli.hpp"
#include "mtscore/tsv.hpp"
#include "support/synthetic.hpp"

using namespace mtscore;
namespace fs = std::filesystem;

namespace {

// Fresh directory per test case, removed afterwards.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("mtscore_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run(std::vector<std::string> args) {
  args.insert(args.begin(), {"mtscore", "--log-level", "off"});
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

const char* kConfig =
    "encoder.dim = 8\n"
    "encoder.layers = 1\n"
    "encoder.heads = 2\n"
    "encoder.ff_dim = 16\n"
    "encoder.vocab_size = 128\n"
    "train.epochs = 1\n"
    "train.batch_size = 4\n"
    "ranker.lr = 0.001\n"
    "estimator.lr_head = 0.001\n"
    "estimator.lr_encoder = 0.0001\n";

std::string da_text() {
  std::string s = "lang-pair\tseg-id\tsystem\tsrc\thyp\tref\tda-score\n";
  const char* systems[] = {"A", "B", "C"};
  const int scores[3][4] = {{90, 80, 85, 70}, {50, 40, 60, 30}, {10, 45, 20, 5}};
  for (int seg = 0; seg < 4; ++seg) {
    for (int k = 0; k < 3; ++k) {
      s += "de-en\t" + std::to_string(seg + 1) + "\t" + systems[k] + "\tdas haus " +
           std::to_string(seg) + "\tthe house " + systems[k] + " " + std::to_string(seg) +
           "\tthe house " + std::to_string(seg) + "\t" + std::to_string(scores[k][seg]) + "\n";
    }
  }
  return s;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}) == kExitUsage);
  CHECK(run({"frobnicate"}) == kExitUsage);
  CHECK(run({"hter", "--data", "x.tsv"}) == kExitUsage);
  CHECK(run({"--threads", "0", "hter", "--data", "a", "--out", "b"}) == kExitUsage);
  CHECK(run({"evaluate", "--darr", "d", "--out", "o"}) == kExitUsage);
  CHECK(run({"evaluate", "--darr", "d", "--out", "o", "--metric", "bleu", "--scores", "s"}) == kExitUsage);
  CHECK(run({"evaluate", "--darr", "d", "--out", "o", "--metric", "meteor"}) == kExitUsage);
}

TEST_CASE("data errors exit with 1") {
  TempDir dir;
  CHECK(run({"hter", "--data", dir / "missing.tsv", "--out", dir / "o.tsv"}) == kExitDataError);
  write_file(dir / "bad.tsv", "src\thyp\tref\tpe\na\tb\tc\n");
  CHECK(run({"hter", "--data", dir / "bad.tsv", "--out", dir / "o.tsv"}) == kExitDataError);
  CHECK_FALSE(fs::exists(dir / "o.tsv"));
  write_file(dir / "cfg", "encoder.depth = 2\n");
  write_file(dir / "d.tsv", "src\thyp\tref\tscore\na\tb\tc\t0.5\n");
  CHECK(run({"train-estimator", "--config", dir / "cfg", "--data", dir / "d.tsv", "--out", dir / "m"}) ==
        kExitDataError);
  CHECK(run({"score", "--model", dir / "nope.ckpt", "--data", dir / "d.tsv", "--out", dir / "o"}) ==
        kExitDataError);
}

TEST_CASE("hter and mqm-score write eval tuples") {
  TempDir dir;
  write_file(dir / "pe.tsv", "src\thyp\tref\tpe\ns\ta b\tr\tb a\ns\tx y z\tr\tx y z\n");
  REQUIRE(run({"hter", "--data", dir / "pe.tsv", "--out", dir / "h.tsv"}) == kExitOk);
  CHECK(slurp(dir / "h.tsv") == "src\thyp\tref\tscore\ns\ta b\tr\t0.5\ns\tx y z\tr\t0\n");
  REQUIRE(run({"hter", "--no-shifts", "--data", dir / "pe.tsv", "--out", dir / "h2.tsv"}) == kExitOk);
  CHECK(slurp(dir / "h2.tsv") == "src\thyp\tref\tscore\ns\ta b\tr\t1\ns\tx y z\tr\t0\n");

  write_file(dir / "mqm.tsv", "src\thyp\tref\tminor\tmajor\tcritical\ns\ta b c d\tr\t0\t0\t0\n");
  REQUIRE(run({"mqm-score", "--data", dir / "mqm.tsv", "--out", dir / "m.tsv"}) == kExitOk);
  const auto t = io::parse_eval_tuples(io::read_table(fs::path(dir / "m.tsv")));
  REQUIRE(t.size() == 1);
  CHECK(t[0].score == doctest::Approx(1.0));
}

TEST_CASE("darr-convert, evaluate with a baseline metric") {
  TempDir dir;
  write_file(dir / "da.tsv", da_text());
  REQUIRE(run({"darr-convert", "--data", dir / "da.tsv", "--out", dir / "darr.tsv"}) == kExitOk);
  const auto pairs = io::parse_darr(io::read_table(fs::path(dir / "darr.tsv")));
  // Gaps above 25: seg1 A>B, A>C, B>C; seg2 A>B, A>C; seg3 A>C, B>C; seg4 A>B, A>C.
  CHECK(pairs.size() == 9);
  REQUIRE(run({"darr-convert", "--threshold", "100", "--data", dir / "da.tsv", "--out",
               dir / "none.tsv"}) == kExitOk);
  CHECK(io::read_table(fs::path(dir / "none.tsv")).rows.empty());

  REQUIRE(run({"evaluate", "--metric", "chrf", "--darr", dir / "darr.tsv", "--top-n", "2",
               "--da", dir / "da.tsv", "--out", dir / "r.tsv"}) == kExitOk);
  const auto report = io::parse_report(io::read_table(fs::path(dir / "r.tsv")));
  REQUIRE(report.find("de-en", "all") != nullptr);
  CHECK(report.find("de-en", "all")->concordant + report.find("de-en", "all")->discordant == 9);
  REQUIRE(report.find("de-en", "top2") != nullptr);
  CHECK(report.find("de-en", "top2")->concordant + report.find("de-en", "top2")->discordant == 3);
  CHECK(run({"evaluate", "--metric", "bleu", "--darr", dir / "darr.tsv", "--top-n", "1", "--out",
             dir / "r2.tsv"}) == kExitUsage);
}

TEST_CASE("train, score and evaluate a ranker end to end") {
  TempDir dir;
  write_file(dir / "cfg", kConfig);
  const auto pairs = testing::as_darr(testing::reference_separable(2, 12), {"de-en"});
  io::write_table(fs::path(dir / "train.tsv"), io::darr_table(pairs));

  REQUIRE(run({"train-ranker", "--config", dir / "cfg", "--data", dir / "train.tsv", "--out",
               dir / "a.ckpt"}) == kExitOk);
  REQUIRE(run({"--threads", "2", "train-ranker", "--config", dir / "cfg", "--data", dir / "train.tsv",
               "--out", dir / "b.ckpt"}) == kExitOk);
  CHECK(slurp(dir / "a.ckpt") == slurp(dir / "b.ckpt"));

  std::vector<EvalTuple> rows;
  for (const auto& p : pairs) {
    rows.push_back({p.quad.source, p.quad.better, p.quad.reference, 0});
    rows.push_back({p.quad.source, p.quad.worse, p.quad.reference, 0});
  }
  io::write_table(fs::path(dir / "in.tsv"), io::eval_tuples_table(rows));
  REQUIRE(run({"score", "--model", dir / "a.ckpt", "--data", dir / "in.tsv", "--out", dir / "s1.tsv"}) ==
          kExitOk);
  REQUIRE(run({"--threads", "3", "score", "--model", dir / "a.ckpt", "--data", dir / "in.tsv", "--out",
               dir / "s2.tsv"}) == kExitOk);
  CHECK(slurp(dir / "s1.tsv") == slurp(dir / "s2.tsv"));
  const auto scored = io::read_table(fs::path(dir / "s1.tsv"));
  CHECK(scored.header.back() == "metric");
  CHECK(scored.rows.size() == rows.size());

  REQUIRE(run({"score", "--reference-only", "--model", dir / "a.ckpt", "--data", dir / "in.tsv", "--out",
               dir / "s3.tsv"}) == kExitOk);

  REQUIRE(run({"evaluate", "--scores", dir / "s1.tsv", "--darr", dir / "train.tsv", "--out",
               dir / "r1.tsv"}) == kExitOk);
  REQUIRE(run({"evaluate", "--scores", dir / "s1.tsv", "--darr", dir / "train.tsv", "--out",
               dir / "r2.tsv"}) == kExitOk);
  CHECK(slurp(dir / "r1.tsv") == slurp(dir / "r2.tsv"));
  const auto report = io::parse_report(io::read_table(fs::path(dir / "r1.tsv")));
  CHECK(report.rows.size() == 1);

  // Pairs whose hypotheses were never scored.
  write_file(dir / "partial.tsv", "src\thyp\tref\tmetric\ns\th\tr\t0.5\n");
  CHECK(run({"evaluate", "--scores", dir / "partial.tsv", "--darr", dir / "train.tsv", "--out",
             dir / "r3.tsv"}) == kExitDataError);
}

TEST_CASE("estimator checkpoints refuse reference-only scoring") {
  TempDir dir;
  write_file(dir / "cfg", kConfig);
  io::write_table(fs::path(dir / "train.tsv"), io::eval_tuples_table(testing::overlap_regression(2, 8)));
  REQUIRE(run({"train-estimator", "--config", dir / "cfg", "--data", dir / "train.tsv", "--out",
               dir / "e.ckpt"}) == kExitOk);
  REQUIRE(run({"score", "--model", dir / "e.ckpt", "--data", dir / "train.tsv", "--out", dir / "s.tsv"}) ==
          kExitOk);
  CHECK(run({"score", "--reference-only", "--model", dir / "e.ckpt", "--data", dir / "train.tsv", "--out",
             dir / "s2.tsv"}) == kExitUsage);
}

TEST_CASE("ablate-source writes a paired report") {
  TempDir dir;
  write_file(dir / "cfg", kConfig);
  const auto all = testing::scrambled_source(6, 24);
  const auto train = testing::as_darr({all.begin(), all.begin() + 16}, {"de-en"});
  const auto test = testing::as_darr({all.begin() + 16, all.end()}, {"de-en", "fr-en"});
  io::write_table(fs::path(dir / "train.tsv"), io::darr_table(train));
  io::write_table(fs::path(dir / "test.tsv"), io::darr_table(test));
  REQUIRE(run({"ablate-source", "--config", dir / "cfg", "--train", dir / "train.tsv", "--test",
               dir / "test.tsv", "--out", dir / "ab.tsv"}) == kExitOk);
  const auto rows = io::parse_ablation(io::read_table(fs::path(dir / "ab.tsv")));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].lang_pair == "de-en");
  CHECK(rows[1].lang_pair == "fr-en");
}

TEST_CASE("the binary reports exit codes") {
  TempDir dir;
  const std::string bin = MTSCORE_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(bin + " --help") == 0);
  CHECK(status(bin + " score") == 2);
  CHECK(status(bin + " hter --data " + dir / "none.tsv" + " --out " + dir / "o.tsv") == 1);
  write_file(dir / "pe.tsv", "src\thyp\tref\tpe\ns\ta b\tr\tb a\n");
  CHECK(status(bin + " hter --data " + dir / "pe.tsv" + " --out " + dir / "o.tsv") == 0);
  CHECK(fs::exists(dir / "o.tsv"));
}
