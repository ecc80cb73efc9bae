#include <doctest.h>

#include <sstream>

#include "lexshift/answers.hpp"
#include "lexshift/cli.hpp"
#include "lexshift/embedding.hpp"
#include "test_util.hpp"

using namespace lexshift;
using namespace lexshift::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lexshift");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Small synthetic corpora plus a three-word target list.
struct Fixture {
  TempDir dir{"cli"};
  std::vector<std::string> targets;
  Fixture() {
    REQUIRE(cli({"synth", "--out-dir", dir.path().string(), "--synth-vocab", "300", "--synth-tokens",
                 "20000", "--synth-clusters", "4", "--synth-changed", "1.0,1.0", "--synth-stable",
                 "1", "--synth-occurrences", "40", "--seed", "3", "--language", "xx"})
                .code == 0);
    targets = read_word_list(dir / "targets.txt");
    REQUIRE(targets.size() == 3);
  }
  std::vector<std::string> common(const std::string& sub) const {
    return {sub,           "--corpus-t1",  (dir / "corpus_t1.txt").string(),
            "--corpus-t2", (dir / "corpus_t2.txt").string(),
            "--targets",   (dir / "targets.txt").string(),
            "--dim",       "12",
            "--epochs",    "2",
            "--buckets",   "5000",
            "--min-count", "2",
            "--sample-size", "50",
            "--calib-size", "200",
            "--language",  "xx"};
  }
};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK(cfg.trainer.dim == 100);
  CHECK(cfg.trainer.window == 7);
  CHECK(default_threshold("english") == 0.4);
  CHECK(default_threshold("german") == 0.5);
  CHECK(default_threshold("swedish") == 0.4);
  CHECK(default_threshold("latin") == 0.15);
}

TEST_CASE("usage errors name the flag") {
  const auto r = cli({"train", "--corpus-t2", "x.txt"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--corpus-t1") != std::string::npos);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"nonsense"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("unreadable corpus is a data error") {
  TempDir d("cli_missing");
  const auto r = cli({"train", "--corpus-t1", (d / "nope.txt").string(), "--corpus-t2",
                      (d / "nope2.txt").string(), "--out-dir", d.path().string()});
  CHECK(r.code == kExitData);
}

TEST_CASE("train writes two loadable spaces") {
  Fixture f;
  const auto r = cli(with(f.common("train"), {"--out-dir", f.dir.path().string()}));
  REQUIRE(r.code == 0);
  const auto s1 = load_embeddings(f.dir / "emb_t1.vec");
  const auto s2 = load_embeddings(f.dir / "emb_t2.vec");
  CHECK(s1.dim() == 12);
  CHECK(s2.dim() == 12);
  CHECK(s1.has_subwords());
  CHECK(s1.contains(f.targets[0]));
}

TEST_CASE("config file values apply and flags override them") {
  Fixture f;
  write_file(f.dir / "run.ini", "dim = 9\nepochs = 1\nbuckets = 3000\n");
  auto args = f.common("train");
  args.erase(args.begin() + 7, args.begin() + 9);  // drop --dim 12
  REQUIRE(cli(with(args, {"--config", (f.dir / "run.ini").string(), "--out-dir", (f.dir / "a").string()})).code == 0);
  CHECK(load_embeddings(f.dir / "a" / "emb_t1.vec").dim() == 9);
  REQUIRE(cli(with(args, {"--config", (f.dir / "run.ini").string(), "--dim", "7", "--out-dir",
                          (f.dir / "b").string()}))
              .code == 0);
  CHECK(load_embeddings(f.dir / "b" / "emb_t1.vec").dim() == 7);

  write_file(f.dir / "bad.ini", "no_such_option = 3\n");
  CHECK(cli(with(args, {"--config", (f.dir / "bad.ini").string(), "--out-dir", (f.dir / "c").string()})).code ==
        kExitUsage);
  CHECK_FALSE(std::filesystem::exists(f.dir / "c"));
}

TEST_CASE("detect writes answers in target order and evaluate reads them back") {
  Fixture f;
  const auto out = f.dir / "run";
  const auto r = cli(with(f.common("detect"), {"--out-dir", out.string(), "--threshold", "0.4"}));
  REQUIRE(r.code == 0);
  const auto binary = read_binary_answers(out / "answer/task1/xx.txt");
  const auto graded = read_graded_answers(out / "answer/task2/xx.txt");
  REQUIRE(binary.size() == 3);
  REQUIRE(graded.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(binary[i].first == f.targets[i]);
    CHECK(graded[i].first == f.targets[i]);
    CHECK(binary[i].second == (graded[i].second > 0.4 ? 1 : 0));
  }
  for (const auto* file : {"scores.tsv", "audit.tsv", "pivots.txt", "explore.txt", "resamples/resample_1.txt",
                           "resamples/resample_10.txt", "emb_t1.vec", "emb_t2.vec"}) {
    CHECK(std::filesystem::exists(out / file));
  }

  // Predictions used as gold give a perfect score.
  const auto e = cli({"evaluate", "--gold-binary", (out / "answer/task1/xx.txt").string(), "--gold-graded",
                      (out / "answer/task2/xx.txt").string(), "--out-dir", out.string(), "--language", "xx"});
  REQUIRE(e.code == 0);
  CHECK(e.out.find("xx\t100.0\t") != std::string::npos);

  const auto g = cli({"evaluate", "--gold-binary", (f.dir / "truth/task1/xx.txt").string(), "--pred-binary",
                      (out / "answer/task1/xx.txt").string(), "--report", (out / "report.tsv").string()});
  CHECK(g.code == 0);
  CHECK(read_file(out / "report.tsv") == g.out);

  const auto ranked = cli(with(f.common("rank"), {"--out-dir", (f.dir / "rank").string(), "--emb-t1",
                                                  (out / "emb_t1.vec").string(), "--emb-t2",
                                                  (out / "emb_t2.vec").string()}));
  CHECK(ranked.code == 0);
  CHECK(ranked.out.rfind("1\t", 0) == 0);
}

TEST_CASE("unscorable targets give a partial-failure exit") {
  Fixture f;
  const auto out = f.dir / "run";
  REQUIRE(cli(with(f.common("train"), {"--out-dir", out.string()})).code == 0);
  std::filesystem::remove(subword_path(out / "emb_t1.vec"));
  std::filesystem::remove(subword_path(out / "emb_t2.vec"));
  write_file(f.dir / "targets_oov.txt", f.targets[0] + "\nqqqzzz\n" + f.targets[1] + "\n");
  auto args = f.common("detect");
  args[6] = (f.dir / "targets_oov.txt").string();
  const auto r = cli(with(args, {"--out-dir", out.string(), "--emb-t1", (out / "emb_t1.vec").string(), "--emb-t2",
                                 (out / "emb_t2.vec").string()}));
  CHECK(r.code == kExitPartial);
  CHECK(r.err.find("qqqzzz") != std::string::npos);
  const auto binary = read_binary_answers(out / "answer/task1/xx.txt");
  REQUIRE(binary.size() == 3);
  CHECK(binary[1].first == "qqqzzz");
  CHECK(read_file(out / "audit.tsv").find("qqqzzz") != std::string::npos);
}

TEST_CASE("malformed answer files report the line") {
  TempDir d("cli_fmt");
  write_file(d / "gold.txt", "a\t1\nb\t0\n");
  write_file(d / "pred.txt", "a\t1\nb\tmaybe\n");
  const auto r = cli({"evaluate", "--gold-binary", (d / "gold.txt").string(), "--pred-binary", (d / "pred.txt").string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("pred.txt:2:") != std::string::npos);
}

TEST_CASE("multi-language evaluation reports the mean accuracy") {
  TempDir d("cli_multi");
  // Correct / total per language: 26/37, 36/48, 24/31, 24/40.
  const std::vector<std::tuple<std::string, int, int>> langs{
      {"english", 26, 37}, {"german", 36, 48}, {"swedish", 24, 31}, {"latin", 24, 40}};
  for (const auto& [lang, ok, n] : langs) {
    std::string gold, pred;
    for (int i = 0; i < n; ++i) {
      const int label = i % 2;
      gold += "w" + std::to_string(i) + "\t" + std::to_string(label) + "\n";
      pred += "w" + std::to_string(i) + "\t" + std::to_string(i < ok ? label : 1 - label) + "\n";
    }
    write_file(d / "gold" / "task1" / (lang + ".txt"), gold);
    write_file(d / "pred" / "task1" / (lang + ".txt"), pred);
  }
  const auto r = cli({"evaluate", "--languages", "english,german,swedish,latin", "--gold-dir",
                      (d / "gold").string(), "--pred-dir", (d / "pred").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("english\t70.3\t") != std::string::npos);
  CHECK(r.out.find("german\t75.0\t") != std::string::npos);
  CHECK(r.out.find("swedish\t77.4\t") != std::string::npos);
  CHECK(r.out.find("latin\t60.0\t") != std::string::npos);
  CHECK(r.out.find("average\t70.7\t") != std::string::npos);
}
