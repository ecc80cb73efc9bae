#include "lexshift/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "lexshift/answers.hpp"
#include "lexshift/corpus.hpp"
#include "lexshift/error.hpp"
#include "textio.hpp"

namespace lexshift {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

void require(const std::filesystem::path& p, const char* flag, const char* command) {
  if (p.empty()) throw UsageError(std::string(command) + ": " + flag + " is required");
}

TrainerConfig trainer_config(const RunConfig& cfg) {
  TrainerConfig t = cfg.trainer;
  t.seed = cfg.seed;
  t.workers = cfg.workers;
  return t;
}

PivotConfig pivot_config(const RunConfig& cfg) {
  PivotConfig p = cfg.pivot;
  p.seed = cfg.seed;
  return p;
}

Corpus read_corpus(const std::filesystem::path& path, bool lowercase, const char* id,
                   std::ostream& log) {
  auto c = load_corpus(path, lowercase, id);
  log << "loaded " << path.string() << ": " << c.sentences.size() << " sentences, "
      << c.token_count << " tokens\n";
  return c;
}

EmbeddingSpace obtain_space(const std::filesystem::path& emb, const Corpus& corpus,
                            const TrainerConfig& tcfg, const std::filesystem::path& save_to,
                            std::ostream& log) {
  if (!emb.empty()) {
    auto space = load_embeddings(emb);
    log << "loaded " << emb.string() << ": " << space.size() << " x " << space.dim() << "\n";
    return space;
  }
  const auto start = std::chrono::steady_clock::now();
  auto space = train(corpus, tcfg);
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  log << "trained " << corpus.source_id << ": " << space.size() << " words in "
      << textio::fixed(took.count(), 1) << "s\n";
  if (!save_to.empty()) save_embeddings(space, save_to);
  return space;
}

std::filesystem::path answer_path(const std::filesystem::path& root, const char* task,
                                  const std::string& language) {
  return root / task / (language + ".txt");
}

int report_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ContractError*>(&e)) {
    return kExitUsage;
  }
  return kExitData;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const CLI::Error&) {
    throw;
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

void write_audit(const DetectionResult& r, const std::filesystem::path& dir) {
  write_word_list(r.pivots.pivots, dir / "pivots.txt");
  write_word_list(r.pivots.explore, dir / "explore.txt");
  for (std::size_t i = 0; i < r.pivots.resamples.size(); ++i) {
    write_word_list(r.pivots.resamples[i],
                    dir / "resamples" / ("resample_" + std::to_string(i + 1) + ".txt"));
  }

  std::map<std::string, const ChangeScore*> by_word;
  for (const auto& s : r.scores) by_word[s.word] = &s;
  std::map<std::string, std::string> failed(r.failures.begin(), r.failures.end());

  auto scores = textio::open_output(dir / "scores.tsv", "score file");
  auto audit = textio::open_output(dir / "audit.tsv", "audit file");
  scores << "word\tmean\tverdict\n";
  const std::size_t n = r.pivots.resamples.size();
  audit << "word";
  for (std::size_t i = 1; i <= n; ++i) audit << "\tlambda_" << i;
  for (std::size_t i = 1; i <= n; ++i) audit << "\tscaled_" << i;
  audit << "\tmean\tlower\tupper\tstatus\n";
  for (const auto& w : r.targets) {
    if (const auto it = by_word.find(w); it != by_word.end()) {
      const auto& s = *it->second;
      scores << w << '\t' << textio::fixed(s.mean, 6) << '\t'
             << (s.changed ? "changed" : "unchanged") << '\n';
      audit << w;
      for (const double l : s.raw) audit << '\t' << textio::fixed(l, 9);
      for (const double l : s.scaled) audit << '\t' << textio::fixed(l, 9);
      audit << '\t' << textio::fixed(s.mean, 9) << '\t' << textio::fixed(r.bounds.lower, 9)
            << '\t' << textio::fixed(r.bounds.upper, 9) << "\tok\n";
    } else {
      scores << w << "\tNA\terror\n";
      audit << w;
      for (std::size_t i = 0; i < 2 * n + 1; ++i) audit << "\tNA";
      audit << '\t' << textio::fixed(r.bounds.lower, 9) << '\t'
            << textio::fixed(r.bounds.upper, 9) << "\terror: " << failed[w] << '\n';
    }
  }
}

}  // namespace

double default_threshold(const std::string& language) {
  if (language == "english" || language == "en") return 0.4;
  if (language == "german" || language == "de") return 0.5;
  if (language == "swedish" || language == "sv") return 0.4;
  if (language == "latin" || language == "la") return 0.15;
  return 0.4;
}

DetectionResult run_detection(const RunConfig& cfg, std::ostream& log) {
  require(cfg.corpus_t1, "--corpus-t1", "detect");
  require(cfg.corpus_t2, "--corpus-t2", "detect");
  require(cfg.targets, "--targets", "detect");
  if (cfg.emb_t1.empty() != cfg.emb_t2.empty()) {
    throw UsageError("detect: give both --emb-t1 and --emb-t2, or neither to train");
  }
  const double h = cfg.effective_threshold();
  if (!(h >= 0.0 && h <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");

  const auto c1 = read_corpus(cfg.corpus_t1, cfg.lowercase, "t1", log);
  const auto c2 = read_corpus(cfg.corpus_t2, cfg.lowercase, "t2", log);
  const auto tcfg = trainer_config(cfg);
  const auto s1 = obtain_space(cfg.emb_t1, c1, tcfg, cfg.out_dir / "emb_t1.vec", log);
  const auto s2 = obtain_space(cfg.emb_t2, c2, tcfg, cfg.out_dir / "emb_t2.vec", log);
  if (s1.dim() != s2.dim()) throw FormatError("embedding spaces differ in dimension", 0);

  const auto f1 = count_frequencies(c1);
  const auto f2 = count_frequencies(c2);

  DetectionResult r;
  r.targets = read_word_list(cfg.targets);
  r.pivots = prepare_pivots(f1, f2, pivot_config(cfg), s1, s2);
  log << "pivots: " << r.pivots.pivots.size() << ", explore: " << r.pivots.explore.size()
      << ", resamples: " << r.pivots.resamples.size() << " x "
      << r.pivots.resamples.front().size() << "\n";

  const ChangeModel model(r.pivots.resamples, s1, s2, cfg.phi);
  r.bounds = calibrate_bounds(r.pivots.explore, model, cfg.calib_resamples, cfg.calib_size,
                              cfg.seed, cfg.workers);
  log << "calibration: lower " << textio::fixed(r.bounds.lower, 6) << ", upper "
      << textio::fixed(r.bounds.upper, 6) << "\n";

  // Per-word scoring is independent; results land in input order.
  std::vector<std::optional<ChangeScore>> slots(r.targets.size());
  std::vector<std::string> reasons(r.targets.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        slots[i] = score_word(r.targets[i], model, r.bounds, h);
      } catch (const Error& e) {
        reasons[i] = e.what();
      }
    }
  };
  const auto workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(cfg.workers, 1)),
                                               1, std::max<std::size_t>(r.targets.size(), 1));
  if (workers == 1) {
    work(0, r.targets.size());
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back(work, r.targets.size() * w / workers,
                           r.targets.size() * (w + 1) / workers);
    }
    for (auto& t : threads) t.join();
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) {
      r.scores.push_back(std::move(*slots[i]));
    } else {
      r.failures.emplace_back(r.targets[i], reasons[i]);
    }
  }
  return r;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(cfg.corpus_t1, "--corpus-t1", "train");
    require(cfg.corpus_t2, "--corpus-t2", "train");
    const auto tcfg = trainer_config(cfg);
    tcfg.validate();
    const auto c1 = read_corpus(cfg.corpus_t1, cfg.lowercase, "t1", out);
    const auto c2 = read_corpus(cfg.corpus_t2, cfg.lowercase, "t2", out);
    const auto p1 = cfg.emb_t1.empty() ? cfg.out_dir / "emb_t1.vec" : cfg.emb_t1;
    const auto p2 = cfg.emb_t2.empty() ? cfg.out_dir / "emb_t2.vec" : cfg.emb_t2;
    obtain_space({}, c1, tcfg, p1, out);
    obtain_space({}, c2, tcfg, p2, out);
    out << "wrote " << p1.string() << " and " << p2.string() << "\n";
    return kExitOk;
  });
}

int cmd_detect(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto r = run_detection(cfg, out);
    std::map<std::string, const ChangeScore*> by_word;
    for (const auto& s : r.scores) by_word[s.word] = &s;
    BinaryAnswers binary;
    GradedAnswers graded;
    for (const auto& w : r.targets) {
      const auto it = by_word.find(w);
      binary.emplace_back(w, it != by_word.end() && it->second->changed ? 1 : 0);
      graded.emplace_back(w, it != by_word.end() ? it->second->mean : 0.0);
    }
    const auto answers = cfg.out_dir / "answer";
    write_binary_answers(binary, answer_path(answers, "task1", cfg.language));
    write_graded_answers(graded, answer_path(answers, "task2", cfg.language));
    write_audit(r, cfg.out_dir);
    out << "scored " << r.scores.size() << " of " << r.targets.size() << " targets (h = "
        << textio::fixed(cfg.effective_threshold(), 3) << ")\n";
    for (const auto& [w, why] : r.failures) err << "failed to score '" << w << "': " << why << "\n";
    return r.failures.empty() ? kExitOk : kExitPartial;
  });
}

int cmd_rank(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto r = run_detection(cfg, err);
    const auto ranked = rank_words(r.scores);
    auto file = textio::open_output(cfg.out_dir / "ranking.tsv", "ranking file");
    file << "rank\tword\tscore\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const auto line = std::to_string(i + 1) + "\t" + ranked[i].word + "\t" +
                        textio::fixed(ranked[i].score, 6) + "\n";
      file << line;
      out << line;
    }
    write_audit(r, cfg.out_dir);
    for (const auto& [w, why] : r.failures) err << "failed to score '" << w << "': " << why << "\n";
    return r.failures.empty() ? kExitOk : kExitPartial;
  });
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    struct Job {
      std::string language;
      std::filesystem::path gold_binary, gold_graded, pred_binary, pred_graded;
    };
    std::vector<Job> jobs;
    if (!cfg.languages.empty()) {
      require(cfg.gold_dir, "--gold-dir", "evaluate");
      require(cfg.pred_dir, "--pred-dir", "evaluate");
      for (const auto& lang : cfg.languages) {
        Job j{lang, answer_path(cfg.gold_dir, "task1", lang), answer_path(cfg.gold_dir, "task2", lang),
              answer_path(cfg.pred_dir, "task1", lang), answer_path(cfg.pred_dir, "task2", lang)};
        if (!std::filesystem::exists(j.gold_binary)) j.gold_binary.clear();
        if (!std::filesystem::exists(j.gold_graded)) j.gold_graded.clear();
        jobs.push_back(std::move(j));
      }
    } else {
      if (cfg.gold_binary.empty() && cfg.gold_graded.empty()) {
        throw UsageError("evaluate: --gold-binary and/or --gold-graded is required");
      }
      const auto answers = cfg.out_dir / "answer";
      jobs.push_back(Job{cfg.language, cfg.gold_binary, cfg.gold_graded,
                         cfg.pred_binary.empty() ? answer_path(answers, "task1", cfg.language)
                                                 : cfg.pred_binary,
                         cfg.pred_graded.empty() ? answer_path(answers, "task2", cfg.language)
                                                 : cfg.pred_graded});
    }

    std::vector<LanguageMetrics> metrics;
    for (const auto& j : jobs) {
      const auto gold = load_gold(j.gold_binary, j.gold_graded);
      std::optional<BinaryLabels> pb;
      std::optional<GradedScores> pg;
      if (!j.gold_binary.empty()) pb = to_labels(read_binary_answers(j.pred_binary));
      if (!j.gold_graded.empty()) pg = to_scores(read_graded_answers(j.pred_graded));
      metrics.push_back(evaluate_language(j.language, gold, pb, pg));
    }

    std::string table = "language\taccuracy\tpearson\tkendall_tau\tkendall_p\n";
    auto opt = [](const std::optional<double>& v, int digits) {
      return v ? textio::fixed(*v, digits) : std::string("-");
    };
    std::vector<double> accs;
    std::vector<double> pears;
    for (const auto& m : metrics) {
      std::optional<double> pct;
      if (m.accuracy) {
        pct = 100.0 * *m.accuracy;
        accs.push_back(*pct);
      }
      if (m.pearson) pears.push_back(*m.pearson);
      table += m.language + "\t" + opt(pct, 1) + "\t" + opt(m.pearson, 3) + "\t" +
               opt(m.kendall ? std::optional<double>(m.kendall->tau) : std::nullopt, 3) + "\t" +
               opt(m.kendall ? std::optional<double>(m.kendall->p_value) : std::nullopt, 4) +
               "\n";
    }
    if (metrics.size() > 1) {
      const auto mean = [](const std::vector<double>& v) -> std::optional<double> {
        if (v.empty()) return std::nullopt;
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      };
      table += "average\t" + opt(mean(accs), 1) + "\t" + opt(mean(pears), 3) + "\t-\t-\n";
    }
    out << table;
    if (!cfg.report.empty()) {
      auto f = textio::open_output(cfg.report, "report");
      f << table;
    }
    return kExitOk;
  });
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SynthSpec spec = cfg.synth;
    spec.seed = cfg.seed;
    const auto data = generate(spec);
    write_synth(data, cfg.out_dir, cfg.language);
    out << "wrote synthetic corpora (" << data.t1.token_count << " / " << data.t2.token_count
        << " tokens, " << data.planted.size() << " targets) to " << cfg.out_dir.string() << "\n";
    return kExitOk;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Lexical semantic change detection from two corpora via embedding profiles",
               args.empty() ? "lexshift" : args.front()};
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::string corpus_t1, corpus_t2, emb_t1, emb_t2, targets, gold_binary, gold_graded,
      pred_binary, pred_graded, gold_dir, pred_dir, report, out_dir = ".";
  app.add_option("--corpus-t1", corpus_t1, "first-period corpus, one sentence per line");
  app.add_option("--corpus-t2", corpus_t2, "second-period corpus");
  app.add_option("--emb-t1", emb_t1, "first-period embeddings (text format)");
  app.add_option("--emb-t2", emb_t2, "second-period embeddings");
  app.add_option("--targets", targets, "target words, one per line");
  app.add_option("--gold-binary", gold_binary, "gold task 1 file (word<TAB>0/1)");
  app.add_option("--gold-graded", gold_graded, "gold task 2 file (word<TAB>score)");
  app.add_option("--pred-binary", pred_binary, "predicted task 1 file");
  app.add_option("--pred-graded", pred_graded, "predicted task 2 file");
  app.add_option("--gold-dir", gold_dir, "directory with task1/ and task2/ gold files");
  app.add_option("--pred-dir", pred_dir, "directory with task1/ and task2/ predictions");
  app.add_option("--languages", cfg.languages, "languages to evaluate from --gold-dir/--pred-dir")
      ->delimiter(',');
  app.add_option("--language", cfg.language, "language label for answer files")
      ->capture_default_str();
  app.add_option("--report", report, "also write the evaluation table here");
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_flag("--lowercase", cfg.lowercase, "fold case while tokenizing");

  app.add_option("--threshold", cfg.threshold, "decision threshold h in [0,1] (default per language)");
  app.add_option("--phi", cfg.phi, "softmax temperature")->capture_default_str();
  app.add_option("--rho", cfg.pivot.top_fraction, "top fraction of frequent words")
      ->capture_default_str();
  app.add_option("--resamples", cfg.pivot.resamples, "pivot resamples N")->capture_default_str();
  app.add_option("--sample-size", cfg.pivot.sample_size, "pivot resample size M")
      ->capture_default_str();
  app.add_option("--explore-max", cfg.pivot.explore_max, "cap on explore set size (0 = none)")
      ->capture_default_str();
  app.add_option("--explore-floor", cfg.pivot.explore_floor,
                 "min relative frequency of frequency-changed explore words")
      ->capture_default_str();
  app.add_option("--calib-resamples", cfg.calib_resamples, "calibration resamples K")
      ->capture_default_str();
  app.add_option("--calib-size", cfg.calib_size, "calibration resample size M'")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "worker threads (1 = deterministic)")
      ->capture_default_str();

  auto& t = cfg.trainer;
  app.add_option("--dim", t.dim, "embedding size d")->capture_default_str();
  app.add_option("--window", t.window, "context window c")->capture_default_str();
  app.add_option("--epochs", t.epochs, "training epochs")->capture_default_str();
  app.add_option("--negatives", t.negatives, "negative samples")->capture_default_str();
  app.add_option("--lr", t.learning_rate, "initial learning rate")->capture_default_str();
  app.add_option("--min-count", t.min_count, "minimum count for the trainer vocabulary")
      ->capture_default_str();
  app.add_option("--minn", t.ngrams.min, "shortest character n-gram")->capture_default_str();
  app.add_option("--maxn", t.ngrams.max, "longest character n-gram")->capture_default_str();
  app.add_option("--buckets", t.bucket_count, "subword hash buckets")->capture_default_str();
  app.add_option("--subsample", t.subsample, "subsampling threshold (0 disables)")
      ->capture_default_str();

  auto& s = cfg.synth;
  app.add_option("--synth-vocab", s.vocab_size, "synth: vocabulary size")->capture_default_str();
  app.add_option("--synth-tokens", s.tokens_per_corpus, "synth: tokens per corpus")
      ->capture_default_str();
  app.add_option("--synth-clusters", s.clusters, "synth: topic clusters")->capture_default_str();
  app.add_option("--synth-changed", s.changed, "synth: mixing proportion per changed word")
      ->delimiter(',');
  app.add_option("--synth-stable", s.stable, "synth: planted stable words")->capture_default_str();
  app.add_option("--synth-occurrences", s.occurrences, "synth: occurrences per planted word")
      ->capture_default_str();
  app.add_option("--synth-sentence-length", s.sentence_length, "synth: tokens per sentence")
      ->capture_default_str();

  auto* train_cmd = app.add_subcommand("train", "train both embedding spaces");
  auto* detect_cmd = app.add_subcommand("detect", "binary detection and graded answer files");
  auto* rank_cmd = app.add_subcommand("rank", "rank targets by change score");
  auto* eval_cmd = app.add_subcommand("evaluate", "accuracy, Pearson and Kendall tau against gold");
  auto* synth_cmd = app.add_subcommand("synth", "generate corpora with planted changes");
  for (auto* sub : {train_cmd, detect_cmd, rank_cmd, eval_cmd, synth_cmd}) sub->fallthrough();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  cfg.corpus_t1 = corpus_t1;
  cfg.corpus_t2 = corpus_t2;
  cfg.emb_t1 = emb_t1;
  cfg.emb_t2 = emb_t2;
  cfg.targets = targets;
  cfg.gold_binary = gold_binary;
  cfg.gold_graded = gold_graded;
  cfg.pred_binary = pred_binary;
  cfg.pred_graded = pred_graded;
  cfg.gold_dir = gold_dir;
  cfg.pred_dir = pred_dir;
  cfg.report = report;
  cfg.out_dir = out_dir;

  if (train_cmd->parsed()) return cmd_train(cfg, out, err);
  if (detect_cmd->parsed()) return cmd_detect(cfg, out, err);
  if (rank_cmd->parsed()) return cmd_rank(cfg, out, err);
  if (eval_cmd->parsed()) return cmd_evaluate(cfg, out, err);
  return cmd_synth(cfg, out, err);
}

}  // namespace lexshift
