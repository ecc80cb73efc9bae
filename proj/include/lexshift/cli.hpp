#ifndef LEXSHIFT_CLI_HPP_
#define LEXSHIFT_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexshift/change.hpp"
#include "lexshift/eval.hpp"
#include "lexshift/pivot.hpp"
#include "lexshift/synth.hpp"
#include "lexshift/trainer.hpp"

namespace lexshift {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitPartial = 3,
};

/// Decision threshold tuned per language for the SemEval-2020 data; 0.4 otherwise.
double default_threshold(const std::string& language);

struct RunConfig {
  std::filesystem::path corpus_t1;
  std::filesystem::path corpus_t2;
  std::filesystem::path emb_t1;
  std::filesystem::path emb_t2;
  std::filesystem::path targets;
  std::filesystem::path gold_binary;
  std::filesystem::path gold_graded;
  std::filesystem::path pred_binary;
  std::filesystem::path pred_graded;
  std::filesystem::path gold_dir;
  std::filesystem::path pred_dir;
  std::filesystem::path report;
  std::filesystem::path out_dir = ".";
  std::string language = "english";
  std::vector<std::string> languages;
  bool lowercase = false;

  TrainerConfig trainer;
  PivotConfig pivot;
  double phi = 1.0;
  /// Negative = use default_threshold(language).
  double threshold = -1.0;
  int calib_resamples = 5;
  std::size_t calib_size = 5000;
  std::uint64_t seed = 1;
  int workers = 1;

  SynthSpec synth;

  double effective_threshold() const {
    return threshold >= 0.0 ? threshold : default_threshold(language);
  }
};

/// Output of the detect/rank pipeline for one target list.
struct DetectionResult {
  PivotResamples pivots;
  CalibrationBounds bounds;
  std::vector<ChangeScore> scores;
  /// Targets that could not be scored, with the reason.
  std::vector<std::pair<std::string, std::string>> failures;
  /// Input order, scored or failed.
  std::vector<std::string> targets;
};

/// Train (or load) both spaces, select pivots, calibrate, and score targets.
DetectionResult run_detection(const RunConfig& cfg, std::ostream& log);

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_detect(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_rank(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses `args` (args[0] is the program name) and dispatches to a subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexshift

#endif  // LEXSHIFT_CLI_HPP_
