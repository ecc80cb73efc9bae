#include "lexshift/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "lexshift/error.hpp"

namespace lexshift {

void TrainerConfig::validate() const {
  if (dim <= 0) throw ContractError("trainer: dim must be positive");
  if (window < 1) throw ContractError("trainer: window must be >= 1");
  if (epochs < 0) throw ContractError("trainer: epochs must be >= 0");
  if (negatives < 1) throw ContractError("trainer: negatives must be >= 1");
  if (!(learning_rate > 0.0)) throw ContractError("trainer: learning rate must be positive");
  if (ngrams.min < 1 || ngrams.max < ngrams.min) throw ContractError("trainer: invalid n-gram range");
  if (bucket_count == 0) throw ContractError("trainer: bucket_count must be positive");
  if (workers < 1) throw ContractError("trainer: workers must be >= 1");
}

Vocabulary build_vocab(const FrequencyTable& counts, const TrainerConfig& cfg) {
  Vocabulary vocab;
  for (auto& [word, count] : counts.ranked()) {
    if (count < cfg.min_count) continue;
    vocab.index.emplace(word, static_cast<std::int32_t>(vocab.words.size()));
    vocab.words.push_back(word);
    vocab.counts.push_back(count);
    vocab.total += count;
  }
  if (vocab.words.empty()) {
    throw ContractError("empty vocabulary after min_count=" + std::to_string(cfg.min_count) +
                        " pruning");
  }
  return vocab;
}

Vocabulary build_vocab(const Corpus& corpus, const TrainerConfig& cfg) {
  return build_vocab(count_frequencies(corpus), cfg);
}

NegativeTable::NegativeTable(std::span<const std::uint64_t> counts, std::size_t table_size) {
  if (counts.empty()) throw ContractError("negative table needs a non-empty vocabulary");
  double z = 0.0;
  probs_.reserve(counts.size());
  for (const auto c : counts) {
    probs_.push_back(std::pow(static_cast<double>(c), 0.75));
    z += probs_.back();
  }
  for (auto& p : probs_) p /= z;
  table_.reserve(table_size + counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto n = static_cast<std::size_t>(std::llround(probs_[i] * static_cast<double>(table_size)));
    table_.insert(table_.end(), std::max<std::size_t>(n, 1), static_cast<std::int32_t>(i));
  }
}

double keep_probability(double rel_freq, double threshold) {
  if (threshold <= 0.0 || rel_freq <= 0.0) return 1.0;
  return std::min(1.0, std::sqrt(threshold / rel_freq));
}

EmbeddingSpace export_space(const TrainingState& state, const Vocabulary& vocab,
                            const TrainerConfig& cfg) {
  EmbeddingSpace::Matrix vectors(static_cast<Eigen::Index>(vocab.size()), state.dim());
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    vectors.row(static_cast<Eigen::Index>(w)) =
        hidden<float>(state, state.input_rows[w]).transpose();
  }
  EmbeddingSpace space(vocab.words, std::move(vectors));
  SubwordTable table(state.dim(), cfg.ngrams, cfg.bucket_count);
  const auto base = static_cast<Eigen::Index>(vocab.size());
  for (std::size_t k = 0; k < state.bucket_ids.size(); ++k) {
    table.set(state.bucket_ids[k], state.input.row(base + static_cast<Eigen::Index>(k)).transpose());
  }
  space.set_subwords(std::move(table));
  return space;
}

namespace {

struct WorkerContext {
  TrainingState& state;
  const TrainerConfig& cfg;
  const NegativeTable& negatives;
  const std::vector<double>& keep;
  const std::vector<std::vector<std::int32_t>>& sentences;
  std::atomic<std::uint64_t>& processed;
  std::uint64_t total_work;
};

void run_worker(WorkerContext ctx, std::size_t worker, std::size_t begin, std::size_t end) {
  std::seed_seq seq{static_cast<std::uint32_t>(ctx.cfg.seed),
                    static_cast<std::uint32_t>(ctx.cfg.seed >> 32),
                    static_cast<std::uint32_t>(worker)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> window(1, ctx.cfg.window);

  const auto vocab_size = static_cast<std::int32_t>(ctx.state.vocab_size());
  std::vector<std::int32_t> line;
  std::vector<std::int32_t> negs;
  TrainingState::Vector h(ctx.state.dim());
  TrainingState::Vector grad(ctx.state.dim());
  const auto lr0 = static_cast<float>(ctx.cfg.learning_rate);
  std::uint64_t local = 0;

  for (int epoch = 0; epoch < ctx.cfg.epochs; ++epoch) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto& sentence = ctx.sentences[s];
      line.clear();
      for (const auto w : sentence) {
        if (ctx.keep[w] >= 1.0 || unit(rng) < ctx.keep[w]) line.push_back(w);
      }
      local += sentence.size();
      const double progress =
          static_cast<double>(ctx.processed.load(std::memory_order_relaxed) + local) /
          static_cast<double>(ctx.total_work);
      const float lr = lr0 * static_cast<float>(std::max(0.0, 1.0 - progress));

      const auto n = static_cast<std::ptrdiff_t>(line.size());
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto b = window(rng);
        const auto& rows = ctx.state.input_rows[line[i]];
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - b);
             j <= std::min<std::ptrdiff_t>(n - 1, i + b); ++j) {
          if (j == i) continue;
          const std::int32_t target = line[j];
          negs.clear();
          if (vocab_size > 1) {
            while (static_cast<int>(negs.size()) < ctx.cfg.negatives) {
              const auto neg = ctx.negatives.draw(rng);
              if (neg != target) negs.push_back(neg);
            }
          }
          sgd_step<float>(ctx.state, rows, target, negs, lr, h, grad);
        }
      }
      if (local >= 10'000) {
        ctx.processed.fetch_add(local, std::memory_order_relaxed);
        local = 0;
      }
    }
  }
  ctx.processed.fetch_add(local, std::memory_order_relaxed);
}

}  // namespace

EmbeddingSpace train(const Corpus& corpus, const TrainerConfig& cfg) {
  cfg.validate();
  const Vocabulary vocab = build_vocab(corpus, cfg);
  TrainingState state = initialize_state<float>(vocab, cfg);

  std::vector<std::vector<std::int32_t>> sentences;
  sentences.reserve(corpus.sentences.size());
  std::uint64_t tokens = 0;
  for (const auto& sentence : corpus.sentences) {
    std::vector<std::int32_t> ids;
    ids.reserve(sentence.size());
    for (const auto& token : sentence) {
      if (const auto id = vocab.find(token)) ids.push_back(*id);
    }
    if (ids.size() > 1) {
      tokens += ids.size();
      sentences.push_back(std::move(ids));
    }
  }

  std::vector<double> keep(vocab.size());
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    keep[w] = keep_probability(
        static_cast<double>(vocab.counts[w]) / static_cast<double>(vocab.total), cfg.subsample);
  }

  if (cfg.epochs > 0 && tokens > 0) {
    const NegativeTable table(vocab.counts);
    std::atomic<std::uint64_t> processed{0};
    WorkerContext ctx{state,     cfg,       table, keep, sentences, processed,
                      tokens * static_cast<std::uint64_t>(cfg.epochs)};
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers),
                                               std::max<std::size_t>(1, sentences.size()));
    if (workers == 1) {
      run_worker(ctx, 0, 0, sentences.size());
    } else {
      // Workers share the parameter matrices without locking.
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = sentences.size() * w / workers;
        const std::size_t end = sentences.size() * (w + 1) / workers;
        threads.emplace_back(run_worker, ctx, w, begin, end);
      }
      for (auto& t : threads) t.join();
    }
    state.processed_tokens = processed.load();
  }
  return export_space(state, vocab, cfg);
}

}  // namespace lexshift
