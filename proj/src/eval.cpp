#include "lexshift/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lexshift/error.hpp"

namespace lexshift {
namespace {

template <typename Map>
void require_same_keys(const Map& predicted, const Map& gold) {
  std::vector<std::string> only_pred;
  std::vector<std::string> only_gold;
  for (const auto& [w, _] : predicted) {
    if (!gold.count(w)) only_pred.push_back(w);
  }
  for (const auto& [w, _] : gold) {
    if (!predicted.count(w)) only_gold.push_back(w);
  }
  if (only_pred.empty() && only_gold.empty()) return;
  std::string msg = "prediction and gold word sets differ;";
  if (!only_gold.empty()) {
    msg += " missing from predictions:";
    for (const auto& w : only_gold) msg += " " + w;
    msg += ";";
  }
  if (!only_pred.empty()) {
    msg += " not in gold:";
    for (const auto& w : only_pred) msg += " " + w;
  }
  throw ContractError(msg);
}

void require_equal_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("correlation inputs differ in length");
  if (x.size() < 2) throw ContractError("correlation needs at least two observations");
}

// Sum over runs of equal values in a sorted range of f(run length).
template <typename It, typename Eq, typename F>
double sum_runs(It first, It last, Eq eq, F f) {
  double total = 0.0;
  while (first != last) {
    It run_end = first + 1;
    while (run_end != last && eq(*first, *run_end)) ++run_end;
    total += f(static_cast<double>(run_end - first));
    first = run_end;
  }
  return total;
}

// Sorts v and returns the number of strictly inverted pairs.
std::int64_t merge_count(std::span<double> v, std::span<double> buf, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double accuracy(const BinaryLabels& predicted, const BinaryLabels& gold) {
  require_same_keys(predicted, gold);
  if (gold.empty()) throw ContractError("accuracy over an empty word set");
  std::size_t correct = 0;
  for (const auto& [w, label] : gold) {
    if (predicted.at(w) == label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_equal_lengths(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw DegenerateError("Pearson correlation undefined: zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

KendallTau kendall_tau(std::span<const double> x, std::span<const double> y) {
  require_equal_lengths(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  const auto pair_count = [](double t) { return t * (t - 1.0) / 2.0; };
  const auto same_x = [&](std::size_t a, std::size_t b) { return x[a] == x[b]; };
  const auto same_xy = [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; };

  KendallTau r;
  const auto nn = static_cast<std::int64_t>(n);
  r.pairs = nn * (nn - 1) / 2;
  r.x_tied_pairs = static_cast<std::int64_t>(sum_runs(order.begin(), order.end(), same_x, pair_count));
  const auto xy_tied = static_cast<std::int64_t>(sum_runs(order.begin(), order.end(), same_xy, pair_count));

  // xs | ys | merge buffer
  std::vector<double> work(3 * n);
  const auto xs = std::span<double>(work).subspan(0, n);
  const auto ys = std::span<double>(work).subspan(n, n);
  const auto buf = std::span<double>(work).subspan(2 * n, n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x[order[i]], ys[i] = y[order[i]];
  const std::int64_t discordant = merge_count(ys, buf, 0, n);
  const auto eq = [](double a, double b) { return a == b; };
  r.y_tied_pairs = static_cast<std::int64_t>(sum_runs(ys.begin(), ys.end(), eq, pair_count));

  r.score = r.pairs - r.x_tied_pairs - r.y_tied_pairs + xy_tied - 2 * discordant;
  const std::int64_t dx = r.pairs - r.x_tied_pairs;
  const std::int64_t dy = r.pairs - r.y_tied_pairs;
  if (dx == 0 || dy == 0) throw DegenerateError("Kendall tau undefined: all values tied");
  r.tau = static_cast<double>(r.score) / std::sqrt(static_cast<double>(dx) * static_cast<double>(dy));

  // Tie-adjusted variance of the score under independence.
  const auto t1 = [](double t) { return t * (t - 1.0); };
  const auto t2 = [](double t) { return t * (t - 1.0) * (t - 2.0); };
  const auto t3 = [](double t) { return t * (t - 1.0) * (2.0 * t + 5.0); };
  const double nd = static_cast<double>(n);
  const double v0 = nd * (nd - 1.0) * (2.0 * nd + 5.0);
  const double vt = sum_runs(xs.begin(), xs.end(), eq, t3);
  const double vu = sum_runs(ys.begin(), ys.end(), eq, t3);
  const double v1 = sum_runs(xs.begin(), xs.end(), eq, t1) * sum_runs(ys.begin(), ys.end(), eq, t1);
  const double v2 = sum_runs(xs.begin(), xs.end(), eq, t2) * sum_runs(ys.begin(), ys.end(), eq, t2);
  double var = (v0 - vt - vu) / 18.0 + v1 / (2.0 * nd * (nd - 1.0));
  if (n > 2) var += v2 / (9.0 * nd * (nd - 1.0) * (nd - 2.0));
  if (var > 0.0) {
    const double z = static_cast<double>(r.score) / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  }
  return r;
}

double select_threshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw ContractError("threshold selection needs equally many scores and labels");
  }
  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> candidates{0.0};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  }
  candidates.push_back(distinct.back());
  std::sort(candidates.begin(), candidates.end());

  double best_h = candidates.front();
  std::size_t best_correct = 0;
  for (const double h : candidates) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if ((scores[i] > h ? 1 : 0) == labels[i]) ++correct;
    }
    if (correct > best_correct) {
      best_correct = correct;
      best_h = h;
    }
  }
  return best_h;
}

AlignedScores align(const GradedScores& predicted, const GradedScores& gold) {
  require_same_keys(predicted, gold);
  AlignedScores out;
  for (const auto& [w, g] : gold) {
    out.predicted.push_back(predicted.at(w));
    out.gold.push_back(g);
  }
  return out;
}

LanguageMetrics evaluate_language(std::string language, const GoldData& gold,
                                  const std::optional<BinaryLabels>& predicted_binary,
                                  const std::optional<GradedScores>& predicted_graded) {
  LanguageMetrics m;
  m.language = std::move(language);
  if (predicted_binary && !gold.binary.empty()) {
    m.binary_count = gold.binary.size();
    m.accuracy = accuracy(*predicted_binary, gold.binary);
  }
  if (predicted_graded && !gold.graded.empty()) {
    const auto a = align(*predicted_graded, gold.graded);
    m.graded_count = a.gold.size();
    m.pearson = pearson(a.predicted, a.gold);
    m.kendall = kendall_tau(a.predicted, a.gold);
  }
  return m;
}

}  // namespace lexshift
