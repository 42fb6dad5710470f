#include "rbd/info.hpp"

#include <cmath>
#include <stdexcept>

#include "rbd/kernels/api.hpp"

namespace rbd {

JointLabelStats::JointLabelStats(int vocab_) : vocab(vocab_) {
  if (vocab < 2) throw std::invalid_argument("joint stats need vocab >= 2");
  counts.assign(std::size_t(vocab) * vocab, 0);
}

void JointLabelStats::add(int s, int r, std::uint64_t c) {
  counts[std::size_t(s) * vocab + r] += c;
  total += c;
}

std::vector<std::uint64_t> JointLabelStats::sender_marginal() const {
  std::vector<std::uint64_t> m(vocab, 0);
  for (int s = 0; s < vocab; ++s) {
    for (int r = 0; r < vocab; ++r) m[s] += at(s, r);
  }
  return m;
}

std::vector<std::uint64_t> JointLabelStats::receiver_marginal() const {
  std::vector<std::uint64_t> m(vocab, 0);
  for (int s = 0; s < vocab; ++s) {
    for (int r = 0; r < vocab; ++r) m[r] += at(s, r);
  }
  return m;
}

JointLabelStats JointLabelStats::diagonal(const WorldGraph& view) {
  JointLabelStats stats(int(view.alphabet.size()));
  const auto counts = view.label_counts();
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] > 0) stats.add(int(l), int(l), counts[l]);
  }
  return stats;
}

void JointLabelStats::validate() const {
  if (counts.size() != std::size_t(vocab) * vocab) {
    throw std::invalid_argument("joint stats shape mismatch");
  }
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  if (sum != total) throw std::invalid_argument("joint stats total mismatch");
}

JointLabelStats joint_stats(const ViewPair& pair) {
  return joint_stats(pair.sender, pair.receiver);
}

JointLabelStats joint_stats(const WorldGraph& sender, const WorldGraph& receiver) {
  if (sender.n != receiver.n || !(sender.alphabet == receiver.alphabet)) {
    throw std::invalid_argument("views are not aligned");
  }
  JointLabelStats stats(int(sender.alphabet.size()));
  const int n = sender.n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      stats.add(sender.at(i, j), receiver.at(i, j));
    }
  }
  return stats;
}

JointLabelStats er_joint_stats(int n, const LabelDistribution& dist,
                               const ChannelNoiseModel& channel,
                               std::uint64_t seed) {
  if (channel.vocab != int(dist.alphabet.size())) {
    throw std::invalid_argument("channel dimension does not match alphabet");
  }
  const auto cum = dist.sample_thresholds();
  const auto rows = channel.row_thresholds();
  const int m = int(cum.size());
  const auto& k = kernels::active();

  JointLabelStats stats(channel.vocab);
  std::vector<std::uint32_t> words(std::size_t(n));
  std::vector<Label> s_row(std::size_t(n)), r_row(std::size_t(n));
  for (int i = 0; i + 1 < n; ++i) {
    const std::size_t count = std::size_t(n - i - 1);
    const std::uint64_t first = std::uint64_t(i) * n + i + 1;
    k.philox_fill(seed, kStreamGenerate, first, count, words.data());
    k.sample_labels(words.data(), count, cum.data(), m, s_row.data());
    k.philox_fill(seed, kStreamPerturb, first, count, words.data());
    k.sample_conditional(words.data(), s_row.data(), count, rows.data(), m,
                         std::size_t(m), r_row.data());
    for (std::size_t t = 0; t < count; ++t) stats.add(s_row[t], r_row[t]);
  }
  return stats;
}

double entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy_from_counts(std::span<const std::uint64_t> counts,
                           std::uint64_t total) {
  if (total == 0) return 0.0;
  // H = log2(T) - sum(c log2 c) / T keeps all terms on integer counts so the
  // difference identities hold to rounding.
  double acc = 0.0;
  for (auto c : counts) {
    if (c > 0) acc += double(c) * std::log2(double(c));
  }
  return std::log2(double(total)) - acc / double(total);
}

double analytic_label_entropy(const LabelDistribution& dist) {
  dist.validate();
  return entropy_bits(dist.probs);
}

double empirical_description_entropy(
    std::span<const std::vector<Label>> samples) {
  if (samples.empty()) throw std::invalid_argument("no description samples");
  const std::size_t len = samples.front().size();
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  for (const auto& s : samples) {
    if (s.size() != len) {
      throw std::invalid_argument("description samples differ in length");
    }
    for (Label l : s) {
      if (std::size_t(l) >= counts.size()) counts.resize(std::size_t(l) + 1, 0);
      counts[l]++;
      ++total;
    }
  }
  return entropy_from_counts(counts, total);
}

double marginal_entropy(const JointLabelStats& stats, bool sender) {
  const auto m = sender ? stats.sender_marginal() : stats.receiver_marginal();
  return entropy_from_counts(m, stats.total);
}

double joint_entropy(const JointLabelStats& stats) {
  return entropy_from_counts(stats.counts, stats.total);
}

double mutual_information(const JointLabelStats& stats) {
  if (stats.total == 0) throw std::invalid_argument("empty joint stats");
  return marginal_entropy(stats, true) + marginal_entropy(stats, false) -
         joint_entropy(stats);
}

double conditional_entropy(const JointLabelStats& stats, Direction dir) {
  if (stats.total == 0) throw std::invalid_argument("empty joint stats");
  const bool conditioned_on_receiver = dir == Direction::SenderGivenReceiver;
  return joint_entropy(stats) - marginal_entropy(stats, !conditioned_on_receiver);
}

double typical_set_size_log2(double entropy, double length) {
  if (entropy < 0 || length < 0) {
    throw std::invalid_argument("entropy and length must be nonnegative");
  }
  return entropy * length;
}

}  // namespace rbd
