#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbd/graph.hpp"

namespace rbd {

// Co-occurrence counts of (sender label, receiver label) over aligned
// unordered off-diagonal cells.
struct JointLabelStats {
  int vocab = 0;
  std::vector<std::uint64_t> counts;  // vocab×vocab, sender-major
  std::uint64_t total = 0;

  JointLabelStats() = default;
  explicit JointLabelStats(int vocab);

  std::uint64_t at(int s, int r) const {
    return counts[std::size_t(s) * vocab + r];
  }
  void add(int s, int r, std::uint64_t c = 1);

  std::vector<std::uint64_t> sender_marginal() const;
  std::vector<std::uint64_t> receiver_marginal() const;

  // Identity-channel stats for a single view: all mass on the diagonal.
  static JointLabelStats diagonal(const WorldGraph& view);

  void validate() const;
};

JointLabelStats joint_stats(const ViewPair& pair);
JointLabelStats joint_stats(const WorldGraph& sender, const WorldGraph& receiver);

// Streaming variant: joint stats of an ER world and its perturbed view,
// without materializing either matrix. Identical counts to
// joint_stats(perturb_view(generate_er_labeled(...), ...)).
JointLabelStats er_joint_stats(int n, const LabelDistribution& dist,
                               const ChannelNoiseModel& channel,
                               std::uint64_t seed);

// -sum p log2 p with 0 log 0 := 0.
double entropy_bits(std::span<const double> probs);
double entropy_from_counts(std::span<const std::uint64_t> counts,
                           std::uint64_t total);

double analytic_label_entropy(const LabelDistribution& dist);

// Pooled per-symbol plug-in estimate over equal-length label strings.
double empirical_description_entropy(
    std::span<const std::vector<Label>> samples);

enum class Direction { SenderGivenReceiver, ReceiverGivenSender };

double marginal_entropy(const JointLabelStats& stats, bool sender);
double joint_entropy(const JointLabelStats& stats);
// Computed once as H(S) + H(R) - H(S,R) so both difference forms agree.
double mutual_information(const JointLabelStats& stats);
double conditional_entropy(const JointLabelStats& stats, Direction dir);

// log2 of the AEP typical-set size: H*K. Callers exponentiate only when safe.
double typical_set_size_log2(double entropy_bits, double length);

}  // namespace rbd
