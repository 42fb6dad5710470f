#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rbd/labels.hpp"
#include "rbd/rng.hpp"

namespace rbd {

// Explicit n×n matrices cap out here by default.
inline constexpr int kMaxNodes = 4096;

// Documented default seed for every CLI and experiment entry point.
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEEull;

// Stream ids keep independent uses of one seed from overlapping.
inline constexpr std::uint32_t kStreamGenerate = 0;  // world cells
inline constexpr std::uint32_t kStreamPerturb = 1;   // receiver-view cells
inline constexpr std::uint32_t kStreamContext = 2;   // shared-node selection
inline constexpr std::uint32_t kStreamProbe = 3;     // probe/content selection

// Word index of adjacency cell {i, j} in a cell-addressed stream. Both
// triangle halves map to the same word, which is what makes lazy column
// sampling bit-identical to full-matrix generation.
inline std::uint64_t cell_word_index(int i, int j, int n) {
  const int lo = i < j ? i : j;
  const int hi = i < j ? j : i;
  return std::uint64_t(lo) * std::uint64_t(n) + std::uint64_t(hi);
}

// Undirected labeled world: symmetric matrix of label indices, null diagonal.
// Immutable by convention once built; all operations take it by const ref.
struct WorldGraph {
  int n = 0;
  LabelAlphabet alphabet;
  std::uint64_t seed = 0;  // provenance; 0 for hand-built graphs
  std::vector<Label> adj;  // n*n row-major

  WorldGraph() = default;
  WorldGraph(int n, LabelAlphabet alphabet, std::uint64_t seed = 0);

  Label at(int i, int j) const { return adj[std::size_t(i) * n + j]; }
  void set_arc(int i, int j, Label label);  // i != j, writes both cells

  std::size_t pair_count() const { return std::size_t(n) * (n - 1) / 2; }
  std::size_t arc_count() const;  // non-null unordered pairs

  // Off-diagonal label frequencies, one entry per alphabet symbol.
  std::vector<double> empirical_label_probs() const;
  std::vector<std::uint64_t> label_counts() const;

  // Content hash (alphabet + cells, not seed); used as a memoization key.
  std::uint64_t fingerprint() const;

  void validate() const;  // symmetry, null diagonal, labels in range

  friend bool operator==(const WorldGraph&, const WorldGraph&) = default;
};

// Labeled Erdős–Rényi: each unordered pair draws its label independently
// from dist. Deterministic per (n, dist, seed).
WorldGraph generate_er_labeled(int n, const LabelDistribution& dist,
                               std::uint64_t seed);

// Every off-diagonal entry set to `label` (label != null).
WorldGraph generate_clique(int n, const LabelAlphabet& alphabet, Label label);

// Cycle 0-1-...-(n-1)-0 with `label` arcs, everything else null. n >= 3.
WorldGraph generate_ring_regular(int n, const LabelAlphabet& alphabet,
                                 Label label);

// One directed labeled arc of a multigraph input.
struct DirectedArc {
  int src = 0;
  int dst = 0;
  std::string label;
};

// Collapses a directed labeled multigraph into the canonical undirected form:
// the combined symbol between a pair encodes the multiset of (label,
// direction) terms present there, so the original arcs are recoverable.
WorldGraph reduce_multigraph(int n, std::span<const DirectedArc> arcs,
                             int max_original_labels = 16);

// Parses a combined symbol back into (label, forward?, count) terms.
struct CombinedTerm {
  std::string label;
  bool forward = true;  // true: low-id -> high-id
  int count = 1;
  friend bool operator==(const CombinedTerm&, const CombinedTerm&) = default;
};
std::vector<CombinedTerm> expand_combined_symbol(const std::string& symbol);

// Per-cell confusion channel: row a gives the distribution of the receiver's
// label where the sender's world has label a.
struct ChannelNoiseModel {
  int vocab = 0;
  std::vector<double> confusion;  // vocab×vocab row-stochastic, row-major

  static ChannelNoiseModel identity(int vocab);
  // Off-diagonal mass eps spread uniformly over the other labels; the binary
  // case is the symmetric flip channel.
  static ChannelNoiseModel symmetric(int vocab, double eps);

  double at(int a, int b) const { return confusion[std::size_t(a) * vocab + b]; }
  void validate() const;  // rows sum to 1 within 1e-9
  bool is_identity() const;

  // Sampling thresholds per row, (vocab-1) entries each, stride vocab-1.
  std::vector<std::uint64_t> row_thresholds() const;
};

struct ViewPair {
  WorldGraph sender;
  WorldGraph receiver;
  ChannelNoiseModel channel;
  std::uint64_t seed = 0;
};

// Draws the receiver view cell-by-cell from the channel row of the sender
// cell. Identity channel reproduces the sender view exactly.
ViewPair perturb_view(const WorldGraph& world, const ChannelNoiseModel& channel,
                      std::uint64_t seed);

// Lazy column sampling: labels of adjacency column `anchor` of the ER world
// (resp. its perturbed view) without materializing the matrix. Bit-identical
// to the corresponding column of generate_er_labeled / perturb_view.
void er_column_labels(int n, const LabelDistribution& dist, std::uint64_t seed,
                      int anchor, std::span<Label> out);
void perturbed_column_labels(int n, const ChannelNoiseModel& channel,
                             std::uint64_t seed, int anchor,
                             std::span<const Label> sender_column,
                             std::span<Label> out);

}  // namespace rbd
