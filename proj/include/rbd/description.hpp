#pragma once

#include <span>
#include <string>
#include <vector>

#include "rbd/graph.hpp"
#include "rbd/info.hpp"

namespace rbd {

// Runtime cap on connecting-path depth (intermediate node count). The d = n
// limit of the entropy formula is handled analytically, never by enumeration.
inline constexpr int kMaxDepth = 3;

// The ordered shared-name anchors S_1..S_K. Descriptions index into it.
struct SharedContext {
  std::vector<int> nodes;

  std::size_t size() const { return nodes.size(); }
  SharedContext prefix(std::size_t k) const;
  bool contains(int node) const;
  void validate(int n) const;  // distinct ids in [0, n)
};

// Length-K string of direct arc labels between a node and each anchor.
struct FlatDescription {
  std::vector<Label> symbols;
  friend bool operator==(const FlatDescription&, const FlatDescription&) = default;
};

// Canonical name of one connecting-structure class between a node and an
// anchor: the arc-label sequence of a simple path read from the subject node.
// Endpoints are distinguished (subject vs anchor), so the sequence itself is
// the canonical form; relabeling intermediate nodes cannot change it.
struct IntermediateGraphCode {
  std::vector<Label> path_labels;  // t+1 arc labels for t intermediate nodes
  Label id = 0;                    // position in the depth-vocabulary order
  friend bool operator==(const IntermediateGraphCode&,
                         const IntermediateGraphCode&) = default;
};

// Flat description whose null slots are refined with the most-preferred
// connecting-path code of <= depth intermediate nodes.
struct ExtendedDescription {
  std::vector<Label> symbols;  // ids into the depth vocabulary
  int depth = 1;
  friend bool operator==(const ExtendedDescription&,
                         const ExtendedDescription&) = default;
};

// Wire/runtime form. Slot j is anchored at ctx.nodes[j]; slots beyond
// base_len are the redundancy extension. depth 0 means flat symbols.
// depth is a decoding hint derivable from the vocabulary size, so it is not
// part of wire identity and is excluded from equality.
struct Description {
  std::vector<Label> symbols;
  int base_len = 0;
  int ext_len = 0;
  int depth = 0;

  friend bool operator==(const Description& a, const Description& b) {
    return a.symbols == b.symbols && a.base_len == b.base_len &&
           a.ext_len == b.ext_len;
  }
};

Description as_description(const FlatDescription& f);
Description as_description(const ExtendedDescription& e);

// Enlarged description alphabet for a given depth:
//   0            null
//   1..m         direct labels
//   then         path codes, ordered by (intermediate count asc, labels lex)
// The order is the agreed total order; smaller structures are preferred.
class DepthVocab {
 public:
  DepthVocab(const LabelAlphabet& base, int depth);

  static std::size_t size_for(std::size_t real_labels, int depth);
  // Depth whose vocabulary over `real_labels` has size m_voc; 0 means the
  // plain alphabet (flat), -1 means no depth matches.
  static int infer_depth(std::size_t real_labels, std::size_t m_voc);

  std::size_t size() const { return size_; }
  int depth() const { return depth_; }
  int real_labels() const { return m_; }

  Label path_id(std::span<const Label> path_labels) const;
  bool is_path(Label id) const { return id > Label(m_); }
  std::vector<Label> path_labels(Label id) const;

  // Display form: null "∅", direct labels by name, paths "[p:P.P]".
  std::string display(Label id, const LabelAlphabet& base) const;

 private:
  int m_ = 0;
  int depth_ = 0;
  std::size_t size_ = 0;
  std::vector<std::size_t> tier_offset_;  // id offset of t-intermediate codes
};

std::string display_description(std::span<const Label> symbols, int depth,
                                const LabelAlphabet& base);

// --- builders -------------------------------------------------------------

FlatDescription build_flat_description(const WorldGraph& world, int x,
                                       const SharedContext& ctx);

// All connecting simple paths of 1..depth intermediate nodes between x and s,
// deduplicated by label sequence, sorted by the total order.
std::vector<IntermediateGraphCode> enumerate_intermediate_graphs(
    const WorldGraph& world, int x, int s, int depth);

ExtendedDescription build_extended_description(const WorldGraph& world, int x,
                                               const SharedContext& ctx,
                                               int depth);

// Replaces every null off-diagonal cell with the most-preferred connecting
// code of <= depth intermediates (or keeps null). The result carries the
// enlarged alphabet; it is the basis for H_D and M_D measurement.
WorldGraph rewrite_adjacency_for_depth(const WorldGraph& world, int depth);

// Memoized rewrite (internally synchronized; an optimization only).
// depth 0 returns the input itself.
const WorldGraph& depth_view(const WorldGraph& world, int depth);

// --- entropy of complex descriptions ---------------------------------------

// Entropy (bits/symbol) of the depth-d description alphabet over a graph of
// per-cell entropy h_g: P(L_D) = 1 - (1 - 2^-(h_g d^2))^C(n,d), the code
// probabilities PA(L_Dj) = P (1-P)^(j-1) over j = 1..2^(h_g d^2), and
// H_D = sum of -PA log2 PA. Evaluated in closed form (exact for every term
// count; log-space, never overflows). d == n returns h_g * n^2 exactly.
double extended_description_entropy(double h_g, int d, int n);

// --- decoding ---------------------------------------------------------------

// All nodes of `view` whose (flat or depth-rewritten) description string over
// the first symbols.size() anchors equals the description exactly. Empty and
// multi-candidate results are valid.
std::vector<int> decode_exact(const WorldGraph& view, const Description& desc,
                              const SharedContext& ctx);

struct MlDecode {
  int node = -1;
  double log_likelihood = 0;
  bool ambiguous = false;  // top two scores tie within 1e-9
  bool smoothed = false;   // add-one fallback was needed
};

// Prepared maximum-likelihood scorer: candidate columns and the channel's
// column-conditional log-probabilities are built once, then many descriptions
// can be decoded against them. Scores are identical across kernel backends.
class MlDecoder {
 public:
  // view must already be at the description's depth.
  MlDecoder(const WorldGraph& view, std::span<const int> anchors,
            const JointLabelStats& stats);

  // From pre-gathered candidate columns, slot-major [slot][candidate].
  MlDecoder(int candidates, std::size_t slots, std::vector<Label> cols,
            const JointLabelStats& stats);

  MlDecode decode(std::span<const Label> symbols) const;
  void scores(std::span<const Label> symbols, std::span<double> out,
              bool smoothed) const;
  int candidates() const { return n_; }

 private:
  int n_ = 0;
  std::size_t vocab_ = 0;
  std::size_t slots_ = 0;
  std::vector<Label> cols_;  // slot-major [slot][candidate]
  std::vector<double> logp_;
  std::vector<double> logp_smoothed_;
};

// score(y) = sum_j log2 P(sender symbol desc_j | receiver symbol at (y, S_j)),
// conditionals taken from the joint table columns. Deterministic tie-break on
// the smallest node id.
MlDecode decode_max_likelihood(const WorldGraph& receiver_view,
                               const Description& desc,
                               const SharedContext& ctx,
                               const JointLabelStats& stats);

// --- sharing thresholds ------------------------------------------------------

struct ThresholdPrediction {
  int n = 0;
  double bits_per_symbol = 0;  // H_D or M_D
  double g = 0;
  int k_star = 0;
  double expected_collisions = 0;
  bool share_all = false;  // zero-entropy world: every name must be shared
};

// k_star = ceil(g log2(n) / bits); expected collisions n^2 / 2^(bits k + 1).
ThresholdPrediction min_shared_names(int n, double bits_per_symbol, double g);
double expected_collisions(int n, double bits_per_symbol, int k);

struct LengthBounds {
  double min_symbols = 0;
  double min_info_bits = 0;
};

// Minimum description length 2log2(n)/m_d symbols and information content
// 2log2(n) h_d/m_d bits; identical views are the m_d == h_d case.
LengthBounds description_length_bounds(int n, double h_d, double m_d);

enum class Identifiability { No, Marginal, Yes };

struct IdentifiabilityReport {
  Identifiability verdict = Identifiability::No;
  double bound_bits = 0;
  double margin_bits = 0;  // revealed - bound
};

// Compares revealed bits against the identification lower bound; marginal
// within +/- 1 bit.
IdentifiabilityReport identifiability_report(double revealed_bits, int n,
                                             double h_d, double m_d);

}  // namespace rbd
