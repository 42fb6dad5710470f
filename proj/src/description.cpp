#include "rbd/description.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <stdexcept>

#include "rbd/kernels/api.hpp"

namespace rbd {

SharedContext SharedContext::prefix(std::size_t k) const {
  if (k > nodes.size()) throw std::invalid_argument("context prefix too long");
  SharedContext c;
  c.nodes.assign(nodes.begin(), nodes.begin() + k);
  return c;
}

bool SharedContext::contains(int node) const {
  return std::find(nodes.begin(), nodes.end(), node) != nodes.end();
}

void SharedContext::validate(int n) const {
  std::set<int> seen;
  for (int id : nodes) {
    if (id < 0 || id >= n) throw std::invalid_argument("shared node out of range");
    if (!seen.insert(id).second) {
      throw std::invalid_argument("duplicate shared node");
    }
  }
}

Description as_description(const FlatDescription& f) {
  Description d;
  d.symbols = f.symbols;
  d.base_len = int(f.symbols.size());
  d.depth = 0;
  return d;
}

Description as_description(const ExtendedDescription& e) {
  Description d;
  d.symbols = e.symbols;
  d.base_len = int(e.symbols.size());
  d.depth = e.depth;
  return d;
}

// --- depth vocabulary --------------------------------------------------------

std::size_t DepthVocab::size_for(std::size_t m, int depth) {
  std::size_t size = 1 + m;
  std::size_t tier = m;  // m^(t+1) codes for t intermediates
  for (int t = 1; t <= depth; ++t) {
    tier *= m;
    size += tier;
  }
  return size;
}

int DepthVocab::infer_depth(std::size_t m, std::size_t m_voc) {
  if (m_voc == m + 1) return 0;
  for (int d = 1; d <= kMaxDepth; ++d) {
    if (size_for(m, d) == m_voc) return d;
  }
  return -1;
}

DepthVocab::DepthVocab(const LabelAlphabet& base, int depth)
    : m_(base.real_labels()), depth_(depth) {
  if (depth < 1 || depth > kMaxDepth) {
    throw std::invalid_argument("depth outside [1, " +
                                std::to_string(kMaxDepth) + "]");
  }
  size_ = size_for(std::size_t(m_), depth);
  if (size_ > 65536) {
    throw std::invalid_argument("depth vocabulary exceeds 65536 codes");
  }
  tier_offset_.assign(std::size_t(depth) + 1, 0);
  std::size_t offset = 1 + std::size_t(m_);
  std::size_t tier = std::size_t(m_);
  for (int t = 1; t <= depth; ++t) {
    tier_offset_[t] = offset;
    tier *= m_;
    offset += tier;
  }
}

Label DepthVocab::path_id(std::span<const Label> path_labels) const {
  const int t = int(path_labels.size()) - 1;
  if (t < 1 || t > depth_) throw std::invalid_argument("bad path length");
  std::size_t index = 0;
  for (Label l : path_labels) {
    if (l == kNullLabel || int(l) > m_) {
      throw std::invalid_argument("path label out of range");
    }
    index = index * std::size_t(m_) + (l - 1);
  }
  return Label(tier_offset_[t] + index);
}

std::vector<Label> DepthVocab::path_labels(Label id) const {
  if (!is_path(id)) throw std::invalid_argument("not a path code");
  int t = depth_;
  while (t > 1 && std::size_t(id) < tier_offset_[t]) --t;
  std::size_t index = std::size_t(id) - tier_offset_[t];
  std::vector<Label> labels(std::size_t(t) + 1);
  for (int i = t; i >= 0; --i) {
    labels[i] = Label(index % m_ + 1);
    index /= m_;
  }
  return labels;
}

std::string DepthVocab::display(Label id, const LabelAlphabet& base) const {
  if (!is_path(id)) return base.name(id);
  std::string out = "[p:";
  const auto labels = path_labels(id);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) out += '.';
    out += base.name(labels[i]);
  }
  out += ']';
  return out;
}

std::string display_description(std::span<const Label> symbols, int depth,
                                const LabelAlphabet& base) {
  std::string out;
  if (depth == 0) {
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i > 0) out += '.';
      out += base.name(symbols[i]);
    }
    return out;
  }
  const DepthVocab vocab(base, depth);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i > 0) out += '.';
    out += vocab.display(symbols[i], base);
  }
  return out;
}

// --- builders ----------------------------------------------------------------

FlatDescription build_flat_description(const WorldGraph& world, int x,
                                       const SharedContext& ctx) {
  if (x < 0 || x >= world.n) throw std::invalid_argument("node out of range");
  ctx.validate(world.n);
  FlatDescription d;
  d.symbols.reserve(ctx.size());
  for (int s : ctx.nodes) d.symbols.push_back(world.at(x, s));
  return d;
}

namespace {

void collect_paths(const WorldGraph& w, int from, int target, int max_depth,
                   std::vector<Label>& labels, std::vector<char>& used,
                   std::set<std::vector<Label>>& out) {
  for (int v = 0; v < w.n; ++v) {
    if (used[v] || v == target) continue;
    const Label a = w.at(from, v);
    if (a == kNullLabel) continue;
    labels.push_back(a);
    const Label b = w.at(v, target);
    if (b != kNullLabel) {
      labels.push_back(b);
      out.insert(labels);
      labels.pop_back();
    }
    if (int(labels.size()) < max_depth) {
      used[v] = 1;
      collect_paths(w, v, target, max_depth, labels, used, out);
      used[v] = 0;
    }
    labels.pop_back();
  }
}

}  // namespace

std::vector<IntermediateGraphCode> enumerate_intermediate_graphs(
    const WorldGraph& world, int x, int s, int depth) {
  if (depth < 1 || depth > kMaxDepth) {
    throw std::invalid_argument("depth outside [1, " +
                                std::to_string(kMaxDepth) + "]");
  }
  if (x < 0 || x >= world.n || s < 0 || s >= world.n || x == s) {
    throw std::invalid_argument("bad endpoint pair");
  }

  std::set<std::vector<Label>> sequences;
  std::vector<Label> labels;
  std::vector<char> used(std::size_t(world.n), 0);
  used[x] = 1;
  collect_paths(world, x, s, depth, labels, used, sequences);

  std::vector<std::vector<Label>> ordered(sequences.begin(), sequences.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const std::vector<Label>& a, const std::vector<Label>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });

  const DepthVocab vocab(world.alphabet, depth);
  std::vector<IntermediateGraphCode> codes;
  codes.reserve(ordered.size());
  for (auto& seq : ordered) {
    IntermediateGraphCode c;
    c.id = vocab.path_id(seq);
    c.path_labels = std::move(seq);
    codes.push_back(std::move(c));
  }
  return codes;
}

namespace {

// Most-preferred connecting path (fewest intermediates, then lex smallest
// label sequence), or empty when none exists within the depth.
std::vector<Label> best_path_labels(const WorldGraph& w, int x, int s,
                                    int depth) {
  const int n = w.n;
  // One intermediate.
  {
    Label ba = 0, bb = 0;
    bool found = false;
    for (int v = 0; v < n; ++v) {
      if (v == x || v == s) continue;
      const Label a = w.at(x, v);
      if (a == kNullLabel) continue;
      const Label b = w.at(v, s);
      if (b == kNullLabel) continue;
      if (!found || a < ba || (a == ba && b < bb)) {
        ba = a;
        bb = b;
        found = true;
      }
    }
    if (found) return {ba, bb};
  }
  if (depth < 2) return {};
  // Two intermediates.
  {
    std::vector<Label> best;
    for (int v1 = 0; v1 < n; ++v1) {
      if (v1 == x || v1 == s) continue;
      const Label a = w.at(x, v1);
      if (a == kNullLabel) continue;
      if (!best.empty() && a > best[0]) continue;
      for (int v2 = 0; v2 < n; ++v2) {
        if (v2 == x || v2 == s || v2 == v1) continue;
        const Label b = w.at(v1, v2);
        if (b == kNullLabel) continue;
        const Label c = w.at(v2, s);
        if (c == kNullLabel) continue;
        const std::vector<Label> cand{a, b, c};
        if (best.empty() || cand < best) best = cand;
      }
    }
    if (!best.empty()) return best;
  }
  if (depth < 3) return {};
  // Three intermediates.
  {
    std::vector<Label> best;
    for (int v1 = 0; v1 < n; ++v1) {
      if (v1 == x || v1 == s) continue;
      const Label a = w.at(x, v1);
      if (a == kNullLabel) continue;
      if (!best.empty() && a > best[0]) continue;
      for (int v2 = 0; v2 < n; ++v2) {
        if (v2 == x || v2 == s || v2 == v1) continue;
        const Label b = w.at(v1, v2);
        if (b == kNullLabel) continue;
        for (int v3 = 0; v3 < n; ++v3) {
          if (v3 == x || v3 == s || v3 == v1 || v3 == v2) continue;
          const Label c = w.at(v2, v3);
          if (c == kNullLabel) continue;
          const Label d = w.at(v3, s);
          if (d == kNullLabel) continue;
          const std::vector<Label> cand{a, b, c, d};
          if (best.empty() || cand < best) best = cand;
        }
      }
    }
    return best;
  }
}

void check_rewrite_scale(int n, int depth) {
  const int cap = depth == 1 ? 2048 : depth == 2 ? 160 : 48;
  if (n > cap) {
    throw std::invalid_argument(
        "graph too large for depth-" + std::to_string(depth) +
        " rewrite (cap " + std::to_string(cap) + " nodes)");
  }
}

}  // namespace

ExtendedDescription build_extended_description(const WorldGraph& world, int x,
                                               const SharedContext& ctx,
                                               int depth) {
  if (x < 0 || x >= world.n) throw std::invalid_argument("node out of range");
  if (depth < 1 || depth > kMaxDepth) {
    throw std::invalid_argument("depth outside [1, " +
                                std::to_string(kMaxDepth) + "]");
  }
  ctx.validate(world.n);

  const DepthVocab vocab(world.alphabet, depth);
  ExtendedDescription d;
  d.depth = depth;
  d.symbols.reserve(ctx.size());
  for (int s : ctx.nodes) {
    if (s == x) {
      d.symbols.push_back(kNullLabel);
      continue;
    }
    const Label direct = world.at(x, s);
    if (direct != kNullLabel) {
      d.symbols.push_back(direct);
      continue;
    }
    const auto path = best_path_labels(world, x, s, depth);
    d.symbols.push_back(path.empty() ? kNullLabel : vocab.path_id(path));
  }
  return d;
}

WorldGraph rewrite_adjacency_for_depth(const WorldGraph& world, int depth) {
  if (depth < 1 || depth > kMaxDepth) {
    throw std::invalid_argument("depth outside [1, " +
                                std::to_string(kMaxDepth) + "]");
  }
  check_rewrite_scale(world.n, depth);
  const DepthVocab vocab(world.alphabet, depth);
  if (vocab.size() > 4096) {
    throw std::invalid_argument("rewritten alphabet too large");
  }

  LabelAlphabet enlarged;
  enlarged.symbols.reserve(vocab.size());
  enlarged.symbols.push_back(world.alphabet.symbols[0]);
  for (std::size_t id = 1; id < vocab.size(); ++id) {
    enlarged.symbols.push_back(vocab.display(Label(id), world.alphabet));
  }

  WorldGraph out(world.n, std::move(enlarged), world.seed);
  for (int i = 0; i < world.n; ++i) {
    for (int j = i + 1; j < world.n; ++j) {
      Label l = world.at(i, j);
      if (l == kNullLabel) {
        const auto path = best_path_labels(world, i, j, depth);
        if (!path.empty()) l = vocab.path_id(path);
      }
      if (l != kNullLabel) out.set_arc(i, j, l);
    }
  }
  return out;
}

namespace {

// Memoized depth rewrites, keyed by content fingerprint. Optimization only;
// results are identical to calling rewrite_adjacency_for_depth directly.
class RewriteCache {
 public:
  const WorldGraph& get(const WorldGraph& world, int depth) {
    const std::pair<std::uint64_t, int> key{world.fingerprint(), depth};
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      if (cache_.size() >= 64) cache_.clear();
      it = cache_.emplace(key, rewrite_adjacency_for_depth(world, depth)).first;
    }
    return it->second;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::uint64_t, int>, WorldGraph> cache_;
};

}  // namespace

const WorldGraph& depth_view(const WorldGraph& world, int depth) {
  if (depth == 0) return world;
  static RewriteCache cache;
  return cache.get(world, depth);
}

// --- entropy of complex descriptions ------------------------------------------

double extended_description_entropy(double h_g, int d, int n) {
  if (h_g < 0) throw std::invalid_argument("graph entropy must be nonnegative");
  if (d < 1 || n < d) throw std::invalid_argument("need 1 <= d <= n");
  if (h_g == 0.0) return 0.0;
  const double x = h_g * double(d) * double(d);
  if (d == n) return x;  // uniform typical-set limit: H_D = h_g * n^2

  // P(L_D) = 1 - (1 - 2^-x)^C(n,d), kept in log space throughout.
  const double ln_choose = std::lgamma(double(n) + 1) - std::lgamma(double(d) + 1) -
                           std::lgamma(double(n - d) + 1);
  const double choose = std::exp(ln_choose);
  double ln_q = x > 1060 ? 0.0 : choose * std::log1p(-std::exp2(-x));
  if (ln_q < -745.0) ln_q = -745.0;  // q underflows; the tail carries no mass
  const double q = std::exp(ln_q);
  const double p = -std::expm1(ln_q);
  if (p <= 0.0) return 0.0;  // no intermediate structure ever occurs

  // Term count J = 2^x, exact integer when representable.
  const double j_terms = x <= 52 ? std::floor(std::exp2(x)) : std::exp2(x);

  // H = -sum_{j=1}^{J} PA_j log2 PA_j for PA_j = p q^(j-1); closed form of the
  // truncated geometric sum, exact for every J.
  const double ln_qj = j_terms * ln_q;
  const double qj = ln_qj < -745.0 ? 0.0 : std::exp(ln_qj);
  const double s1 = 1.0 - qj;
  const double numer = q - j_terms * qj + (j_terms - 1.0) * qj * q;
  const double log2_p = std::log(p) / std::numbers::ln2;
  const double log2_q = ln_q / std::numbers::ln2;
  double h = -s1 * log2_p;
  if (q > 0.0 && numer > 0.0) h -= log2_q * (numer / p);
  return h < 0.0 ? 0.0 : h;
}

// --- decoding ------------------------------------------------------------------

namespace {

void validate_description(const Description& desc, const SharedContext& ctx,
                          std::size_t vocab) {
  if (desc.base_len < 0 || desc.ext_len < 0 ||
      std::size_t(desc.base_len) + std::size_t(desc.ext_len) !=
          desc.symbols.size()) {
    throw std::invalid_argument("description length fields inconsistent");
  }
  if (desc.symbols.size() != ctx.size()) {
    throw std::invalid_argument("description length does not match context");
  }
  for (Label l : desc.symbols) {
    if (std::size_t(l) >= vocab) {
      throw std::invalid_argument("description symbol out of vocabulary");
    }
  }
}

}  // namespace

std::vector<int> decode_exact(const WorldGraph& view, const Description& desc,
                              const SharedContext& ctx) {
  ctx.validate(view.n);
  const WorldGraph& dv = depth_view(view, desc.depth);
  validate_description(desc, ctx, dv.alphabet.size());

  std::vector<int> matches;
  for (int y = 0; y < view.n; ++y) {
    bool ok = true;
    for (std::size_t j = 0; j < desc.symbols.size() && ok; ++j) {
      ok = dv.at(y, ctx.nodes[j]) == desc.symbols[j];
    }
    if (ok) matches.push_back(y);
  }
  return matches;
}

namespace {

std::vector<Label> gather_anchor_columns(const WorldGraph& view,
                                         std::span<const int> anchors) {
  std::vector<Label> cols(anchors.size() * std::size_t(view.n));
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    const int anchor = anchors[j];
    if (anchor < 0 || anchor >= view.n) {
      throw std::invalid_argument("anchor out of range");
    }
    for (int y = 0; y < view.n; ++y) {
      cols[j * std::size_t(view.n) + y] = view.at(y, anchor);
    }
  }
  return cols;
}

}  // namespace

MlDecoder::MlDecoder(const WorldGraph& view, std::span<const int> anchors,
                     const JointLabelStats& stats)
    : MlDecoder(view.n, anchors.size(), gather_anchor_columns(view, anchors),
                stats) {
  if (vocab_ != view.alphabet.size()) {
    throw std::invalid_argument("stats vocabulary does not match view");
  }
}

MlDecoder::MlDecoder(int candidates, std::size_t slots, std::vector<Label> cols,
                     const JointLabelStats& stats)
    : n_(candidates),
      vocab_(std::size_t(stats.vocab)),
      slots_(slots),
      cols_(std::move(cols)) {
  if (stats.total == 0) throw std::invalid_argument("empty joint stats");
  if (n_ < 1 || cols_.size() != slots_ * std::size_t(n_)) {
    throw std::invalid_argument("bad column layout");
  }
  for (Label l : cols_) {
    if (std::size_t(l) >= vocab_) {
      throw std::invalid_argument("column label outside stats vocabulary");
    }
  }

  const auto col_sums = stats.receiver_marginal();
  logp_.assign(vocab_ * vocab_, -std::numeric_limits<double>::infinity());
  logp_smoothed_.resize(vocab_ * vocab_);
  for (std::size_t r = 0; r < vocab_; ++r) {
    const double sum = double(col_sums[r]);
    const double smoothed_sum = sum + double(vocab_);
    for (std::size_t s = 0; s < vocab_; ++s) {
      const auto c = stats.at(int(s), int(r));
      if (c > 0) logp_[s * vocab_ + r] = std::log2(double(c) / sum);
      logp_smoothed_[s * vocab_ + r] = std::log2((double(c) + 1.0) / smoothed_sum);
    }
  }
}

void MlDecoder::scores(std::span<const Label> symbols, std::span<double> out,
                       bool smoothed) const {
  if (symbols.size() != slots_ || out.size() != std::size_t(n_)) {
    throw std::invalid_argument("bad score request");
  }
  for (Label l : symbols) {
    if (std::size_t(l) >= vocab_) {
      throw std::invalid_argument("description symbol out of vocabulary");
    }
  }
  kernels::active().ml_scores(symbols.data(), slots_, cols_.data(),
                              std::size_t(n_),
                              smoothed ? logp_smoothed_.data() : logp_.data(),
                              vocab_, out.data());
}

MlDecode MlDecoder::decode(std::span<const Label> symbols) const {
  std::vector<double> s(std::size_t(n_));
  scores(symbols, s, false);

  MlDecode result;
  auto pick = [&]() {
    result.node = 0;
    double best = s[0], second = -std::numeric_limits<double>::infinity();
    for (int y = 1; y < n_; ++y) {
      if (s[y] > best) {
        second = best;
        best = s[y];
        result.node = y;
      } else if (s[y] > second) {
        second = s[y];
      }
    }
    result.log_likelihood = best;
    result.ambiguous =
        n_ > 1 && (best - second) <= 1e-9;  // -inf ties are ambiguous too
    if (std::isinf(best) && std::isinf(second)) result.ambiguous = true;
  };

  pick();
  if (std::isinf(result.log_likelihood) && result.log_likelihood < 0) {
    // No candidate explains the description at all: add-one fallback.
    scores(symbols, s, true);
    result.smoothed = true;
    pick();
  }
  return result;
}

MlDecode decode_max_likelihood(const WorldGraph& receiver_view,
                               const Description& desc,
                               const SharedContext& ctx,
                               const JointLabelStats& stats) {
  ctx.validate(receiver_view.n);
  const WorldGraph& dv = depth_view(receiver_view, desc.depth);
  validate_description(desc, ctx, dv.alphabet.size());
  const MlDecoder decoder(dv, ctx.nodes, stats);
  return decoder.decode(desc.symbols);
}

// --- sharing thresholds ----------------------------------------------------------

double expected_collisions(int n, double bits_per_symbol, int k) {
  return std::exp2(2.0 * std::log2(double(n)) - bits_per_symbol * k - 1.0);
}

ThresholdPrediction min_shared_names(int n, double bits_per_symbol, double g) {
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (bits_per_symbol < 0 || g <= 0) {
    throw std::invalid_argument("bad threshold parameters");
  }
  ThresholdPrediction p;
  p.n = n;
  p.bits_per_symbol = bits_per_symbol;
  p.g = g;
  if (bits_per_symbol == 0.0) {
    // Zero-entropy descriptions distinguish nothing; every name is shared.
    p.share_all = true;
    p.k_star = n;
    p.expected_collisions = 0.0;
    return p;
  }
  const double k = g * std::log2(double(n)) / bits_per_symbol;
  p.k_star = int(std::ceil(k - 1e-9));
  p.expected_collisions = expected_collisions(n, bits_per_symbol, p.k_star);
  return p;
}

LengthBounds description_length_bounds(int n, double h_d, double m_d) {
  if (m_d <= 0) throw std::invalid_argument("mutual information must be positive");
  if (h_d < m_d) throw std::invalid_argument("need h_d >= m_d");
  if (n < 2) throw std::invalid_argument("need n >= 2");
  LengthBounds b;
  const double log_n = std::log2(double(n));
  b.min_symbols = 2.0 * log_n / m_d;
  b.min_info_bits = 2.0 * log_n * h_d / m_d;
  return b;
}

IdentifiabilityReport identifiability_report(double revealed_bits, int n,
                                             double h_d, double m_d) {
  if (revealed_bits < 0) throw std::invalid_argument("negative revealed bits");
  const LengthBounds b = description_length_bounds(n, h_d, m_d);
  IdentifiabilityReport r;
  r.bound_bits = b.min_info_bits;
  r.margin_bits = revealed_bits - b.min_info_bits;
  if (r.margin_bits > 1.0) {
    r.verdict = Identifiability::Yes;
  } else if (r.margin_bits < -1.0) {
    r.verdict = Identifiability::No;
  } else {
    r.verdict = Identifiability::Marginal;
  }
  return r;
}

}  // namespace rbd
