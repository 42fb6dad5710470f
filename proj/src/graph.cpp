#include "rbd/graph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "rbd/kernels/api.hpp"

namespace rbd {

WorldGraph::WorldGraph(int n_, LabelAlphabet alphabet_, std::uint64_t seed_)
    : n(n_), alphabet(std::move(alphabet_)), seed(seed_) {
  if (n < 1 || n > kMaxNodes) {
    throw std::invalid_argument("node count outside [1, " +
                                std::to_string(kMaxNodes) + "]");
  }
  alphabet.validate();
  adj.assign(std::size_t(n) * n, kNullLabel);
}

void WorldGraph::set_arc(int i, int j, Label label) {
  if (i == j) throw std::invalid_argument("self-loops are excluded");
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw std::invalid_argument("arc endpoint out of range");
  }
  if (label >= alphabet.size()) {
    throw std::invalid_argument("label index out of range");
  }
  adj[std::size_t(i) * n + j] = label;
  adj[std::size_t(j) * n + i] = label;
}

std::size_t WorldGraph::arc_count() const {
  std::size_t arcs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (at(i, j) != kNullLabel) ++arcs;
    }
  }
  return arcs;
}

std::vector<std::uint64_t> WorldGraph::label_counts() const {
  std::vector<std::uint64_t> counts(alphabet.size(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) counts[at(i, j)]++;
  }
  return counts;
}

std::vector<double> WorldGraph::empirical_label_probs() const {
  const auto counts = label_counts();
  std::vector<double> probs(counts.size(), 0.0);
  const double total = double(pair_count());
  if (total > 0) {
    for (std::size_t k = 0; k < counts.size(); ++k) {
      probs[k] = double(counts[k]) / total;
    }
  }
  return probs;
}

std::uint64_t WorldGraph::fingerprint() const {
  constexpr std::uint64_t kPrime = 1099511628211ull;
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h = (h ^ ((v >> (8 * b)) & 0xFF)) * kPrime;
    }
  };
  mix(std::uint64_t(n));
  for (const auto& s : alphabet.symbols) {
    for (unsigned char c : s) h = (h ^ c) * kPrime;
    h = (h ^ 0xFF) * kPrime;
  }
  for (Label l : adj) mix(l);
  return h;
}

void WorldGraph::validate() const {
  alphabet.validate();
  if (adj.size() != std::size_t(n) * n) {
    throw std::invalid_argument("adjacency size mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (at(i, i) != kNullLabel) throw std::invalid_argument("non-null diagonal");
    for (int j = i + 1; j < n; ++j) {
      if (at(i, j) != at(j, i)) throw std::invalid_argument("asymmetric matrix");
      if (at(i, j) >= alphabet.size()) {
        throw std::invalid_argument("label out of alphabet range");
      }
    }
  }
}

WorldGraph generate_er_labeled(int n, const LabelDistribution& dist,
                               std::uint64_t seed) {
  dist.validate();
  if (n < 2) throw std::invalid_argument("ER generation needs n >= 2");
  WorldGraph g(n, dist.alphabet, seed);

  const auto cum = dist.sample_thresholds();
  const int m = int(cum.size());
  const auto& k = kernels::active();

  std::vector<std::uint32_t> words(std::size_t(n));
  std::vector<Label> row(std::size_t(n));
  for (int i = 0; i + 1 < n; ++i) {
    const std::size_t count = std::size_t(n - i - 1);
    const std::uint64_t first = std::uint64_t(i) * n + i + 1;
    k.philox_fill(seed, kStreamGenerate, first, count, words.data());
    k.sample_labels(words.data(), count, cum.data(), m, row.data());
    for (std::size_t t = 0; t < count; ++t) {
      const int j = i + 1 + int(t);
      g.adj[std::size_t(i) * n + j] = row[t];
      g.adj[std::size_t(j) * n + i] = row[t];
    }
  }
  return g;
}

WorldGraph generate_clique(int n, const LabelAlphabet& alphabet, Label label) {
  if (n < 2) throw std::invalid_argument("clique needs n >= 2");
  if (label == kNullLabel) {
    throw std::invalid_argument("clique label must not be the null symbol");
  }
  if (label >= alphabet.size()) {
    throw std::invalid_argument("label index out of range");
  }
  WorldGraph g(n, alphabet);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) g.adj[std::size_t(i) * n + j] = label;
    }
  }
  return g;
}

WorldGraph generate_ring_regular(int n, const LabelAlphabet& alphabet,
                                 Label label) {
  if (n < 3) throw std::invalid_argument("ring needs n >= 3");
  if (label == kNullLabel) {
    throw std::invalid_argument("ring label must not be the null symbol");
  }
  WorldGraph g(n, alphabet);
  for (int i = 0; i < n; ++i) g.set_arc(i, (i + 1) % n, label);
  return g;
}

namespace {

std::string combined_symbol(const std::map<std::pair<std::string, bool>, int>& terms) {
  std::string out;
  for (const auto& [key, count] : terms) {
    if (!out.empty()) out += '+';
    out += key.first;
    out += key.second ? '>' : '<';
    if (count > 1) out += "*" + std::to_string(count);
  }
  return out;
}

}  // namespace

WorldGraph reduce_multigraph(int n, std::span<const DirectedArc> arcs,
                             int max_original_labels) {
  if (n < 1 || n > kMaxNodes) throw std::invalid_argument("bad node count");

  // (label, low-to-high?) term multiset per unordered pair.
  std::map<std::pair<int, int>, std::map<std::pair<std::string, bool>, int>> pairs;
  std::map<std::string, int> original_labels;
  for (const auto& a : arcs) {
    if (a.src < 0 || a.src >= n || a.dst < 0 || a.dst >= n) {
      throw std::invalid_argument("arc endpoint out of range");
    }
    if (a.src == a.dst) throw std::invalid_argument("self-loops are excluded");
    if (a.label.empty() || a.label == kNullSymbol) {
      throw std::invalid_argument("bad arc label");
    }
    if (a.label.find_first_of("+<>*,") != std::string::npos) {
      throw std::invalid_argument("arc label contains reserved characters");
    }
    original_labels[a.label]++;
    const bool forward = a.src < a.dst;
    const auto key = std::minmax(a.src, a.dst);
    pairs[{key.first, key.second}][{a.label, forward}]++;
  }
  if (int(original_labels.size()) > max_original_labels) {
    throw std::invalid_argument("original label set exceeds the configured bound");
  }

  std::map<std::string, Label> symbol_ids;
  std::vector<std::string> symbols;
  for (const auto& [pair, terms] : pairs) {
    const std::string sym = combined_symbol(terms);
    if (symbol_ids.emplace(sym, 0).second) symbols.push_back(sym);
  }
  std::sort(symbols.begin(), symbols.end());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    symbol_ids[symbols[i]] = Label(i + 1);
  }

  // A reduced graph always carries at least one real symbol slot.
  if (symbols.empty()) symbols.emplace_back("unused");
  WorldGraph g(n, LabelAlphabet::with_labels(symbols));
  for (const auto& [pair, terms] : pairs) {
    g.set_arc(pair.first, pair.second, symbol_ids.at(combined_symbol(terms)));
  }
  return g;
}

std::vector<CombinedTerm> expand_combined_symbol(const std::string& symbol) {
  std::vector<CombinedTerm> terms;
  std::size_t pos = 0;
  while (pos < symbol.size()) {
    std::size_t end = symbol.find('+', pos);
    if (end == std::string::npos) end = symbol.size();
    const std::string term = symbol.substr(pos, end - pos);
    const std::size_t dir = term.find_first_of("<>");
    if (dir == std::string::npos || dir == 0) {
      throw std::invalid_argument("malformed combined symbol: " + symbol);
    }
    CombinedTerm t;
    t.label = term.substr(0, dir);
    t.forward = term[dir] == '>';
    if (dir + 1 < term.size()) {
      if (term[dir + 1] != '*') {
        throw std::invalid_argument("malformed combined symbol: " + symbol);
      }
      t.count = std::stoi(term.substr(dir + 2));
    }
    terms.push_back(std::move(t));
    pos = end + 1;
  }
  return terms;
}

ChannelNoiseModel ChannelNoiseModel::identity(int vocab) {
  ChannelNoiseModel c;
  c.vocab = vocab;
  c.confusion.assign(std::size_t(vocab) * vocab, 0.0);
  for (int a = 0; a < vocab; ++a) c.confusion[std::size_t(a) * vocab + a] = 1.0;
  return c;
}

ChannelNoiseModel ChannelNoiseModel::symmetric(int vocab, double eps) {
  if (vocab < 2) throw std::invalid_argument("channel needs vocab >= 2");
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("flip probability outside [0, 1]");
  }
  ChannelNoiseModel c;
  c.vocab = vocab;
  c.confusion.assign(std::size_t(vocab) * vocab, eps / (vocab - 1));
  for (int a = 0; a < vocab; ++a) {
    c.confusion[std::size_t(a) * vocab + a] = 1.0 - eps;
  }
  return c;
}

void ChannelNoiseModel::validate() const {
  if (vocab < 2 || confusion.size() != std::size_t(vocab) * vocab) {
    throw std::invalid_argument("bad confusion matrix shape");
  }
  for (int a = 0; a < vocab; ++a) {
    double sum = 0.0;
    for (int b = 0; b < vocab; ++b) {
      const double p = at(a, b);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("confusion entry outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("confusion row does not sum to 1");
    }
  }
}

bool ChannelNoiseModel::is_identity() const {
  for (int a = 0; a < vocab; ++a) {
    for (int b = 0; b < vocab; ++b) {
      if (at(a, b) != (a == b ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

std::vector<std::uint64_t> ChannelNoiseModel::row_thresholds() const {
  validate();
  const int m = vocab - 1;
  std::vector<std::uint64_t> t(std::size_t(vocab) * m, 0);
  for (int a = 0; a < vocab; ++a) {
    double cum = 0.0;
    std::uint64_t prev = 0;
    for (int k = 0; k < m; ++k) {
      cum += at(a, k);
      auto v = std::uint64_t(std::llround(cum * 4294967296.0));
      if (v > 0x100000000ull) v = 0x100000000ull;
      if (v < prev) v = prev;
      t[std::size_t(a) * m + k] = v;
      prev = v;
    }
  }
  return t;
}

ViewPair perturb_view(const WorldGraph& world, const ChannelNoiseModel& channel,
                      std::uint64_t seed) {
  if (channel.vocab != int(world.alphabet.size())) {
    throw std::invalid_argument("channel dimension does not match alphabet");
  }
  channel.validate();

  ViewPair pair;
  pair.sender = world;
  pair.channel = channel;
  pair.seed = seed;
  pair.receiver = WorldGraph(world.n, world.alphabet, seed);

  const auto rows = channel.row_thresholds();
  const int m = channel.vocab - 1;
  const auto& k = kernels::active();
  const int n = world.n;

  std::vector<std::uint32_t> words(std::size_t(n));
  std::vector<Label> out(std::size_t(n));
  for (int i = 0; i + 1 < n; ++i) {
    const std::size_t count = std::size_t(n - i - 1);
    const std::uint64_t first = std::uint64_t(i) * n + i + 1;
    const Label* given = world.adj.data() + std::size_t(i) * n + i + 1;
    k.philox_fill(seed, kStreamPerturb, first, count, words.data());
    k.sample_conditional(words.data(), given, count, rows.data(), m,
                         std::size_t(m), out.data());
    for (std::size_t t = 0; t < count; ++t) {
      const int j = i + 1 + int(t);
      pair.receiver.adj[std::size_t(i) * n + j] = out[t];
      pair.receiver.adj[std::size_t(j) * n + i] = out[t];
    }
  }
  return pair;
}

void er_column_labels(int n, const LabelDistribution& dist, std::uint64_t seed,
                      int anchor, std::span<Label> out) {
  if (anchor < 0 || anchor >= n || int(out.size()) != n) {
    throw std::invalid_argument("bad column request");
  }
  const auto cum = dist.sample_thresholds();
  const int m = int(cum.size());
  const UniformStream stream(seed, kStreamGenerate);

  out[anchor] = kNullLabel;
  for (int y = 0; y < anchor; ++y) {
    out[y] = label_from_word(stream.word(cell_word_index(y, anchor, n)),
                             cum.data(), m);
  }
  const std::size_t tail = std::size_t(n - anchor - 1);
  if (tail > 0) {
    std::vector<std::uint32_t> words(tail);
    const auto& k = kernels::active();
    k.philox_fill(seed, kStreamGenerate,
                  std::uint64_t(anchor) * n + anchor + 1, tail, words.data());
    k.sample_labels(words.data(), tail, cum.data(), m, &out[anchor + 1]);
  }
}

void perturbed_column_labels(int n, const ChannelNoiseModel& channel,
                             std::uint64_t seed, int anchor,
                             std::span<const Label> sender_column,
                             std::span<Label> out) {
  if (anchor < 0 || anchor >= n || int(out.size()) != n ||
      int(sender_column.size()) != n) {
    throw std::invalid_argument("bad column request");
  }
  const auto rows = channel.row_thresholds();
  const int m = channel.vocab - 1;
  const UniformStream stream(seed, kStreamPerturb);

  out[anchor] = kNullLabel;
  for (int y = 0; y < anchor; ++y) {
    const std::uint32_t u = stream.word(cell_word_index(y, anchor, n));
    out[y] = label_from_word(u, rows.data() + std::size_t(sender_column[y]) * m, m);
  }
  const std::size_t tail = std::size_t(n - anchor - 1);
  if (tail > 0) {
    std::vector<std::uint32_t> words(tail);
    const auto& k = kernels::active();
    k.philox_fill(seed, kStreamPerturb, std::uint64_t(anchor) * n + anchor + 1,
                  tail, words.data());
    k.sample_conditional(words.data(), &sender_column[anchor + 1], tail,
                         rows.data(), m, std::size_t(m), &out[anchor + 1]);
  }
}

}  // namespace rbd
