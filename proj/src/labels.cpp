#include "rbd/labels.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace rbd {

LabelAlphabet LabelAlphabet::with_labels(std::vector<std::string> real_labels) {
  LabelAlphabet a;
  a.symbols.reserve(real_labels.size() + 1);
  a.symbols.emplace_back(kNullSymbol);
  for (auto& s : real_labels) a.symbols.push_back(std::move(s));
  a.validate();
  return a;
}

Label LabelAlphabet::index_of(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] == symbol) return Label(i);
  }
  throw std::invalid_argument("unknown label symbol: " + std::string(symbol));
}

void LabelAlphabet::validate() const {
  if (symbols.size() < 2) {
    throw std::invalid_argument("alphabet needs the null symbol plus at least one label");
  }
  if (symbols.size() > 65536) {
    throw std::invalid_argument("alphabet exceeds 65536 symbols");
  }
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols) {
    if (s.empty()) throw std::invalid_argument("empty label symbol");
    if (!seen.insert(s).second) {
      throw std::invalid_argument("duplicate label symbol: " + s);
    }
  }
}

void LabelDistribution::validate() const {
  alphabet.validate();
  if (probs.size() != alphabet.size()) {
    throw std::invalid_argument("distribution length does not match alphabet");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("label probability outside [0, 1]");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("label probabilities must sum to 1");
  }
}

std::vector<std::uint64_t> LabelDistribution::sample_thresholds() const {
  validate();
  std::vector<std::uint64_t> t;
  t.reserve(probs.size() - 1);
  double cum = 0.0;
  std::uint64_t prev = 0;
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    cum += probs[k];
    auto v = std::uint64_t(std::llround(cum * 4294967296.0));
    if (v > 0x100000000ull) v = 0x100000000ull;
    if (v < prev) v = prev;  // monotone under accumulated rounding
    t.push_back(v);
    prev = v;
  }
  return t;
}

}  // namespace rbd
