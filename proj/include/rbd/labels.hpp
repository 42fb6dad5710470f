#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rbd {

using Label = std::uint16_t;
inline constexpr Label kNullLabel = 0;

// Display name of the "no arc" symbol.
inline constexpr char kNullSymbol[] = "∅";

// Arc label vocabulary. Index 0 is always the null (no-arc) symbol.
struct LabelAlphabet {
  std::vector<std::string> symbols;

  // Builds <null, L1, ..., Lm> from the real labels.
  static LabelAlphabet with_labels(std::vector<std::string> real_labels);

  std::size_t size() const { return symbols.size(); }
  int real_labels() const { return int(symbols.size()) - 1; }
  const std::string& name(Label l) const { return symbols.at(l); }
  Label index_of(std::string_view symbol) const;  // throws on unknown symbol

  void validate() const;  // distinct symbols, size >= 2, null at index 0

  friend bool operator==(const LabelAlphabet&, const LabelAlphabet&) = default;
};

struct LabelDistribution {
  LabelAlphabet alphabet;
  std::vector<double> probs;  // one per symbol, null included

  void validate() const;  // sums to 1 within 1e-9, sizes match, probs in [0,1]

  // Cumulative sampling thresholds t[k] = round(2^32 * sum(probs[0..k])) for
  // k = 1..V-1; a uniform word u draws label = #{k : t[k] <= u}. Shared by the
  // scalar and SIMD samplers so every path draws identically.
  std::vector<std::uint64_t> sample_thresholds() const;
};

inline Label label_from_word(std::uint32_t u, const std::uint64_t* cum, int m) {
  int c = 0;
  for (int k = 0; k < m; ++k) c += std::uint64_t(u) >= cum[k] ? 1 : 0;
  return Label(c);
}

}  // namespace rbd
