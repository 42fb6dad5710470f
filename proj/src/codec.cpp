#include "rbd/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

#include "rbd/errors.hpp"

namespace rbd {

NodeRef NodeRef::shared(int node) {
  NodeRef r;
  r.kind = Kind::SharedName;
  r.node = node;
  return r;
}

NodeRef NodeRef::described(Description desc) {
  NodeRef r;
  r.kind = Kind::Described;
  r.desc = std::move(desc);
  return r;
}

const char* to_string(ResolveFlag flag) {
  switch (flag) {
    case ResolveFlag::Exact:
      return "exact";
    case ResolveFlag::Ml:
      return "ml";
    case ResolveFlag::Ambiguous:
      return "ambiguous";
    case ResolveFlag::Failed:
      return "failed";
  }
  return "unknown";
}

// --- varints -------------------------------------------------------------------

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(std::uint8_t(v) | 0x80);
    v >>= 7;
  }
  out.push_back(std::uint8_t(v));
}

std::uint64_t get_varint(std::span<const std::uint8_t> in, std::size_t& offset) {
  std::uint64_t v = 0;
  int shift = 0;
  for (int i = 0; i < 10; ++i) {
    if (offset >= in.size()) throw ParseError("truncated varint", offset);
    const std::uint8_t byte = in[offset++];
    v |= std::uint64_t(byte & 0x7F) << shift;
    if ((byte & 0x80) == 0) return v;
    shift += 7;
  }
  throw ParseError("varint too long", offset);
}

// --- static-model arithmetic coder ----------------------------------------------

namespace {

constexpr std::uint32_t kHalf = 0x80000000u;
constexpr std::uint32_t kQuarter = 0x40000000u;
constexpr std::uint32_t kThreeQuarters = 0xC0000000u;
constexpr std::uint64_t kMaxTotal = 1ull << 30;

struct CoderModel {
  std::vector<std::uint64_t> cum;  // size V+1
  std::uint64_t total = 0;
};

// Deterministic rescale keeps totals within coder precision while preserving
// every nonzero symbol. Encoder and decoder derive it from the same counts.
CoderModel build_model(std::span<const std::uint64_t> freqs) {
  std::vector<std::uint64_t> f(freqs.begin(), freqs.end());
  std::uint64_t total = 0;
  for (auto v : f) total += v;
  while (total > kMaxTotal) {
    total = 0;
    for (auto& v : f) {
      if (v > 0) v = std::max<std::uint64_t>(1, v / 2);
      total += v;
    }
  }
  CoderModel m;
  m.cum.assign(f.size() + 1, 0);
  for (std::size_t i = 0; i < f.size(); ++i) m.cum[i + 1] = m.cum[i] + f[i];
  m.total = m.cum.back();
  return m;
}

class BitWriter {
 public:
  void put(int bit) {
    cur_ = std::uint8_t((cur_ << 1) | (bit & 1));
    if (++nbits_ == 8) {
      bytes_.push_back(cur_);
      cur_ = 0;
      nbits_ = 0;
    }
    ++total_bits_;
  }

  std::vector<std::uint8_t> finish() {
    if (nbits_ > 0) {
      bytes_.push_back(std::uint8_t(cur_ << (8 - nbits_)));
      cur_ = 0;
      nbits_ = 0;
    }
    return std::move(bytes_);
  }

  std::uint64_t bit_count() const { return total_bits_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint8_t cur_ = 0;
  int nbits_ = 0;
  std::uint64_t total_bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Reads zeros past the end; payload integrity is the byte length's job.
  int get() {
    if (pos_ >= bytes_.size()) return 0;
    const int bit = (bytes_[pos_] >> (7 - nbits_)) & 1;
    if (++nbits_ == 8) {
      nbits_ = 0;
      ++pos_;
    }
    return bit;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  int nbits_ = 0;
};

}  // namespace

CodedPayload arithmetic_encode(std::span<const Label> symbols,
                               std::span<const std::uint64_t> freqs) {
  CodedPayload out;
  if (symbols.empty()) return out;
  const CoderModel model = build_model(freqs);
  if (model.total == 0) {
    throw std::invalid_argument("cannot encode against an empty model");
  }

  BitWriter bits;
  std::uint32_t low = 0, high = 0xFFFFFFFFu;
  std::uint64_t pending = 0;
  auto emit = [&](int bit) {
    bits.put(bit);
    for (; pending > 0; --pending) bits.put(bit ^ 1);
  };

  for (const Label s : symbols) {
    if (std::size_t(s) >= freqs.size() || model.cum[s + 1] == model.cum[s]) {
      throw std::invalid_argument("symbol outside the frequency model");
    }
    const std::uint64_t range = std::uint64_t(high) - low + 1;
    high = low + std::uint32_t(range * model.cum[s + 1] / model.total) - 1;
    low = low + std::uint32_t(range * model.cum[s] / model.total);
    for (;;) {
      if (high < kHalf) {
        emit(0);
      } else if (low >= kHalf) {
        emit(1);
        low -= kHalf;
        high -= kHalf;
      } else if (low >= kQuarter && high < kThreeQuarters) {
        ++pending;
        low -= kQuarter;
        high -= kQuarter;
      } else {
        break;
      }
      low <<= 1;
      high = (high << 1) | 1;
    }
  }
  ++pending;
  if (low >= kQuarter) {
    emit(1);
  } else {
    emit(0);
  }

  out.bit_length = bits.bit_count();
  out.bytes = bits.finish();
  return out;
}

std::vector<Label> arithmetic_decode(std::span<const std::uint8_t> bytes,
                                     std::size_t count,
                                     std::span<const std::uint64_t> freqs) {
  std::vector<Label> out;
  if (count == 0) return out;
  const CoderModel model = build_model(freqs);
  if (model.total == 0) {
    throw std::invalid_argument("cannot decode against an empty model");
  }

  BitReader bits(bytes);
  std::uint32_t low = 0, high = 0xFFFFFFFFu, value = 0;
  for (int i = 0; i < 32; ++i) value = (value << 1) | std::uint32_t(bits.get());

  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t range = std::uint64_t(high) - low + 1;
    const std::uint64_t scaled =
        ((std::uint64_t(value) - low + 1) * model.total - 1) / range;
    const auto it =
        std::upper_bound(model.cum.begin() + 1, model.cum.end(), scaled);
    const Label s = Label(it - model.cum.begin() - 1);
    out.push_back(s);
    high = low + std::uint32_t(range * model.cum[s + 1] / model.total) - 1;
    low = low + std::uint32_t(range * model.cum[s] / model.total);
    for (;;) {
      if (high < kHalf) {
        // nothing
      } else if (low >= kHalf) {
        value -= kHalf;
        low -= kHalf;
        high -= kHalf;
      } else if (low >= kQuarter && high < kThreeQuarters) {
        value -= kQuarter;
        low -= kQuarter;
        high -= kQuarter;
      } else {
        break;
      }
      low <<= 1;
      high = (high << 1) | 1;
      value = (value << 1) | std::uint32_t(bits.get());
    }
  }
  return out;
}

// --- message wire format ----------------------------------------------------------

namespace {

void validate_described(const Description& d, std::size_t k, int m_voc) {
  if (d.symbols.empty()) {
    throw std::invalid_argument(
        "cannot reference an unnamed node with an empty description");
  }
  if (d.base_len < 1 || d.ext_len < 0 ||
      std::size_t(d.base_len) + std::size_t(d.ext_len) != d.symbols.size()) {
    throw std::invalid_argument("description length fields inconsistent");
  }
  if (d.symbols.size() > k) {
    throw std::invalid_argument("description longer than the shared context");
  }
  for (const Label s : d.symbols) {
    if (int(s) >= m_voc) {
      throw std::invalid_argument("description symbol outside the vocabulary");
    }
  }
}

}  // namespace

EncodedMessage encode_message(const Message& msg, const SharedContext& ctx) {
  if (msg.triples.empty()) {
    throw std::invalid_argument("message needs at least one triple");
  }
  if (msg.n < 2) throw std::invalid_argument("message world size too small");
  if (msg.m_voc < 2) throw std::invalid_argument("vocabulary too small");
  ctx.validate(msg.n);

  const std::size_t k = ctx.size();
  std::vector<std::uint64_t> freqs(std::size_t(msg.m_voc), 0);
  std::size_t described = 0, total_refs = 0, total_symbols = 0;
  for (const Triple& t : msg.triples) {
    if (int(t.label) >= msg.m_voc) {
      throw std::invalid_argument("triple label outside the vocabulary");
    }
    for (const NodeRef* r : {&t.source, &t.target}) {
      ++total_refs;
      if (r->kind == NodeRef::Kind::SharedName) {
        if (r->node < 0 || r->node >= msg.n) {
          throw std::invalid_argument("shared name out of range");
        }
        continue;
      }
      validate_described(r->desc, k, msg.m_voc);
      ++described;
      total_symbols += r->desc.symbols.size();
      for (const Label s : r->desc.symbols) freqs[s]++;
    }
  }

  EncodedMessage out;
  auto& bytes = out.bytes;
  bytes.insert(bytes.end(), std::begin(kWireMagic), std::end(kWireMagic));
  bytes.push_back(kWireVersion);
  put_varint(bytes, std::uint64_t(msg.n));
  put_varint(bytes, std::uint64_t(msg.m_voc));
  put_varint(bytes, std::uint64_t(k));
  for (const auto f : freqs) put_varint(bytes, f);

  put_varint(bytes, msg.triples.size());
  double coded_bits = 0;
  auto put_ref = [&](const NodeRef& r) {
    if (r.kind == NodeRef::Kind::SharedName) {
      bytes.push_back(0);
      put_varint(bytes, std::uint64_t(r.node));
      return;
    }
    bytes.push_back(1);
    put_varint(bytes, std::uint64_t(r.desc.base_len));
    put_varint(bytes, std::uint64_t(r.desc.ext_len));
    const CodedPayload payload = arithmetic_encode(r.desc.symbols, freqs);
    coded_bits += double(payload.bit_length);
    put_varint(bytes, payload.bytes.size());
    bytes.insert(bytes.end(), payload.bytes.begin(), payload.bytes.end());
  };
  for (const Triple& t : msg.triples) {
    put_ref(t.source);
    put_varint(bytes, std::uint64_t(t.label));
    put_ref(t.target);
  }

  const double name_bits = std::log2(double(msg.n));
  out.stats.raw_bits =
      double(total_symbols) * std::ceil(std::log2(double(msg.m_voc)));
  out.stats.entropy_coded_bits = coded_bits;
  out.stats.baseline_bits = double(total_refs) * name_bits;
  out.stats.overhead_factor =
      described > 0 ? coded_bits / (double(described) * name_bits) : 1.0;
  return out;
}

Message decode_message(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  auto need = [&](std::size_t count) {
    if (off + count > bytes.size()) {
      throw ParseError("truncated message", bytes.size());
    }
  };

  need(sizeof(kWireMagic));
  if (std::memcmp(bytes.data(), kWireMagic, sizeof(kWireMagic)) != 0) {
    throw FormatError("bad wire magic");
  }
  off += sizeof(kWireMagic);
  need(1);
  const std::uint8_t version = bytes[off++];
  if (version != kWireVersion) {
    throw FormatError("unsupported wire version " + std::to_string(version));
  }

  Message msg;
  const std::uint64_t n = get_varint(bytes, off);
  const std::uint64_t m_voc = get_varint(bytes, off);
  const std::uint64_t k = get_varint(bytes, off);
  if (n < 2 || n > (1u << 24)) throw ParseError("implausible world size", off);
  if (m_voc < 2 || m_voc > 65536) throw ParseError("implausible vocabulary", off);
  if (k > n) throw ParseError("shared context larger than the world", off);
  msg.n = int(n);
  msg.m_voc = int(m_voc);

  std::vector<std::uint64_t> freqs(std::size_t(m_voc));
  for (auto& f : freqs) f = get_varint(bytes, off);

  const std::uint64_t triple_count = get_varint(bytes, off);
  if (triple_count == 0) throw ParseError("message without triples", off);
  if (triple_count > (1u << 20)) throw ParseError("implausible triple count", off);

  auto get_ref = [&]() {
    need(1);
    const std::uint8_t tag = bytes[off++];
    if (tag == 0) {
      const std::uint64_t node = get_varint(bytes, off);
      if (node >= n) throw ParseError("shared name out of range", off);
      return NodeRef::shared(int(node));
    }
    if (tag != 1) throw ParseError("unknown reference tag", off);
    Description d;
    const std::uint64_t base = get_varint(bytes, off);
    const std::uint64_t ext = get_varint(bytes, off);
    if (base < 1 || base + ext > k) {
      throw ParseError("bad description lengths", off);
    }
    const std::uint64_t payload_len = get_varint(bytes, off);
    need(payload_len);
    const auto payload = bytes.subspan(off, payload_len);
    off += payload_len;
    d.base_len = int(base);
    d.ext_len = int(ext);
    d.symbols = arithmetic_decode(payload, std::size_t(base + ext), freqs);
    return NodeRef::described(std::move(d));
  };

  msg.triples.reserve(std::size_t(triple_count));
  for (std::uint64_t t = 0; t < triple_count; ++t) {
    Triple triple;
    triple.source = get_ref();
    const std::uint64_t label = get_varint(bytes, off);
    if (label >= m_voc) throw ParseError("triple label out of range", off);
    triple.label = Label(label);
    triple.target = get_ref();
    msg.triples.push_back(std::move(triple));
  }
  if (off != bytes.size()) throw ParseError("trailing bytes", off);
  return msg;
}

// --- receiver-side resolution ---------------------------------------------------

namespace {

struct PayloadState {
  Description desc;
  std::vector<int> candidates;
  ResolvedRef result;
  bool done = false;
};

using PayloadKey = std::tuple<std::vector<Label>, int, int>;

PayloadKey key_of(const Description& d) {
  return {d.symbols, d.base_len, d.ext_len};
}

}  // namespace

std::vector<ResolvedTriple> resolve_message(const Message& msg,
                                            const WorldGraph& receiver,
                                            const SharedContext& ctx,
                                            const JointLabelStats& stats) {
  ctx.validate(receiver.n);

  const int inferred_depth =
      DepthVocab::infer_depth(std::size_t(receiver.alphabet.real_labels()),
                              std::size_t(msg.m_voc));

  // Nodes a described reference cannot mean: anchors and every node the
  // message names outright (the sender would have used the name).
  std::vector<char> excluded(std::size_t(receiver.n), 0);
  for (int id : ctx.nodes) excluded[id] = 1;
  for (const Triple& t : msg.triples) {
    for (const NodeRef* r : {&t.source, &t.target}) {
      if (r->kind == NodeRef::Kind::SharedName && r->node >= 0 &&
          r->node < receiver.n) {
        excluded[r->node] = 1;
      }
    }
  }

  std::map<PayloadKey, PayloadState> payloads;
  auto state_of = [&](const NodeRef& r) -> PayloadState& {
    return payloads[key_of(r.desc)];
  };

  // Exact decoding per distinct payload.
  for (const Triple& t : msg.triples) {
    for (const NodeRef* r : {&t.source, &t.target}) {
      if (r->kind != NodeRef::Kind::Described) continue;
      PayloadState& st = state_of(*r);
      if (!st.desc.symbols.empty() || st.done) continue;
      st.desc = r->desc;
      st.desc.depth = inferred_depth;
      const std::size_t len = st.desc.symbols.size();
      if (inferred_depth < 0 || len == 0 || len > ctx.size() ||
          st.desc.base_len < 1) {
        st.result = {-1, ResolveFlag::Failed};
        st.done = true;
        continue;
      }
      try {
        const SharedContext slice = ctx.prefix(len);
        std::vector<int> cands = decode_exact(receiver, st.desc, slice);
        std::erase_if(cands, [&](int y) { return excluded[y] != 0; });
        st.candidates = std::move(cands);
        if (st.candidates.size() == 1) {
          st.result = {st.candidates.front(), ResolveFlag::Exact};
          st.done = true;
        }
      } catch (const std::exception&) {
        st.result = {-1, ResolveFlag::Failed};
        st.done = true;
      }
    }
  }

  // Cross-triple consistency: a candidate survives a triple only when some
  // candidate (or resolved node) on the other end matches the asserted label.
  // A constraint that would empty the set is treated as message content the
  // receiver cannot see and skipped.
  auto candidates_of = [&](const NodeRef& r) -> std::vector<int> {
    if (r.kind == NodeRef::Kind::SharedName) return {r.node};
    const PayloadState& st = payloads.at(key_of(r.desc));
    if (st.done) {
      return st.result.flag == ResolveFlag::Failed
                 ? std::vector<int>{}
                 : std::vector<int>{st.result.node};
    }
    return st.candidates;
  };
  for (int pass = 0; pass < 8; ++pass) {
    bool changed = false;
    for (const Triple& t : msg.triples) {
      for (int side = 0; side < 2; ++side) {
        const NodeRef& ref = side == 0 ? t.source : t.target;
        const NodeRef& other = side == 0 ? t.target : t.source;
        if (ref.kind != NodeRef::Kind::Described) continue;
        PayloadState& st = payloads.at(key_of(ref.desc));
        if (st.done || st.candidates.size() < 2) continue;
        const std::vector<int> partners = candidates_of(other);
        if (partners.empty()) continue;
        std::vector<int> kept;
        for (int c : st.candidates) {
          for (int p : partners) {
            if (p != c && receiver.at(c, p) == t.label) {
              kept.push_back(c);
              break;
            }
          }
        }
        if (!kept.empty() && kept.size() < st.candidates.size()) {
          st.candidates = std::move(kept);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  // Remaining payloads go through maximum-likelihood scoring, restricted to
  // the surviving candidates when there are any.
  for (auto& [key, st] : payloads) {
    if (st.done) continue;
    if (st.candidates.size() == 1) {
      st.result = {st.candidates.front(), ResolveFlag::Exact};
      st.done = true;
      continue;
    }
    try {
      const std::size_t len = st.desc.symbols.size();
      const SharedContext slice = ctx.prefix(len);
      const WorldGraph& dv = depth_view(receiver, st.desc.depth);
      const MlDecoder decoder(dv, slice.nodes, stats);

      std::vector<double> scores(std::size_t(receiver.n));
      bool smoothed = false;
      decoder.scores(st.desc.symbols, scores, false);

      auto allowed = [&](int y) {
        if (excluded[y]) return false;
        if (st.candidates.empty()) return true;
        return std::find(st.candidates.begin(), st.candidates.end(), y) !=
               st.candidates.end();
      };
      auto best_allowed = [&]() {
        int node = -1;
        double best = -std::numeric_limits<double>::infinity();
        double second = -std::numeric_limits<double>::infinity();
        for (int y = 0; y < receiver.n; ++y) {
          if (!allowed(y)) continue;
          if (node < 0 || scores[y] > best) {
            second = node < 0 ? second : best;
            best = scores[y];
            node = y;
          } else if (scores[y] > second) {
            second = scores[y];
          }
        }
        return std::tuple<int, double, double>(node, best, second);
      };

      auto [node, best, second] = best_allowed();
      if (node >= 0 && std::isinf(best) && best < 0) {
        decoder.scores(st.desc.symbols, scores, true);
        smoothed = true;
        std::tie(node, best, second) = best_allowed();
      }
      if (node < 0) {
        st.result = {-1, ResolveFlag::Failed};
      } else {
        const bool tie = std::isfinite(second)
                             ? (best - second) <= 1e-9
                             : std::isinf(best) && std::isinf(second);
        st.result = {node, tie ? ResolveFlag::Ambiguous : ResolveFlag::Ml};
      }
      (void)smoothed;
    } catch (const std::exception&) {
      st.result = {-1, ResolveFlag::Failed};
    }
    st.done = true;
  }

  std::vector<ResolvedTriple> out;
  out.reserve(msg.triples.size());
  for (std::size_t i = 0; i < msg.triples.size(); ++i) {
    const Triple& t = msg.triples[i];
    ResolvedTriple rt;
    rt.triple_index = i;
    auto resolve_ref = [&](const NodeRef& r) -> ResolvedRef {
      if (r.kind == NodeRef::Kind::SharedName) {
        if (r.node < 0 || r.node >= receiver.n) {
          return {-1, ResolveFlag::Failed};
        }
        return {r.node, ResolveFlag::Exact};
      }
      return payloads.at(key_of(r.desc)).result;
    };
    rt.source = resolve_ref(t.source);
    rt.target = resolve_ref(t.target);
    out.push_back(rt);
  }
  return out;
}

WireStats measure_overhead(int n, int m_voc, double h_d) {
  if (n < 2 || m_voc < 2 || h_d <= 0) {
    throw std::invalid_argument("bad overhead parameters");
  }
  const double log_n = std::log2(double(n));
  const double log_m = std::log2(double(m_voc));
  const double symbols_per_desc = 2.0 * log_m * log_n / h_d;
  WireStats s;
  s.raw_bits = 2.0 * symbols_per_desc * std::ceil(log_m);
  s.entropy_coded_bits = 4.0 * log_m * log_n;
  s.baseline_bits = 2.0 * log_n;
  s.overhead_factor = 2.0 * log_m;
  return s;
}

}  // namespace rbd
