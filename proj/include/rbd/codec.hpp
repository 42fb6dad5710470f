#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbd/description.hpp"
#include "rbd/info.hpp"

namespace rbd {

inline constexpr std::uint8_t kWireMagic[4] = {'R', 'B', 'D', '1'};
inline constexpr std::uint8_t kWireVersion = 1;

struct NodeRef {
  enum class Kind : std::uint8_t { SharedName = 0, Described = 1 };
  Kind kind = Kind::SharedName;
  int node = -1;     // SharedName payload
  Description desc;  // Described payload

  static NodeRef shared(int node);
  static NodeRef described(Description desc);
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct Triple {
  NodeRef source;
  Label label = kNullLabel;
  NodeRef target;
  friend bool operator==(const Triple&, const Triple&) = default;
};

// A set of triples whose node slots are shared names or descriptions. The
// label slot always travels by shared name (label index).
struct Message {
  std::vector<Triple> triples;
  int n = 0;      // world size, for the header and name-bit accounting
  int m_voc = 0;  // description vocabulary size
  friend bool operator==(const Message&, const Message&) = default;
};

struct WireStats {
  double raw_bits = 0;            // description symbols × ceil(log2 m_voc)
  double entropy_coded_bits = 0;  // exact coded bits, before byte alignment
  double baseline_bits = 0;       // log2(n) per node reference
  double overhead_factor = 1;     // coded description bits / their name bits
};

struct EncodedMessage {
  std::vector<std::uint8_t> bytes;
  WireStats stats;
};

// Self-delimiting binary form; see README for the exact layout. Described
// payloads are arithmetic-coded under the message-wide empirical symbol
// distribution carried in the header. Byte-identical for identical inputs.
EncodedMessage encode_message(const Message& msg, const SharedContext& ctx);

// Exact inverse. Throws ParseError (with byte offset) on truncation or
// garbage, FormatError on bad magic/version.
Message decode_message(std::span<const std::uint8_t> bytes);

enum class ResolveFlag { Exact, Ml, Ambiguous, Failed };
const char* to_string(ResolveFlag flag);

struct ResolvedRef {
  int node = -1;
  ResolveFlag flag = ResolveFlag::Failed;
};

struct ResolvedTriple {
  std::size_t triple_index = 0;
  ResolvedRef source;
  ResolvedRef target;
};

// Receiver-side resolution. Shared names resolve directly. Described refs go
// through exact decoding (shared-name nodes excluded from candidates), then a
// cross-triple consistency pass, then maximum-likelihood scoring under the
// channel stats. Failures are flagged per ref, never thrown.
std::vector<ResolvedTriple> resolve_message(const Message& msg,
                                            const WorldGraph& receiver,
                                            const SharedContext& ctx,
                                            const JointLabelStats& stats);

// Predicted wire accounting for one triple with two described refs:
// 2 log2(m_voc) log2(n) / h_d symbols per description, entropy-coded to
// 2 log2(m_voc) log2(n) bits each, overhead factor 2 log2(m_voc).
WireStats measure_overhead(int n, int m_voc, double h_d);

// --- wire primitives (exposed for tests) ------------------------------------

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint64_t get_varint(std::span<const std::uint8_t> in, std::size_t& offset);

// Static-model arithmetic coder over symbol frequencies. encode() returns the
// payload and its exact bit length (the wire stores whole bytes).
struct CodedPayload {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_length = 0;
};
CodedPayload arithmetic_encode(std::span<const Label> symbols,
                               std::span<const std::uint64_t> freqs);
std::vector<Label> arithmetic_decode(std::span<const std::uint8_t> bytes,
                                     std::size_t count,
                                     std::span<const std::uint64_t> freqs);

}  // namespace rbd
