// Lossless coding of quantization-index streams: an adaptive order-0 model
// with escapes driving a 64-bit range coder, and the "LVQ1" container.
//
// Range coder (bit-exact description)
//   Encoder state: low (64 bits plus a carry bit), range (64 bits, starts at
//   2^64 - 1), cache byte (starts at 0x00), pending count (starts at 0).
//   encode(cum, freq, total), total <= 2^32:
//     r = floor(range / total); low += cum * r (carry out of bit 63 sets the
//     carry bit); range = freq * r; while range < 2^56 { range <<= 8; shift_low }.
//   shift_low: with top = low >> 56, if top != 0xFF or carry is set, emit
//     cache + carry, then `pending` bytes of (0xFF + carry) mod 256, then
//     cache = top, pending = 0; otherwise ++pending. Then clear carry and
//     low <<= 8. The very first byte this produces is always 0x00 (low + range
//     starts below 2^64) and is not written.
//   finish: low = low rounded up to a multiple of 2^56 (still inside the
//     interval since range >= 2^56), two shift_low calls, then trailing 0x00
//     bytes are dropped.
//   Decoder: read 8 bytes big-endian into code, range = 2^64 - 1.
//     v = code / (range / total) (v >= total is corruption), locate the symbol,
//     code -= cum * r, range = freq * r, renormalize reading one byte per shift.
//   Bytes past the end of the payload read as 0; a decoder that stops before
//   reaching the last payload byte reports corruption.
//
// Adaptive model (prior id 1)
//   Coding interval layout: [0, E) is the escape, E = number of distinct
//   symbols seen so far (E = 1 before the first symbol); seen symbols follow
//   in first-appearance order with their counts. A seen symbol is coded
//   directly and its count incremented by 1. An unseen symbol is coded as the
//   escape, then its zigzag value z = (i << 1) ^ (i >> 63) as bit-length class
//   L in 0..64 under an adaptive table (all counts start at 1, +1 per use),
//   then the L - 1 bits of z below its leading one as raw bits (16-bit
//   chunks, most significant chunk first, each coded with total 2^16); the
//   new symbol enters with count 1. When the symbol total exceeds 2^30 every
//   count c becomes (c + 1) / 2.
//   After the last symbol a 32-bit FNV-1a hash of the little-endian 64-bit
//   indices is coded as two raw 16-bit chunks (high first).
//
// Container
//   "LVQ1" | m: f64 LE | n: u64 LE | symbols: u64 LE | prior id: u32 LE |
//   seed: u64 LE | payload bytes: u64 LE | payload
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "levyq/entropy.hpp"

namespace levyq {

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Bitstream {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_length() const noexcept { return 8 * static_cast<std::uint64_t>(bytes.size()); }
};

namespace detail {

inline constexpr std::uint64_t kTop = std::uint64_t{1} << 56;
inline constexpr std::uint32_t kRescaleLimit = std::uint32_t{1} << 30;

class RangeEncoder {
 public:
  void encode(std::uint64_t cum, std::uint64_t freq, std::uint64_t total) {
    const std::uint64_t r = range_ / total;
    const std::uint64_t add = cum * r;
    const std::uint64_t next = low_ + add;
    if (next < low_) carry_ = true;
    low_ = next;
    range_ = freq * r;
    while (range_ < kTop) {
      range_ <<= 8;
      shift_low();
    }
  }

  void encode_bits(std::uint64_t value, int bits) {
    while (bits > 0) {
      const int chunk = (bits - 1) % 16 + 1;
      bits -= chunk;
      encode((value >> bits) & ((1u << chunk) - 1), 1, std::uint64_t{1} << chunk);
    }
  }

  std::vector<std::uint8_t> finish() {
    const std::uint64_t v = (low_ + (kTop - 1)) & ~(kTop - 1);
    if (v < low_) carry_ = true;
    low_ = v;
    shift_low();
    shift_low();
    while (!out_.empty() && out_.back() == 0) out_.pop_back();
    return std::move(out_);
  }

 private:
  void shift_low() {
    const auto top = static_cast<std::uint8_t>(low_ >> 56);
    if (top != 0xFF || carry_) {
      const std::uint8_t c = carry_ ? 1 : 0;
      if (started_) out_.push_back(static_cast<std::uint8_t>(cache_ + c));
      started_ = true;
      for (; pending_ > 0; --pending_) out_.push_back(static_cast<std::uint8_t>(0xFF + c));
      cache_ = top;
    } else {
      ++pending_;
    }
    carry_ = false;
    low_ <<= 8;
  }

  std::uint64_t low_ = 0;
  bool carry_ = false;
  std::uint64_t range_ = ~std::uint64_t{0};
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 0;
  bool started_ = false;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> in) : in_(in) {
    for (int i = 0; i < 8; ++i) code_ = (code_ << 8) | next_byte();
  }

  /// Target cumulative frequency for the next symbol.
  std::uint64_t peek(std::uint64_t total) {
    r_ = range_ / total;
    const std::uint64_t v = code_ / r_;
    if (v >= total) throw CodecError("decode: code value outside the coding interval");
    return v;
  }

  void consume(std::uint64_t cum, std::uint64_t freq) {
    code_ -= cum * r_;
    range_ = freq * r_;
    while (range_ < kTop) {
      range_ <<= 8;
      code_ = (code_ << 8) | next_byte();
    }
  }

  std::uint64_t decode_bits(int bits) {
    std::uint64_t v = 0;
    while (bits > 0) {
      const int chunk = (bits - 1) % 16 + 1;
      bits -= chunk;
      const std::uint64_t total = std::uint64_t{1} << chunk;
      const std::uint64_t c = peek(total);
      consume(c, 1);
      v = (v << chunk) | c;
    }
    return v;
  }

  std::size_t consumed() const noexcept { return pos_; }

 private:
  std::uint8_t next_byte() {
    const std::uint8_t b = pos_ < in_.size() ? in_[pos_] : 0;
    ++pos_;
    return b;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint64_t code_ = 0;
  std::uint64_t range_ = ~std::uint64_t{0};
  std::uint64_t r_ = 1;
};

/// Fenwick tree over symbol slots with a power-of-two capacity.
class Fenwick {
 public:
  std::size_t size() const noexcept { return counts_.size(); }
  std::uint64_t total() const noexcept { return total_; }
  std::uint32_t count(std::size_t slot) const { return counts_[slot]; }

  void push(std::uint32_t c) {
    counts_.push_back(c);
    if (counts_.size() > tree_.size()) {
      rebuild(std::max<std::size_t>(16, tree_.size() * 2));
    } else {
      add_tree(counts_.size() - 1, c);
    }
    total_ += c;
  }

  void increment(std::size_t slot) {
    ++counts_[slot];
    add_tree(slot, 1);
    ++total_;
  }

  /// Sum of counts in slots [0, slot).
  std::uint64_t prefix(std::size_t slot) const {
    std::uint64_t s = 0;
    for (std::size_t i = slot; i > 0; i &= i - 1) s += tree_[i - 1];
    return s;
  }

  /// Slot containing cumulative value `target` (< total); sets `cum` to its start.
  std::size_t find(std::uint64_t target, std::uint64_t& cum) const {
    std::size_t pos = 0;
    cum = 0;
    for (std::size_t step = tree_.size(); step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= tree_.size() && cum + tree_[next - 1] <= target) {
        pos = next;
        cum += tree_[next - 1];
      }
    }
    return pos;
  }

  void halve() {
    total_ = 0;
    for (auto& c : counts_) {
      c = (c + 1) / 2;
      total_ += c;
    }
    rebuild(tree_.size());
  }

 private:
  void add_tree(std::size_t slot, std::uint64_t v) {
    for (std::size_t i = slot + 1; i <= tree_.size(); i += i & (~i + 1)) tree_[i - 1] += v;
  }

  void rebuild(std::size_t capacity) {
    tree_.assign(capacity, 0);
    for (std::size_t i = 0; i < counts_.size(); ++i) tree_[i] = counts_[i];
    for (std::size_t i = 1; i <= capacity; ++i) {
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= capacity) tree_[parent - 1] += tree_[i - 1];
    }
  }

  std::vector<std::uint32_t> counts_;
  std::vector<std::uint64_t> tree_;
  std::uint64_t total_ = 0;
};

inline std::uint64_t zigzag(std::int64_t i) {
  return (static_cast<std::uint64_t>(i) << 1) ^ static_cast<std::uint64_t>(i >> 63);
}

inline std::int64_t unzigzag(std::uint64_t z) {
  return static_cast<std::int64_t>(z >> 1) ^ -static_cast<std::int64_t>(z & 1);
}

inline std::uint32_t index_hash(std::span<const std::int64_t> xs) {
  std::uint32_t h = 0x811C9DC5u;
  for (std::int64_t v : xs) {
    auto u = static_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint8_t>(u >> (8 * b));
      h *= 0x01000193u;
    }
  }
  return h;
}

/// Shared adaptive state; encoder and decoder apply identical updates.
class AdaptiveModel {
 public:
  static constexpr int kClasses = 65;

  AdaptiveModel() { class_counts_.fill(1); }

  std::uint64_t escape_freq() const { return slots_.size() == 0 ? 1 : slots_.size(); }
  std::uint64_t total() const { return escape_freq() + freq_.total(); }

  const Fenwick& freq() const { return freq_; }
  std::int64_t symbol(std::size_t slot) const { return slots_[slot]; }

  std::ptrdiff_t find_slot(std::int64_t sym) const {
    auto it = index_.find(sym);
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
  }

  void hit(std::size_t slot) {
    freq_.increment(slot);
    maybe_rescale();
  }

  void insert(std::int64_t sym) {
    index_.emplace(sym, slots_.size());
    slots_.push_back(sym);
    freq_.push(1);
    maybe_rescale();
  }

  std::uint64_t class_cum(int c) const {
    std::uint64_t s = 0;
    for (int k = 0; k < c; ++k) s += class_counts_[static_cast<std::size_t>(k)];
    return s;
  }
  std::uint64_t class_freq(int c) const { return class_counts_[static_cast<std::size_t>(c)]; }
  std::uint64_t class_total() const { return class_cum(kClasses); }
  void class_hit(int c) { ++class_counts_[static_cast<std::size_t>(c)]; }

 private:
  void maybe_rescale() {
    if (freq_.total() > kRescaleLimit) freq_.halve();
  }

  Fenwick freq_;
  std::vector<std::int64_t> slots_;
  std::unordered_map<std::int64_t, std::size_t> index_;
  std::array<std::uint64_t, kClasses> class_counts_{};
};

}  // namespace detail

inline constexpr std::uint32_t kPriorEscapeOrder0 = 1;

inline Bitstream encode(std::span<const std::int64_t> indices) {
  detail::RangeEncoder enc;
  detail::AdaptiveModel model;
  for (std::int64_t sym : indices) {
    const std::uint64_t total = model.total();
    const auto slot = model.find_slot(sym);
    if (slot >= 0) {
      const auto s = static_cast<std::size_t>(slot);
      enc.encode(model.escape_freq() + model.freq().prefix(s), model.freq().count(s), total);
      model.hit(s);
      continue;
    }
    enc.encode(0, model.escape_freq(), total);
    const std::uint64_t z = detail::zigzag(sym);
    const int len = 64 - std::countl_zero(z);
    enc.encode(model.class_cum(len), model.class_freq(len), model.class_total());
    model.class_hit(len);
    if (len >= 2) enc.encode_bits(z & ((std::uint64_t{1} << (len - 1)) - 1), len - 1);
    model.insert(sym);
  }
  enc.encode_bits(detail::index_hash(indices), 32);
  return {enc.finish()};
}

inline std::vector<std::int64_t> decode(const Bitstream& b, std::uint64_t length) {
  detail::RangeDecoder dec(b.bytes);
  detail::AdaptiveModel model;
  std::vector<std::int64_t> out;
  out.reserve(length);
  for (std::uint64_t k = 0; k < length; ++k) {
    const std::uint64_t total = model.total();
    const std::uint64_t target = dec.peek(total);
    const std::uint64_t esc = model.escape_freq();
    if (target >= esc) {
      std::uint64_t cum = 0;
      const std::size_t slot = model.freq().find(target - esc, cum);
      if (slot >= model.freq().size()) throw CodecError("decode: symbol slot out of range");
      dec.consume(esc + cum, model.freq().count(slot));
      out.push_back(model.symbol(slot));
      model.hit(slot);
      continue;
    }
    dec.consume(0, esc);
    const std::uint64_t ct = dec.peek(model.class_total());
    int len = 0;
    while (len + 1 < detail::AdaptiveModel::kClasses && model.class_cum(len + 1) <= ct) ++len;
    dec.consume(model.class_cum(len), model.class_freq(len));
    model.class_hit(len);
    std::uint64_t z = 0;
    if (len >= 1) z = std::uint64_t{1} << (len - 1);
    if (len >= 2) z |= dec.decode_bits(len - 1);
    const std::int64_t sym = detail::unzigzag(z);
    if (model.find_slot(sym) >= 0) throw CodecError("decode: escape for an already seen symbol");
    out.push_back(sym);
    model.insert(sym);
  }
  const auto hash = static_cast<std::uint32_t>(dec.decode_bits(32));
  if (hash != detail::index_hash(out)) throw CodecError("decode: checksum mismatch");
  if (dec.consumed() < b.bytes.size()) throw CodecError("decode: trailing bytes after the coded stream");
  return out;
}

// ---------------------------------------------------------------------------
// Container
// ---------------------------------------------------------------------------

struct ContainerHeader {
  double m = 1.0;
  std::uint64_t n = 1;
  std::uint64_t symbols = 0;
  std::uint32_t prior_id = kPriorEscapeOrder0;
  std::uint64_t seed = 0;
};

namespace detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  std::uint64_t u = 0;
  std::memcpy(&u, &v, sizeof v);
  for (std::size_t b = 0; b < sizeof v; ++b) out.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw CodecError("container: truncated header");
  std::uint64_t u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<std::uint64_t>(in[pos + b]) << (8 * b);
  pos += sizeof(T);
  T v;
  std::memcpy(&v, &u, sizeof v);
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> write_container(const ContainerHeader& h, const Bitstream& payload) {
  std::vector<std::uint8_t> out{'L', 'V', 'Q', '1'};
  detail::put_le(out, h.m);
  detail::put_le(out, h.n);
  detail::put_le(out, h.symbols);
  detail::put_le(out, h.prior_id);
  detail::put_le(out, h.seed);
  detail::put_le(out, static_cast<std::uint64_t>(payload.bytes.size()));
  out.insert(out.end(), payload.bytes.begin(), payload.bytes.end());
  return out;
}

inline std::pair<ContainerHeader, Bitstream> read_container(std::span<const std::uint8_t> in) {
  if (in.size() < 4 || std::memcmp(in.data(), "LVQ1", 4) != 0) throw CodecError("container: bad magic");
  std::size_t pos = 4;
  ContainerHeader h;
  h.m = detail::get_le<double>(in, pos);
  h.n = detail::get_le<std::uint64_t>(in, pos);
  h.symbols = detail::get_le<std::uint64_t>(in, pos);
  h.prior_id = detail::get_le<std::uint32_t>(in, pos);
  h.seed = detail::get_le<std::uint64_t>(in, pos);
  const auto len = detail::get_le<std::uint64_t>(in, pos);
  if (h.prior_id != kPriorEscapeOrder0) throw CodecError("container: unknown prior id");
  if (in.size() - pos != len) throw CodecError("container: payload length mismatch");
  Bitstream b;
  b.bytes.assign(in.begin() + static_cast<std::ptrdiff_t>(pos), in.end());
  return {h, std::move(b)};
}

// ---------------------------------------------------------------------------
// Rate accounting
// ---------------------------------------------------------------------------

struct RateReport {
  std::uint64_t symbols = 0;
  std::uint64_t payload_bits = 0;
  double total_nats = 0.0;
  double per_unit_time_nats = 0.0;  // coded H_{m,n}: nats per symbol times n
  double reference = 0.0;           // empirical H_{m,n}, n-scaled
  double reference_std_error = 0.0;
  double gap = 0.0;                 // per_unit_time_nats - reference
  double tolerance = 0.0;           // 0.02 reference + 64 ln 2 n / symbols
  bool within_tolerance = false;
  bool above_floor = false;         // rate >= reference - 3 std_error
};

inline constexpr double kCodecRelativeSlack = 0.02;
inline constexpr double kCodecOverheadBits = 64.0;

inline RateReport rate_report(std::uint64_t symbols, std::uint64_t payload_bits, std::int64_t n,
                              const EntropyEstimate& reference) {
  RateReport r;
  r.symbols = symbols;
  r.payload_bits = payload_bits;
  r.total_nats = static_cast<double>(payload_bits) * std::numbers::ln2;
  const double per_symbol_scale = symbols == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(symbols);
  r.per_unit_time_nats = r.total_nats * per_symbol_scale;
  r.reference = reference.value;
  r.reference_std_error = reference.std_error;
  r.gap = r.per_unit_time_nats - r.reference;
  r.tolerance = kCodecRelativeSlack * r.reference + kCodecOverheadBits * std::numbers::ln2 * per_symbol_scale;
  r.within_tolerance = r.gap <= r.tolerance;
  r.above_floor = r.per_unit_time_nats >= r.reference - 3.0 * r.reference_std_error;
  return r;
}

inline RateReport rate_report(std::span<const std::int64_t> indices, std::int64_t n, const EntropyEstimate& reference) {
  const auto b = encode(indices);
  return rate_report(indices.size(), b.bit_length(), n, reference);
}

}  // namespace levyq
