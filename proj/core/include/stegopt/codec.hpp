#ifndef STEGOPT_CODEC_HPP
#define STEGOPT_CODEC_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stegopt/model.hpp"

namespace stegopt {

using BigInt = boost::multiprecision::cpp_int;

/// Non-cross cover-to-stego mapping realized from a link vector: magnitude v
/// owns the stego interval [v + y_v, v + y_v + x_v]; the intervals tile
/// [0, n + sum(x)] exactly and everything above passes through unchanged.
struct CodingMap {
    int n = 0;
    LinkVector x;
    std::vector<int> y;
    int total_links = 0;

    int interval_lo(int v) const { return v + y[v]; }
    int interval_hi(int v) const { return v + y[v] + x[v]; }
    int max_stego() const { return n + total_links; }
    /// Cover magnitude owning stego magnitude s (require s <= max_stego()).
    int cover_of(int s) const { return owner[s]; }

    std::vector<int> owner;  // filled by build_coding_map
};

CodingMap build_coding_map(const LinkVector& x);

/// Ordered bit sequence, packed MSB-first.
struct MessageBits {
    std::vector<std::uint8_t> bytes;
    std::size_t bit_count = 0;

    bool get(std::size_t t) const { return (bytes[t / 8] >> (7 - t % 8)) & 1; }
    void push(bool bit);
    bool operator==(const MessageBits&) const = default;
};

MessageBits random_message(std::size_t bits, std::uint64_t seed);

/// Signed prediction error. Magnitude-0 entries carry a positive sign by
/// convention so round trips are bit-exact.
struct SignedError {
    int magnitude = 0;
    int sign = 1;  // +1 or -1
    bool operator==(const SignedError&) const = default;
};

/// floor(log2 of the product of (x_v+1)^(a_v)): the integer-realizable
/// capacity of the map on the given histogram. Exact big-integer arithmetic.
std::int64_t exact_capacity_bits(const CodingMap& map, const AbsErrorHistogram& hist);

/// Wire framing: a 32-bit big-endian bit-length followed by the payload,
/// read MSB-first into one integer.
BigInt frame_to_integer(const MessageBits& message);

/// Inverse of frame_to_integer. The header position is recovered from the
/// unique split point of the integer; throws CorruptStreamError when none
/// exists or the length is implausible against max_payload_bits.
MessageBits integer_to_frame(const BigInt& m, std::int64_t max_payload_bits);

/// Embeds the framed message into the carrier sequence: each magnitude
/// v <= n with interval width b = x_v+1 > 1 consumes one base-b digit
/// (least significant first); everything else shifts by its cumulative
/// deviation. Throws NonEmptyReservedBinsError when the sequence occupies
/// magnitudes in [n+1, n+sum(x)], CapacityExceededError when the framed
/// message does not fit.
std::vector<SignedError> modulate(const std::vector<SignedError>& errors, const CodingMap& map,
                                  const MessageBits& message);

/// Digit-level core of modulate: consumes mixed-radix digits of m directly.
std::vector<SignedError> modulate_integer(const std::vector<SignedError>& errors,
                                          const CodingMap& map, BigInt m);

/// Inverse of modulate: recovers the cover errors and the framed message.
std::pair<std::vector<SignedError>, MessageBits> demodulate(
    const std::vector<SignedError>& stego, const CodingMap& map);

/// Digit-level inverse: recovers the mixed-radix integer without unframing.
std::pair<std::vector<SignedError>, BigInt> demodulate_integer(
    const std::vector<SignedError>& stego, const CodingMap& map);

}  // namespace stegopt

#endif  // STEGOPT_CODEC_HPP
