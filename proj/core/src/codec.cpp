#include "stegopt/codec.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace stegopt {

CodingMap build_coding_map(const LinkVector& x) {
    if (x.empty()) throw std::invalid_argument("link vector must cover magnitude 0");
    for (int xi : x)
        if (xi < 0) throw std::invalid_argument("link counts must be non-negative");
    CodingMap map;
    map.n = static_cast<int>(x.size()) - 1;
    map.x = x;
    map.y = cumulative_deviations(x);
    map.total_links = map.y.back() + x.back();
    map.owner.assign(map.max_stego() + 1, 0);
    for (int v = 0; v <= map.n; ++v)
        for (int s = map.interval_lo(v); s <= map.interval_hi(v); ++s) map.owner[s] = v;
    return map;
}

void MessageBits::push(bool bit) {
    if (bit_count % 8 == 0) bytes.push_back(0);
    if (bit) bytes.back() |= static_cast<std::uint8_t>(1u << (7 - bit_count % 8));
    ++bit_count;
}

MessageBits random_message(std::size_t bits, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    MessageBits m;
    for (std::size_t t = 0; t < bits; ++t) m.push(coin(rng));
    return m;
}

std::int64_t exact_capacity_bits(const CodingMap& map, const AbsErrorHistogram& hist) {
    BigInt product = 1;
    for (int v = 0; v <= map.n; ++v) {
        if (map.x[v] == 0) continue;
        const std::uint64_t a = hist.at(v);
        if (a == 0) continue;
        product *= boost::multiprecision::pow(BigInt(map.x[v] + 1), static_cast<unsigned>(a));
    }
    if (product == 1) return 0;
    return static_cast<std::int64_t>(boost::multiprecision::msb(product));
}

BigInt frame_to_integer(const MessageBits& message) {
    // M = bit_count * 2^bit_count + payload-as-integer (payload MSB-first)
    BigInt m = message.bit_count;
    m <<= message.bit_count;
    BigInt payload = 0;
    for (std::size_t t = 0; t < message.bit_count; ++t) {
        payload <<= 1;
        if (message.get(t)) payload |= 1;
    }
    return m | payload;
}

MessageBits integer_to_frame(const BigInt& m, std::int64_t max_payload_bits) {
    // The split point p with floor(m / 2^p) == p is unique: the difference is
    // strictly decreasing in p. Linear scan up to the capacity bound.
    BigInt shifted = m;
    std::int64_t p = 0;
    while (shifted > p) {
        shifted >>= 1;
        ++p;
        if (p > max_payload_bits + 1)
            throw CorruptStreamError("frame length exceeds stream capacity");
    }
    if (shifted != p) throw CorruptStreamError("no consistent frame header found");
    MessageBits out;
    for (std::int64_t t = p - 1; t >= 0; --t)
        out.push(boost::multiprecision::bit_test(m, static_cast<unsigned>(t)));
    return out;
}

namespace {

// Sequence-local histogram plus the reserved-range check shared by the
// capacity accounting and the precondition.
AbsErrorHistogram carrier_histogram(const std::vector<SignedError>& errors,
                                    const CodingMap& map) {
    AbsErrorHistogram hist;
    hist.counts.assign(static_cast<std::size_t>(map.n) + 1, 0);
    for (const SignedError& e : errors) {
        if (e.magnitude < 0) throw std::invalid_argument("negative error magnitude");
        if (e.magnitude <= map.n) {
            hist.counts[e.magnitude]++;
        } else if (e.magnitude <= map.max_stego()) {
            throw NonEmptyReservedBinsError(
                "carrier magnitude " + std::to_string(e.magnitude) +
                " lies in the reserved range (" + std::to_string(map.n + 1) + ".." +
                std::to_string(map.max_stego()) + ")");
        }
    }
    return hist;
}

}  // namespace

std::vector<SignedError> modulate_integer(const std::vector<SignedError>& errors,
                                          const CodingMap& map, BigInt m) {
    const AbsErrorHistogram hist = carrier_histogram(errors, map);
    BigInt space = 1;
    for (int v = 0; v <= map.n; ++v)
        if (map.x[v] > 0 && hist.counts[v] > 0)
            space *= boost::multiprecision::pow(BigInt(map.x[v] + 1),
                                                static_cast<unsigned>(hist.counts[v]));
    if (m >= space)
        throw CapacityExceededError("framed message does not fit the carrier sequence");

    std::vector<SignedError> out;
    out.reserve(errors.size());
    for (const SignedError& e : errors) {
        if (e.magnitude > map.n) {
            out.push_back(e);
            continue;
        }
        const int v = e.magnitude;
        int digit = 0;
        if (map.x[v] > 0) {
            const int base = map.x[v] + 1;
            digit = static_cast<int>(m % base);
            m /= base;
        }
        const int stego_mag = v + map.y[v] + digit;
        out.push_back(SignedError{stego_mag, v == 0 ? 1 : e.sign});
    }
    return out;
}

std::vector<SignedError> modulate(const std::vector<SignedError>& errors, const CodingMap& map,
                                  const MessageBits& message) {
    return modulate_integer(errors, map, frame_to_integer(message));
}

std::pair<std::vector<SignedError>, BigInt> demodulate_integer(
    const std::vector<SignedError>& stego, const CodingMap& map) {
    std::vector<SignedError> cover;
    cover.reserve(stego.size());
    std::vector<std::pair<int, int>> digits;  // (digit, base) in scan order
    for (const SignedError& e : stego) {
        if (e.magnitude < 0) throw CorruptStreamError("negative stego magnitude");
        if (e.magnitude > map.max_stego()) {
            cover.push_back(e);
            continue;
        }
        const int v = map.cover_of(e.magnitude);
        if (map.x[v] > 0) digits.emplace_back(e.magnitude - map.interval_lo(v), map.x[v] + 1);
        cover.push_back(SignedError{v, v == 0 ? 1 : e.sign});
    }
    BigInt m = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        m *= it->second;
        m += it->first;
    }
    return {std::move(cover), std::move(m)};
}

std::pair<std::vector<SignedError>, MessageBits> demodulate(
    const std::vector<SignedError>& stego, const CodingMap& map) {
    auto [cover, m] = demodulate_integer(stego, map);
    AbsErrorHistogram hist;
    hist.counts.assign(static_cast<std::size_t>(map.n) + 1, 0);
    for (const SignedError& e : cover)
        if (e.magnitude <= map.n) hist.counts[e.magnitude]++;
    const std::int64_t cap = exact_capacity_bits(map, hist);
    return {std::move(cover), integer_to_frame(m, cap)};
}

}  // namespace stegopt
