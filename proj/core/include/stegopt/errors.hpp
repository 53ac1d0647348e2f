#ifndef STEGOPT_ERRORS_HPP
#define STEGOPT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stegopt {

/// Vector length does not match the histogram / problem range it is used with.
struct DimensionMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// No link vector can satisfy the capacity constraint under the quota.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The exhaustive grid would exceed the configured evaluation cap.
struct SearchSpaceTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A relaxation block is not within tolerance of a one-hot vertex.
struct FractionalBlockError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Framed message does not fit the realizable capacity of the coding.
struct CapacityExceededError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Carrier sequence has occupied magnitudes inside the reserved shift range.
struct NonEmptyReservedBinsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A modulated intensity would leave the 8-bit range.
struct EmbeddingOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stego stream cannot be demodulated back into a frame.
struct CorruptStreamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed image bytes; `offset` is the byte position of the failure.
struct ImageFormatError : std::runtime_error {
    std::size_t offset;
    ImageFormatError(const std::string& what, std::size_t offset_)
        : std::runtime_error(what + " (byte offset " + std::to_string(offset_) + ")"),
          offset(offset_) {}
};

/// Malformed histogram CSV.
struct CsvFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File cannot be opened, read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stegopt

#endif  // STEGOPT_ERRORS_HPP
