#ifndef STEGOPT_IMAGING_HPP
#define STEGOPT_IMAGING_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stegopt/codec.hpp"
#include "stegopt/model.hpp"

namespace stegopt {

struct ImageGrid {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
    std::uint8_t& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
    bool operator==(const ImageGrid&) const = default;
};

/// Binary PGM (P5), maxval 255 only. Parse failures carry the byte offset.
ImageGrid read_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> write_pgm(const ImageGrid& image);
ImageGrid read_pgm_file(const std::string& path);
void write_pgm_file(const ImageGrid& image, const std::string& path);

/// Chequered context/query split: all border pixels are context; an interior
/// pixel (r, c) is query iff r + c is even.
struct PixelPartition {
    int width = 0;
    int height = 0;
    std::vector<std::pair<int, int>> query_pixels;  // raster order

    bool is_query(int r, int c) const {
        return r > 0 && r < height - 1 && c > 0 && c < width - 1 && (r + c) % 2 == 0;
    }
};

PixelPartition split_chequered(const ImageGrid& grid);  // needs width, height >= 3

/// Round-half-up mean of the four orthogonal neighbours (all context by
/// parity), one prediction per query pixel in raster order.
std::vector<std::uint8_t> predict(const ImageGrid& grid, const PixelPartition& partition);

/// Signed prediction errors q - q~ per query pixel in raster order.
std::vector<SignedError> extract_errors(const ImageGrid& grid, const PixelPartition& partition,
                                        const std::vector<std::uint8_t>& predictions);

/// Histogram of |q - q~| over the query pixels.
AbsErrorHistogram abs_error_histogram(const ImageGrid& grid);

/// Smallest n such that at least min_mass of the error mass lies in [0, n]
/// and bins n+1..n+theta are all empty; falls back to the largest magnitude.
int choose_n(const AbsErrorHistogram& hist, int theta, double min_mass = 0.999);

/// Full embedding pass: split, predict, modulate, merge. Context pixels are
/// byte-identical to the cover. Throws EmbeddingOverflowError when a
/// modulated intensity leaves [0, 255], plus the codec's errors.
ImageGrid encode(const ImageGrid& cover, const LinkVector& x, const MessageBits& message);

/// Inverse of encode given the same link vector: returns the original cover
/// bit-exactly plus the embedded message.
std::pair<ImageGrid, MessageBits> decode(const ImageGrid& stego, const LinkVector& x);

struct QualityMetrics {
    double mse = 0;
    double psnr = 0;  // +infinity for identical images
};

QualityMetrics mse_psnr(const ImageGrid& a, const ImageGrid& b);

}  // namespace stegopt

#endif  // STEGOPT_IMAGING_HPP
