#include "stegopt/imaging.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace stegopt {

namespace {

// PNM token scanner: skips whitespace and '#' comments, tracks the offset.
struct PnmScanner {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            const char ch = static_cast<char>(bytes[pos]);
            if (ch == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    int read_int(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos;
        long value = 0;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            value = value * 10 + (bytes[pos] - '0');
            if (value > std::numeric_limits<int>::max())
                throw ImageFormatError(std::string(what) + " out of range", start);
            ++pos;
        }
        if (pos == start)
            throw ImageFormatError(std::string("expected ") + what, pos);
        return static_cast<int>(value);
    }
};

}  // namespace

ImageGrid read_pgm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw ImageFormatError("not a binary PGM (missing P5 magic)", 0);
    PnmScanner scan{bytes, 2};
    const int width = scan.read_int("width");
    const int height = scan.read_int("height");
    scan.skip_space_and_comments();
    const std::size_t maxval_at = scan.pos;
    const int maxval = scan.read_int("maxval");
    if (width <= 0 || height <= 0)
        throw ImageFormatError("non-positive dimensions", 2);
    if (maxval != 255)
        throw ImageFormatError("maxval must be 255, got " + std::to_string(maxval), maxval_at);
    if (scan.pos >= bytes.size())
        throw ImageFormatError("missing raster data", scan.pos);
    ++scan.pos;  // single whitespace byte after maxval

    const std::size_t expected = static_cast<std::size_t>(width) * height;
    if (bytes.size() - scan.pos < expected)
        throw ImageFormatError("truncated raster: need " + std::to_string(expected) +
                                   " bytes, have " + std::to_string(bytes.size() - scan.pos),
                               bytes.size());
    ImageGrid img;
    img.width = width;
    img.height = height;
    img.pixels.assign(bytes.begin() + scan.pos, bytes.begin() + scan.pos + expected);
    return img;
}

std::vector<std::uint8_t> write_pgm(const ImageGrid& image) {
    const std::string header = "P5\n" + std::to_string(image.width) + " " +
                               std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels.begin(), image.pixels.end());
    return out;
}

ImageGrid read_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return read_pgm(bytes);
}

void write_pgm_file(const ImageGrid& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const auto bytes = write_pgm(image);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path);
}

PixelPartition split_chequered(const ImageGrid& grid) {
    if (grid.width < 3 || grid.height < 3)
        throw std::invalid_argument("image must be at least 3x3 for a context border");
    PixelPartition part;
    part.width = grid.width;
    part.height = grid.height;
    for (int r = 1; r < grid.height - 1; ++r)
        for (int c = 1; c < grid.width - 1; ++c)
            if ((r + c) % 2 == 0) part.query_pixels.emplace_back(r, c);
    return part;
}

std::vector<std::uint8_t> predict(const ImageGrid& grid, const PixelPartition& partition) {
    std::vector<std::uint8_t> predictions;
    predictions.reserve(partition.query_pixels.size());
    for (const auto& [r, c] : partition.query_pixels) {
        const int sum = grid.at(r - 1, c) + grid.at(r + 1, c) + grid.at(r, c - 1) +
                        grid.at(r, c + 1);
        predictions.push_back(static_cast<std::uint8_t>((sum + 2) / 4));
    }
    return predictions;
}

std::vector<SignedError> extract_errors(const ImageGrid& grid, const PixelPartition& partition,
                                        const std::vector<std::uint8_t>& predictions) {
    std::vector<SignedError> errors;
    errors.reserve(partition.query_pixels.size());
    for (std::size_t k = 0; k < partition.query_pixels.size(); ++k) {
        const auto& [r, c] = partition.query_pixels[k];
        const int e = static_cast<int>(grid.at(r, c)) - static_cast<int>(predictions[k]);
        errors.push_back(SignedError{std::abs(e), e < 0 ? -1 : 1});
    }
    return errors;
}

AbsErrorHistogram abs_error_histogram(const ImageGrid& grid) {
    const PixelPartition part = split_chequered(grid);
    const auto predictions = predict(grid, part);
    AbsErrorHistogram hist;
    hist.counts.assign(1, 0);
    for (const SignedError& e : extract_errors(grid, part, predictions)) {
        if (static_cast<std::size_t>(e.magnitude) >= hist.counts.size())
            hist.counts.resize(e.magnitude + 1, 0);
        hist.counts[e.magnitude]++;
    }
    return hist;
}

int choose_n(const AbsErrorHistogram& hist, int theta, double min_mass) {
    const double total = static_cast<double>(hist.total());
    const int max_mag = hist.max_magnitude();
    double mass = 0;
    for (int n = 0; n <= max_mag; ++n) {
        mass += static_cast<double>(hist.counts[n]);
        if (total > 0 && mass < min_mass * total) continue;
        bool clear = true;
        for (int b = n + 1; b <= n + theta; ++b)
            if (hist.at(b) != 0) {
                clear = false;
                break;
            }
        if (clear) return n;
    }
    return max_mag;  // everything beyond the histogram is empty by definition
}

ImageGrid encode(const ImageGrid& cover, const LinkVector& x, const MessageBits& message) {
    const PixelPartition part = split_chequered(cover);
    const auto predictions = predict(cover, part);
    const auto errors = extract_errors(cover, part, predictions);
    const CodingMap map = build_coding_map(x);
    const auto stego_errors = modulate(errors, map, message);

    ImageGrid stego = cover;
    for (std::size_t k = 0; k < part.query_pixels.size(); ++k) {
        const auto& [r, c] = part.query_pixels[k];
        const int q = static_cast<int>(predictions[k]) +
                      stego_errors[k].sign * stego_errors[k].magnitude;
        if (q < 0 || q > 255)
            throw EmbeddingOverflowError("modulated intensity " + std::to_string(q) +
                                         " at pixel (" + std::to_string(r) + "," +
                                         std::to_string(c) + ") leaves [0,255]");
        stego.at(r, c) = static_cast<std::uint8_t>(q);
    }
    return stego;
}

std::pair<ImageGrid, MessageBits> decode(const ImageGrid& stego, const LinkVector& x) {
    const PixelPartition part = split_chequered(stego);
    const auto predictions = predict(stego, part);  // context untouched: same predictions
    const auto stego_errors = extract_errors(stego, part, predictions);
    const CodingMap map = build_coding_map(x);
    auto [cover_errors, message] = demodulate(stego_errors, map);

    ImageGrid cover = stego;
    for (std::size_t k = 0; k < part.query_pixels.size(); ++k) {
        const auto& [r, c] = part.query_pixels[k];
        const int q = static_cast<int>(predictions[k]) +
                      cover_errors[k].sign * cover_errors[k].magnitude;
        if (q < 0 || q > 255)
            throw CorruptStreamError("recovered intensity " + std::to_string(q) +
                                     " leaves [0,255]; link vector mismatch likely");
        cover.at(r, c) = static_cast<std::uint8_t>(q);
    }
    return {std::move(cover), std::move(message)};
}

QualityMetrics mse_psnr(const ImageGrid& a, const ImageGrid& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatchError("images must have identical dimensions");
    double sum_sq = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        sum_sq += d * d;
    }
    QualityMetrics q;
    q.mse = sum_sq / static_cast<double>(a.pixels.size());
    q.psnr = q.mse == 0 ? std::numeric_limits<double>::infinity()
                        : 10.0 * std::log10(255.0 * 255.0 / q.mse);
    return q;
}

}  // namespace stegopt
