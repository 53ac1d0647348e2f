#include "stegopt/model.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace stegopt {

std::uint64_t AbsErrorHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

void validate_spec(const ProblemSpec& spec) {
    if (spec.n < 0) throw std::invalid_argument("n must be non-negative");
    if (spec.theta < 0) throw std::invalid_argument("theta must be non-negative");
    if (spec.payload < 0) throw std::invalid_argument("payload must be non-negative");
    if (spec.histogram.counts.empty())
        throw std::invalid_argument("histogram must have at least the magnitude-0 bin");
    if (static_cast<std::size_t>(spec.n) + 1 > spec.histogram.counts.size())
        throw DimensionMismatchError("n+1 exceeds histogram range");
}

bool quota_respected(const LinkVector& x, int theta) {
    long long sum = 0;
    for (int xi : x) {
        if (xi < 0 || xi > theta) return false;
        sum += xi;
    }
    return sum <= theta;
}

std::vector<int> cumulative_deviations(const LinkVector& x) {
    std::vector<int> y(x.size(), 0);
    for (std::size_t i = 1; i < x.size(); ++i) y[i] = y[i - 1] + x[i - 1];
    return y;
}

double capacity(const AbsErrorHistogram& hist, const LinkVector& x) {
    if (x.size() > hist.counts.size())
        throw DimensionMismatchError("link vector longer than histogram range");
    double bits = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0) bits += static_cast<double>(hist.counts[i]) * std::log2(x[i] + 1.0);
    }
    return bits;
}

std::int64_t per_value_distortion_times6(int x_i, int y_i) {
    const std::int64_t x = x_i, y = y_i;
    return 2 * x * x + x + 6 * x * y + 6 * y * y;
}

double per_value_distortion(int x_i, int y_i) {
    return static_cast<double>(per_value_distortion_times6(x_i, y_i)) / 6.0;
}

std::int64_t distortion_times6(const AbsErrorHistogram& hist, const LinkVector& x) {
    if (x.size() > hist.counts.size())
        throw DimensionMismatchError("link vector longer than histogram range");
    std::int64_t six = 0;
    std::int64_t y = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        six += static_cast<std::int64_t>(hist.counts[i]) *
               per_value_distortion_times6(x[i], static_cast<int>(y));
        y += x[i];
    }
    return six;
}

double distortion(const AbsErrorHistogram& hist, const LinkVector& x) {
    return static_cast<double>(distortion_times6(hist, x)) / 6.0;
}

EvalResult evaluate(const ProblemSpec& spec, const LinkVector& x) {
    if (x.size() != static_cast<std::size_t>(spec.n) + 1)
        throw DimensionMismatchError("link vector length must be n+1");
    EvalResult r;
    r.capacity = capacity(spec.histogram, x);
    r.distortion = distortion(spec.histogram, x);
    r.feasible = quota_respected(x, spec.theta) && r.capacity >= spec.payload - kPayloadTolerance;
    return r;
}

AbsErrorHistogram read_histogram_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CsvFormatError("empty histogram CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "magnitude,count")
        throw CsvFormatError("expected header 'magnitude,count', got '" + line + "'");

    AbsErrorHistogram hist;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string mag_s, count_s;
        if (!std::getline(row, mag_s, ',') || !std::getline(row, count_s))
            throw CsvFormatError("malformed row '" + line + "'");
        std::size_t mag;
        long long count;
        try {
            mag = std::stoull(mag_s);
            count = std::stoll(count_s);
        } catch (const std::exception&) {
            throw CsvFormatError("non-numeric row '" + line + "'");
        }
        if (mag != expected)
            throw CsvFormatError("magnitudes must be contiguous from 0, got " + mag_s);
        if (count < 0) throw CsvFormatError("negative count in row '" + line + "'");
        hist.counts.push_back(static_cast<std::uint64_t>(count));
        ++expected;
    }
    if (hist.counts.empty()) throw CsvFormatError("histogram CSV has no data rows");
    return hist;
}

void write_histogram_csv(const AbsErrorHistogram& hist, std::ostream& out) {
    out << "magnitude,count\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        out << i << ',' << hist.counts[i] << '\n';
}

}  // namespace stegopt
