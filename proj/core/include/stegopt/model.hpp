#ifndef STEGOPT_MODEL_HPP
#define STEGOPT_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stegopt/errors.hpp"

namespace stegopt {

/// Histogram of absolute prediction-error magnitudes. Index i holds the
/// number of occurrences of magnitude i; magnitude 0 is always a bin.
struct AbsErrorHistogram {
    std::vector<std::uint64_t> counts;

    /// Count for magnitude i, zero beyond the stored range.
    std::uint64_t at(std::size_t i) const { return i < counts.size() ? counts[i] : 0; }
    std::uint64_t total() const;
    int max_magnitude() const { return static_cast<int>(counts.size()) - 1; }
};

/// Extra cover-to-stego links per magnitude. Entry i is the number of extra
/// stego values magnitude i may map to; the interval width is x_i + 1.
using LinkVector = std::vector<int>;

struct ProblemSpec {
    int n = 0;           // largest decision-indexed magnitude
    int theta = 0;       // total link quota
    double payload = 0;  // required capacity in bits
    AbsErrorHistogram histogram;
};

struct EvalResult {
    double capacity = 0;    // bits
    double distortion = 0;  // expected total squared deviation
    bool feasible = false;
};

/// Capacity comparisons absorb log2 rounding noise with this slack.
inline constexpr double kPayloadTolerance = 1e-9;

/// Throws DimensionMismatchError / std::invalid_argument on broken invariants.
void validate_spec(const ProblemSpec& spec);

/// True iff every entry lies in [0, theta] and the entries sum to at most theta.
bool quota_respected(const LinkVector& x, int theta);

/// Prefix sums of x: y_0 = 0, y_i = sum of x_j for j < i.
std::vector<int> cumulative_deviations(const LinkVector& x);

/// Sum of a_i * log2(x_i + 1) over the link vector's range.
double capacity(const AbsErrorHistogram& hist, const LinkVector& x);

/// Mean squared deviation of one magnitude's stego interval:
/// average of (d + y)^2 for d = 0..x, in closed form x^2/3 + x/6 + x*y + y^2.
double per_value_distortion(int x_i, int y_i);

/// Six times per_value_distortion, which is an exact integer:
/// 2x^2 + x + 6xy + 6y^2. Used wherever exact comparison matters.
std::int64_t per_value_distortion_times6(int x_i, int y_i);

/// Expected total squared deviation: sum of a_i * per_value_distortion(x_i, y_i).
double distortion(const AbsErrorHistogram& hist, const LinkVector& x);

/// Exact sixfold distortion as an integer. Values stay well inside 64 bits for
/// image-scale counts and single-digit quotas.
std::int64_t distortion_times6(const AbsErrorHistogram& hist, const LinkVector& x);

/// Capacity, distortion and feasibility (capacity >= payload - tol, quota held).
EvalResult evaluate(const ProblemSpec& spec, const LinkVector& x);

/// CSV format: header "magnitude,count", magnitudes contiguous from 0.
AbsErrorHistogram read_histogram_csv(std::istream& in);
void write_histogram_csv(const AbsErrorHistogram& hist, std::ostream& out);

}  // namespace stegopt

#endif  // STEGOPT_MODEL_HPP
