#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sacc {

using Vector = std::vector<double>;
using Rng = std::mt19937_64;

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool contains(double v) const { return v >= lower && v <= upper; }
};

/// Raised when a caller breaks an operation's preconditions (dimension
/// mismatch, invalid index, out-of-range parameter).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Anything that maps a full decision vector to a scalar cost (minimization).
class Objective {
public:
    virtual ~Objective() = default;

    virtual std::size_t dimension() const = 0;
    virtual std::span<const Bounds> bounds() const = 0;
    virtual double evaluate(std::span<const double> x) const = 0;
};

/// Derives an independent 64-bit seed for stream `stream` of a run seeded
/// with `seed`. Used for per-sub-problem RNG streams and per-function
/// benchmark data.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline Vector uniform_point(std::span<const Bounds> bounds, Rng& rng) {
    Vector x(bounds.size());
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        std::uniform_real_distribution<double> dist(bounds[j].lower, bounds[j].upper);
        x[j] = dist(rng);
    }
    return x;
}

}  // namespace sacc
