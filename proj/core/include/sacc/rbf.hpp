#pragma once

#include "sacc/population.hpp"
#include "sacc/types.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sacc {

struct Sample {
    Vector point;
    double improvement = 0.0;
};

struct ArchiveEntry {
    Vector point;
    double improvement = 0.0;
    std::uint64_t tick = 0;
};

/// FIFO store of the newest `capacity` real-evaluated sub-solutions of one
/// sub-problem, used as RBF training data.
///
/// Insertion never stores two points closer than `duplicate_tolerance` in
/// the infinity norm: a colliding point is nudged by `perturbation_scale`
/// times the variable's range until it is unique.
class TrainingArchive {
public:
    static constexpr double duplicate_tolerance = 1e-12;
    static constexpr double perturbation_scale = 1e-9;

    TrainingArchive(std::size_t capacity, std::vector<Bounds> bounds);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool full() const { return entries_.size() == capacity_; }
    std::size_t dim() const { return bounds_.size(); }
    std::span<const Bounds> bounds() const { return bounds_; }
    const std::deque<ArchiveEntry>& entries() const { return entries_; }

    /// Inserts one sample, evicting the oldest entry when full.
    void push(Vector point, double improvement);

    /// Evicts the |batch| oldest entries (when full) and appends the batch
    /// in order with fresh ticks. A batch larger than the capacity keeps
    /// only its newest members.
    void push_real_samples(std::span<const Sample> batch);

    /// Subtracts delta from every stored improvement.
    void shift_improvements(double delta);

    /// Inserts without the duplicate check. Only for exercising the
    /// singular-system fallback in tests.
    void push_unchecked(Vector point, double improvement);

private:
    bool collides(std::span<const double> point) const;
    void make_unique(Vector& point) const;

    std::size_t capacity_;
    std::vector<Bounds> bounds_;
    std::deque<ArchiveEntry> entries_;
    std::uint64_t next_tick_ = 1;
};

/// Rebases every stored improvement in D_g and P_g after the context vector
/// improved by delta. Throws ContractViolation unless delta > 0.
void rebase(TrainingArchive& archive, SubPopulation& population, double delta);

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cubic RBF interpolant with a linear polynomial tail,
///   e(x) = sum_i w_i * |u(x) - c_i|^3 + beta^T u(x) + alpha,
/// where u(x) maps the sub-problem box affinely onto [0,1]^s and c_i are
/// the scaled training samples.
class RbfModel {
public:
    RbfModel(std::vector<Bounds> bounds, std::vector<double> centers, Vector omega, Vector beta, double alpha,
             bool regularized);

    double predict(std::span<const double> x) const;

    std::size_t dim() const { return bounds_.size(); }
    std::size_t num_centers() const { return omega_.size(); }
    std::span<const Bounds> bounds() const { return bounds_; }
    /// Row-major num_centers() x dim() matrix of scaled centers.
    std::span<const double> centers() const { return centers_; }
    const Vector& omega() const { return omega_; }
    const Vector& beta() const { return beta_; }
    double alpha() const { return alpha_; }
    /// True when the ridge fallback was needed to solve the system.
    bool regularized() const { return regularized_; }

    /// Maps a raw sub-solution into the model's unit box.
    void scale(std::span<const double> x, std::span<double> out) const;

private:
    std::vector<Bounds> bounds_;
    std::vector<double> centers_;
    Vector omega_;
    Vector beta_;
    double alpha_;
    bool regularized_;
};

/// Fits the interpolant to the archive. Requires at least dim + 1 samples.
/// Falls back to a ridge term on the kernel block when the bordered system
/// is numerically singular; throws TrainingError if that also fails.
RbfModel train(const TrainingArchive& archive);
RbfModel train(std::span<const Vector> points, std::span<const double> labels, std::span<const Bounds> bounds);

/// Samples, labels and coefficients as JSON for offline inspection.
std::string dump_model_json(const RbfModel& model, const TrainingArchive& archive);

}  // namespace sacc
