#include "sacc/rbf.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace sacc {

namespace {

// Below this reciprocal condition estimate the bordered system is treated
// as singular.
constexpr double kSingularRcond = 1e-15;
constexpr double kTailRankThreshold = 1e-12;
constexpr double kRidgeFactor = 1e-10;

double cube(double r) { return r * r * r; }

}  // namespace

TrainingArchive::TrainingArchive(std::size_t capacity, std::vector<Bounds> bounds)
    : capacity_(capacity), bounds_(std::move(bounds)) {
    if (capacity_ == 0) {
        throw ContractViolation("training archive capacity must be positive");
    }
    if (bounds_.empty()) {
        throw ContractViolation("training archive needs a non-empty box");
    }
}

bool TrainingArchive::collides(std::span<const double> point) const {
    for (const auto& entry : entries_) {
        double dist = 0.0;
        for (std::size_t j = 0; j < point.size(); ++j) {
            dist = std::max(dist, std::abs(entry.point[j] - point[j]));
        }
        if (dist < duplicate_tolerance) {
            return true;
        }
    }
    return false;
}

void TrainingArchive::make_unique(Vector& point) const {
    std::size_t attempt = 0;
    while (collides(point)) {
        const std::size_t j = attempt % point.size();
        const Bounds& b = bounds_[j];
        const double step = perturbation_scale * (b.width() > 0.0 ? b.width() : 1.0);
        point[j] = (point[j] + step <= b.upper) ? point[j] + step : point[j] - step;
        ++attempt;
    }
}

void TrainingArchive::push(Vector point, double improvement) {
    if (point.size() != bounds_.size()) {
        throw ContractViolation("archive push: dimension mismatch");
    }
    if (entries_.size() == capacity_) {
        entries_.pop_front();
    }
    make_unique(point);
    entries_.push_back({std::move(point), improvement, next_tick_++});
}

void TrainingArchive::push_real_samples(std::span<const Sample> batch) {
    for (const auto& sample : batch) {
        if (sample.point.size() != bounds_.size()) {
            throw ContractViolation("archive push: dimension mismatch");
        }
    }
    // Older batch members would be evicted by newer ones anyway.
    const std::size_t skip = batch.size() > capacity_ ? batch.size() - capacity_ : 0;
    for (const auto& sample : batch.subspan(skip)) {
        push(sample.point, sample.improvement);
    }
}

void TrainingArchive::shift_improvements(double delta) {
    for (auto& entry : entries_) {
        entry.improvement -= delta;
    }
}

void TrainingArchive::push_unchecked(Vector point, double improvement) {
    if (point.size() != bounds_.size()) {
        throw ContractViolation("archive push: dimension mismatch");
    }
    if (entries_.size() == capacity_) {
        entries_.pop_front();
    }
    entries_.push_back({std::move(point), improvement, next_tick_++});
}

void rebase(TrainingArchive& archive, SubPopulation& population, double delta) {
    if (!(delta > 0.0)) {
        throw ContractViolation("rebase: delta must be positive");
    }
    archive.shift_improvements(delta);
    population.shift_improvements(delta);
}

RbfModel::RbfModel(std::vector<Bounds> bounds, std::vector<double> centers, Vector omega, Vector beta,
                   double alpha, bool regularized)
    : bounds_(std::move(bounds)),
      centers_(std::move(centers)),
      omega_(std::move(omega)),
      beta_(std::move(beta)),
      alpha_(alpha),
      regularized_(regularized) {
    if (beta_.size() != bounds_.size() || centers_.size() != omega_.size() * bounds_.size()) {
        throw ContractViolation("inconsistent RBF model shapes");
    }
}

void RbfModel::scale(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < bounds_.size(); ++j) {
        const double w = bounds_[j].width();
        out[j] = (x[j] - bounds_[j].lower) / (w > 0.0 ? w : 1.0);
    }
}

double RbfModel::predict(std::span<const double> x) const {
    const std::size_t s = bounds_.size();
    if (x.size() != s) {
        throw ContractViolation("predict: expected dimension " + std::to_string(s) + ", got " +
                                std::to_string(x.size()));
    }
    double u_buf[256];
    std::vector<double> u_heap;
    double* u = u_buf;
    if (s > 256) {
        u_heap.resize(s);
        u = u_heap.data();
    }
    scale(x, std::span<double>(u, s));

    double value = alpha_;
    for (std::size_t j = 0; j < s; ++j) {
        value += beta_[j] * u[j];
    }
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        const double* c = centers_.data() + i * s;
        double sq = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            const double diff = u[j] - c[j];
            sq += diff * diff;
        }
        value += omega_[i] * cube(std::sqrt(sq));
    }
    return value;
}

RbfModel train(std::span<const Vector> points, std::span<const double> labels, std::span<const Bounds> bounds) {
    const std::size_t d = points.size();
    const std::size_t s = bounds.size();
    if (labels.size() != d) {
        throw ContractViolation("train: points and labels differ in length");
    }
    if (s == 0 || d < s + 1) {
        throw TrainingError("train: need at least s + 1 = " + std::to_string(s + 1) + " samples, have " +
                            std::to_string(d));
    }

    std::vector<Bounds> box(bounds.begin(), bounds.end());
    std::vector<double> centers(d * s);
    for (std::size_t i = 0; i < d; ++i) {
        if (points[i].size() != s) {
            throw ContractViolation("train: sample dimension mismatch");
        }
        for (std::size_t j = 0; j < s; ++j) {
            const double w = box[j].width();
            centers[i * s + j] = (points[i][j] - box[j].lower) / (w > 0.0 ? w : 1.0);
        }
    }

    // The bordered system is solvable only if the tail [X 1] has full column
    // rank; a ridge on the kernel block cannot repair a degenerate tail.
    Eigen::MatrixXd tail(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(s + 1));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            tail(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = centers[i * s + j];
        }
        tail(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = 1.0;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> tail_qr(tail);
    tail_qr.setThreshold(kTailRankThreshold);
    if (tail_qr.rank() < static_cast<Eigen::Index>(s + 1)) {
        throw TrainingError("train: sample points are degenerate (rank of [X 1] is " +
                            std::to_string(tail_qr.rank()) + ", need " + std::to_string(s + 1) + ")");
    }

    const Eigen::Index size = static_cast<Eigen::Index>(d + s + 1);
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(size, size);
    double phi_abs_sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = i + 1; k < d; ++k) {
            double sq = 0.0;
            for (std::size_t j = 0; j < s; ++j) {
                const double diff = centers[i * s + j] - centers[k * s + j];
                sq += diff * diff;
            }
            const double phi = cube(std::sqrt(sq));
            system(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = phi;
            system(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = phi;
            phi_abs_sum += 2.0 * phi;
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < s; ++j) {
            const auto col = static_cast<Eigen::Index>(d + j);
            system(row, col) = centers[i * s + j];
            system(col, row) = centers[i * s + j];
        }
        system(row, size - 1) = 1.0;
        system(size - 1, row) = 1.0;
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    for (std::size_t i = 0; i < d; ++i) {
        rhs(static_cast<Eigen::Index>(i)) = labels[i];
    }

    auto solve = [&](const Eigen::MatrixXd& a, Eigen::VectorXd& out) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        if (!(lu.rcond() >= kSingularRcond)) {
            return false;
        }
        out = lu.solve(rhs);
        return out.allFinite();
    };

    Eigen::VectorXd coeffs;
    bool regularized = false;
    if (!solve(system, coeffs)) {
        // The cubic kernel has a zero diagonal, so the ridge is scaled by the
        // mean absolute kernel row sum instead of the trace.
        const double lambda = kRidgeFactor * std::max(phi_abs_sum / static_cast<double>(d), 1.0);
        Eigen::MatrixXd ridged = system;
        for (std::size_t i = 0; i < d; ++i) {
            ridged(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += lambda;
        }
        regularized = true;
        if (!solve(ridged, coeffs)) {
            throw TrainingError("train: RBF system is singular (rank(Q) < s + 1?)");
        }
    }

    Vector omega(d);
    Vector beta(s);
    for (std::size_t i = 0; i < d; ++i) {
        omega[i] = coeffs(static_cast<Eigen::Index>(i));
    }
    for (std::size_t j = 0; j < s; ++j) {
        beta[j] = coeffs(static_cast<Eigen::Index>(d + j));
    }
    const double alpha = coeffs(size - 1);
    return RbfModel(std::move(box), std::move(centers), std::move(omega), std::move(beta), alpha, regularized);
}

RbfModel train(const TrainingArchive& archive) {
    std::vector<Vector> points;
    std::vector<double> labels;
    points.reserve(archive.size());
    labels.reserve(archive.size());
    for (const auto& entry : archive.entries()) {
        points.push_back(entry.point);
        labels.push_back(entry.improvement);
    }
    return train(points, labels, archive.bounds());
}

std::string dump_model_json(const RbfModel& model, const TrainingArchive& archive) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& entry : archive.entries()) {
        samples.push_back({{"tick", entry.tick}, {"point", entry.point}, {"improvement", entry.improvement}});
    }
    return nlohmann::json{{"dimension", model.dim()},
                          {"samples", samples},
                          {"omega", model.omega()},
                          {"beta", model.beta()},
                          {"alpha", model.alpha()},
                          {"regularized", model.regularized()}}
        .dump(2);
}

}  // namespace sacc
