#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fisvdd/errors.hpp"

namespace fisvdd {

// A dense feature vector. Features are taken as-is; any scaling or
// normalization is the caller's responsibility.
using DataPoint = std::vector<double>;

// Similarities between one point and the current support vectors, in
// support-vector index order. Every entry lies in (0, 1].
using KernelVector = Eigen::VectorXd;

// Gaussian kernel bandwidth. Validated once at construction so the kernel
// routines can skip per-call checks.
class Bandwidth {
public:
    explicit Bandwidth(double sigma) : sigma_(sigma) {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw InputError("bandwidth sigma must be a positive finite number");
        }
        inv_two_sigma_sq_ = 1.0 / (2.0 * sigma * sigma);
    }

    double sigma() const { return sigma_; }
    double inv_two_sigma_sq() const { return inv_two_sigma_sq_; }

private:
    double sigma_;
    double inv_two_sigma_sq_;
};

// exp(-||x - y||^2 / (2 sigma^2)). Exactly symmetric in x and y; equals 1
// iff x == y; never clamped, so values arbitrarily close to 1 pass through
// and are dealt with by the near-duplicate filter downstream.
inline double gaussian_similarity(const DataPoint& x, const DataPoint& y,
                                  const Bandwidth& bw) {
    if (x.size() != y.size()) {
        throw InputError("dimension mismatch: " + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()));
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sq += d * d;
    }
    if (!std::isfinite(sq)) {
        throw InputError("non-finite input to gaussian_similarity");
    }
    return std::exp(-sq * bw.inv_two_sigma_sq());
}

// Similarities between z and each support vector, in list order. This is
// the border column v of the expanded similarity matrix.
inline KernelVector similarity_vector(const DataPoint& z,
                                      const std::vector<DataPoint>& svs,
                                      const Bandwidth& bw) {
    if (svs.empty()) {
        throw InputError("similarity_vector: support-vector list is empty");
    }
    KernelVector v(static_cast<Eigen::Index>(svs.size()));
    for (std::size_t i = 0; i < svs.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = gaussian_similarity(z, svs[i], bw);
    }
    return v;
}

// Full pairwise similarity matrix of a point set. Symmetric positive
// definite for distinct points; unit diagonal by construction.
inline Eigen::MatrixXd build_similarity(const std::vector<DataPoint>& points,
                                        const Bandwidth& bw) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double s = gaussian_similarity(
                points[static_cast<std::size_t>(i)],
                points[static_cast<std::size_t>(j)], bw);
            a(i, j) = s;
            a(j, i) = s;
        }
    }
    return a;
}

// Entry-point validation for stream data.
inline void validate_point(const DataPoint& p, std::size_t expected_dim) {
    if (p.size() != expected_dim) {
        throw InputError("dimension mismatch: expected " +
                         std::to_string(expected_dim) + ", got " +
                         std::to_string(p.size()));
    }
    for (double c : p) {
        if (!std::isfinite(c)) {
            throw InputError("non-finite feature value");
        }
    }
}

}  // namespace fisvdd
