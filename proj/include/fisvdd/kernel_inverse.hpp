#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "fisvdd/errors.hpp"
#include "fisvdd/kernel.hpp"

namespace fisvdd {

// Expansions whose Schur complement falls at or below this are rejected as
// numerically degenerate even when the near-duplicate filter passed.
inline constexpr double kBetaMin = 1e-12;

// Pivot magnitude below which a shrink is refused. A valid SPD inverse
// always has strictly positive diagonal entries, so hitting this signals
// corrupted state rather than unlucky data.
inline constexpr double kLambdaMin = 1e-14;

// The inverse of the support vectors' Gaussian similarity matrix, kept
// up to date by rank-one expansion and removal instead of refactorization.
// Dense storage; the support-vector cap bounds the order.
class KernelInverse {
public:
    explicit KernelInverse(Eigen::MatrixXd entries)
        : entries_(std::move(entries)) {}

    // Order-1 inverse of the trivial similarity matrix [1].
    static KernelInverse unit() {
        return KernelInverse(Eigen::MatrixXd::Identity(1, 1));
    }

    Eigen::Index order() const { return entries_.rows(); }
    const Eigen::MatrixXd& matrix() const { return entries_; }

private:
    Eigen::MatrixXd entries_;
};

struct ExpandedInverse {
    KernelInverse inverse;  // order k+1; the new point occupies the last index
    double beta;            // Schur complement 1 - v^T A^-1 v
};

// Grow the inverse by one point whose similarities to the current set are v.
// With p = A^-1 v and beta = 1 - v^T p, the expanded inverse is
//
//   [ A^-1 + p p^T / beta   -p / beta ]
//   [     -p^T / beta        1 / beta ]
//
// beta is positive whenever the expanded similarity matrix is SPD; a value
// at or below kBetaMin throws IllConditionedError and the caller must
// reject the point.
inline ExpandedInverse expand_inverse(const KernelInverse& inv,
                                      const KernelVector& v) {
    const Eigen::Index k = inv.order();
    if (v.size() != k) {
        throw InputError("expand_inverse: vector length " +
                         std::to_string(v.size()) + " does not match order " +
                         std::to_string(k));
    }
    const Eigen::VectorXd p = inv.matrix() * v;
    const double beta = 1.0 - v.dot(p);
    if (!(beta > kBetaMin)) {
        throw IllConditionedError(
            "expansion rejected: Schur complement " + std::to_string(beta) +
            " is not safely positive");
    }
    Eigen::MatrixXd grown(k + 1, k + 1);
    grown.topLeftCorner(k, k) = inv.matrix() + p * p.transpose() / beta;
    grown.topRightCorner(k, 1) = -p / beta;
    grown.bottomLeftCorner(1, k) = -p.transpose() / beta;
    grown(k, k) = 1.0 / beta;
    return ExpandedInverse{KernelInverse(std::move(grown)), beta};
}

// Remove one point from the set the inverse describes. The row/column at
// `index` is first moved to the last position with a cyclic permutation, so
// the remaining points keep their relative order; the caller must reorder
// its support-vector list the same way (erasing at `index` does exactly
// that). With the inverse partitioned as [P u; u^T lambda], the shrunken
// inverse is P - u u^T / lambda.
inline KernelInverse shrink_inverse(const KernelInverse& inv,
                                    Eigen::Index index) {
    const Eigen::Index k = inv.order();
    if (k < 2) {
        throw InputError("shrink_inverse: cannot shrink an order-1 inverse");
    }
    if (index < 0 || index >= k) {
        throw InputError("shrink_inverse: index " + std::to_string(index) +
                         " out of range for order " + std::to_string(k));
    }
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        Eigen::Index dest;
        if (i < index) {
            dest = i;
        } else if (i == index) {
            dest = k - 1;
        } else {
            dest = i - 1;
        }
        perm.indices()[i] = static_cast<int>(dest);
    }
    // Symmetric relabeling: rows and columns move together.
    const Eigen::MatrixXd permuted =
        perm * inv.matrix() * perm.transpose();

    const double lambda = permuted(k - 1, k - 1);
    if (std::abs(lambda) < kLambdaMin) {
        throw IllConditionedError(
            "shrink_inverse: degenerate pivot " + std::to_string(lambda));
    }
    const Eigen::VectorXd u = permuted.topRightCorner(k - 1, 1);
    Eigen::MatrixXd shrunk =
        permuted.topLeftCorner(k - 1, k - 1) - u * u.transpose() / lambda;
    return KernelInverse(std::move(shrunk));
}

// Row sums of the inverse, i.e. the unnormalized multipliers alpha_0
// solving A alpha_0 = e. When the point set is a valid support-vector set
// every entry is strictly positive.
inline Eigen::VectorXd row_sums(const KernelInverse& inv) {
    return inv.matrix().rowwise().sum();
}

// Direct inversion of a similarity matrix, used at initialization, on
// model load, and for the optional periodic refresh that bounds
// floating-point drift over long streams.
inline KernelInverse invert_similarity(const Eigen::MatrixXd& a) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw IllConditionedError(
            "similarity matrix is not numerically positive definite");
    }
    Eigen::MatrixXd inv =
        llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    // LLT solves column by column; restore exact symmetry.
    inv = ((inv + inv.transpose()) * 0.5).eval();
    return KernelInverse(std::move(inv));
}

}  // namespace fisvdd
