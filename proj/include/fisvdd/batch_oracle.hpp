#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fisvdd/errors.hpp"
#include "fisvdd/kernel.hpp"

namespace fisvdd {

// Globally optimal multipliers for a small batch instance, found by
// exhaustive subset enumeration. Used as the reference against which the
// incremental learner is verified; not meant for production sizes.
struct OracleSolution {
    std::vector<int> support_indices;  // ascending
    Eigen::VectorXd alpha;             // normalized, aligned with support_indices
    double objective;                  // 1 / ||alpha_0||_1 of the solved subsystem
};

namespace oracle_detail {

// q tolerance for the "no point outside the subset violates the boundary"
// test. Nonzero so that points numerically on the boundary do not knock out
// the true optimum.
inline constexpr double kOutsideTol = 1e-10;
// Keepers must agree on the objective to within this; anything else means
// the enumeration is inconsistent.
inline constexpr double kTieTol = 1e-8;

}  // namespace oracle_detail

// Euclidean projection onto the probability simplex (sort-based).
inline Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size();
    std::vector<double> u(y.data(), y.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumulative += u[static_cast<std::size_t>(j)];
        const double candidate = (1.0 - cumulative) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] + candidate > 0.0) {
            theta = candidate;
        }
    }
    return (y.array() + theta).cwiseMax(0.0);
}

// Minimizes alpha^T A alpha over the probability simplex by projected
// gradient descent, run to the given stationarity tolerance. Serves as an
// algebraically independent cross-check on the subset enumeration.
inline Eigen::VectorXd minimize_on_simplex(const Eigen::MatrixXd& a,
                                           double tol = 1e-12,
                                           std::size_t max_iter = 1000000) {
    const Eigen::Index n = a.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const double spectral_bound = std::max(eig.eigenvalues().maxCoeff(), 1.0);
    const double step = 1.0 / (2.0 * spectral_bound);
    Eigen::VectorXd alpha = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (std::size_t it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd gradient = 2.0 * (a * alpha);
        const Eigen::VectorXd next = project_to_simplex(alpha - step * gradient);
        const double move = (next - alpha).cwiseAbs().maxCoeff();
        alpha = next;
        if (move <= tol) {
            break;
        }
    }
    return alpha;
}

// Finds the unique KKT point of the dual by trying every nonempty subset:
// a subset is kept iff its linear system has a strictly positive solution
// and no point outside it scores beyond the resulting boundary. Enumeration
// is exponential, so instances are capped at 20 points.
inline OracleSolution batch_solve(const std::vector<DataPoint>& points,
                                  const Bandwidth& bw) {
    const std::size_t n = points.size();
    if (n == 0) {
        throw InputError("batch_solve: empty instance");
    }
    if (n > 20) {
        throw InputError("batch_solve: instances above 20 points are not supported");
    }
    const Eigen::MatrixXd full = build_similarity(points, bw);

    std::vector<OracleSolution> keepers;
    std::vector<int> members;
    std::vector<int> outsiders;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        members.clear();
        outsiders.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                members.push_back(static_cast<int>(i));
            } else {
                outsiders.push_back(static_cast<int>(i));
            }
        }
        const auto k = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXd sub(k, k);
        for (Eigen::Index r = 0; r < k; ++r) {
            for (Eigen::Index c = 0; c < k; ++c) {
                sub(r, c) = full(members[static_cast<std::size_t>(r)],
                                 members[static_cast<std::size_t>(c)]);
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(sub);
        if (llt.info() != Eigen::Success) {
            continue;
        }
        const Eigen::VectorXd alpha0 = llt.solve(Eigen::VectorXd::Ones(k));
        if (alpha0.minCoeff() <= 0.0) {
            continue;
        }
        const double norm = alpha0.sum();
        const double objective = 1.0 / norm;

        bool admissible = true;
        for (int z : outsiders) {
            double weighted = 0.0;
            for (Eigen::Index r = 0; r < k; ++r) {
                weighted += alpha0[r] * full(members[static_cast<std::size_t>(r)], z);
            }
            const double q = (1.0 - weighted) / norm;
            if (q > oracle_detail::kOutsideTol) {
                admissible = false;
                break;
            }
        }
        if (!admissible) {
            continue;
        }
        keepers.push_back(OracleSolution{members, alpha0 / norm, objective});
    }

    if (keepers.empty()) {
        throw OracleError("batch_solve: no subset satisfies the optimality conditions");
    }
    // Strict convexity makes the KKT point unique; several keepers can only
    // be numerical ties of the same solution.
    const auto best = std::min_element(
        keepers.begin(), keepers.end(),
        [](const OracleSolution& a, const OracleSolution& b) {
            if (a.objective != b.objective) return a.objective < b.objective;
            return a.support_indices.size() < b.support_indices.size();
        });
    for (const OracleSolution& sol : keepers) {
        if (std::abs(sol.objective - best->objective) > oracle_detail::kTieTol) {
            throw OracleError("batch_solve: enumeration produced conflicting optima");
        }
    }
    return *best;
}

// Checks the optimality conditions of a proposed solution: support points
// must sit on the boundary (q = 0 within 1e-8) and every other point must
// be inside it (q <= 1e-10).
inline bool kkt_verify(const std::vector<DataPoint>& points,
                       const OracleSolution& solution, const Bandwidth& bw) {
    const std::size_t n = points.size();
    std::vector<bool> is_support(n, false);
    std::vector<DataPoint> svs;
    for (int idx : solution.support_indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
            throw InputError("kkt_verify: support index out of range");
        }
        is_support[static_cast<std::size_t>(idx)] = true;
        svs.push_back(points[static_cast<std::size_t>(idx)]);
    }
    const Eigen::MatrixXd a = build_similarity(svs, bw);
    const Eigen::VectorXd& alpha = solution.alpha;
    const double threshold = alpha.dot(a * alpha);
    for (std::size_t i = 0; i < n; ++i) {
        const KernelVector v = similarity_vector(points[i], svs, bw);
        const double q = threshold - alpha.dot(v);
        if (is_support[i]) {
            if (std::abs(q) > 1e-8) {
                return false;
            }
        } else if (q > oracle_detail::kOutsideTol) {
            return false;
        }
    }
    return true;
}

}  // namespace fisvdd
