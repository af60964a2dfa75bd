#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fisvdd/kernel.hpp"
#include "fisvdd/model.hpp"

namespace testutil {

using fisvdd::Bandwidth;
using fisvdd::DataPoint;

inline std::vector<DataPoint> random_points(std::mt19937& rng, std::size_t n,
                                            std::size_t dim, double lo = 0.0,
                                            double hi = 1.0) {
    std::uniform_real_distribution<double> coord(lo, hi);
    std::vector<DataPoint> points(n, DataPoint(dim));
    for (auto& p : points) {
        for (auto& c : p) {
            c = coord(rng);
        }
    }
    return points;
}

// Reference inversion for oracle checks: full-pivot LU, a different
// algorithm from anything the library uses on its incremental path.
inline Eigen::MatrixXd direct_inverse(const Eigen::MatrixXd& a) {
    return a.fullPivLu().inverse();
}

inline Eigen::VectorXd direct_solve_ones(const Eigen::MatrixXd& a) {
    return a.fullPivLu().solve(Eigen::VectorXd::Ones(a.rows()));
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Checks every SvddModel type invariant against a freshly reconstructed
// similarity matrix. Returns an empty string when all hold, else a
// description of the first violation.
inline std::string check_model_invariants(const fisvdd::SvddModel& model) {
    const auto k = static_cast<Eigen::Index>(model.sv_count());
    if (k == 0) return "model has no support vectors";
    if (model.sv_count() > model.params().max_sv) return "support-vector cap exceeded";

    const Eigen::MatrixXd a =
        fisvdd::build_similarity(model.support_vectors(), model.bandwidth());
    const Eigen::MatrixXd& inv = model.inverse().matrix();

    if (max_abs_diff(inv, inv.transpose()) > 1e-10) {
        return "inverse is not symmetric";
    }
    if (max_abs_diff(inv * a, Eigen::MatrixXd::Identity(k, k)) > 1e-8) {
        return "inverse disagrees with reconstructed similarity matrix";
    }
    const Eigen::VectorXd residual =
        a * model.alpha_raw() - Eigen::VectorXd::Ones(k);
    if (residual.cwiseAbs().maxCoeff() > 1e-8) {
        return "alpha_raw does not solve A alpha = e";
    }
    if ((model.alpha_raw() - inv.rowwise().sum()).cwiseAbs().maxCoeff() > 1e-10) {
        return "alpha_raw is not the row sums of the inverse";
    }
    if (model.alpha_raw().minCoeff() <= 0.0) {
        return "alpha_raw has a nonpositive entry";
    }
    if (std::abs(model.alpha().sum() - 1.0) > 1e-12) {
        return "normalized alpha does not sum to 1";
    }
    if (std::abs(model.threshold() - 1.0 / model.alpha_raw().sum()) > 1e-12) {
        return "threshold disagrees with 1/||alpha_raw||_1";
    }
    // Equidistance: every support vector sits on the boundary.
    for (const DataPoint& sv : model.support_vectors()) {
        const Eigen::VectorXd v =
            fisvdd::similarity_vector(sv, model.support_vectors(), model.bandwidth());
        const double q = model.threshold() - model.alpha().dot(v);
        if (std::abs(q) > 1e-8) {
            return "a support vector does not score on the boundary";
        }
    }
    return std::string();
}

// Streams points through a fresh model: the first point seeds the model,
// the rest go through the per-point update.
inline fisvdd::SvddModel stream_model(const std::vector<DataPoint>& points,
                                      const fisvdd::HyperParams& params) {
    fisvdd::SvddModel model =
        fisvdd::SvddModel::initialize({points.front()}, params);
    for (std::size_t i = 1; i < points.size(); ++i) {
        model.process(points[i]);
    }
    return model;
}

}  // namespace testutil
