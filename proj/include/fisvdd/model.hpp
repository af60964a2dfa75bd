#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fisvdd/errors.hpp"
#include "fisvdd/kernel.hpp"
#include "fisvdd/kernel_inverse.hpp"

namespace fisvdd {

struct HyperParams {
    double sigma = 1.0;
    std::size_t max_sv = 1024;       // hard cap M on the support-vector count
    double eps_far = 1e-6;           // max similarity below this -> far outlier
    double eps_near = 1e-9;          // max similarity above 1 - eps_near -> near duplicate
    std::size_t refresh_every = 0;   // rebuild the inverse every N absorbed points; 0 disables

    void validate() const {
        Bandwidth check(sigma);  // throws on nonpositive / non-finite
        (void)check;
        if (max_sv < 1) {
            throw InputError("max_sv must be at least 1");
        }
        if (!(eps_far >= 0.0 && eps_far < 1.0)) {
            throw InputError("eps_far must lie in [0, 1)");
        }
        if (!(eps_near >= 0.0 && eps_near < 1.0)) {
            throw InputError("eps_near must lie in [0, 1)");
        }
        if (!(eps_far < 1.0 - eps_near)) {
            throw InputError("eps_far must be smaller than 1 - eps_near");
        }
    }
};

enum class Label { inside, outside, far_outlier, near_duplicate };

struct ScoreOutcome {
    double q;     // threshold minus weighted similarity; q <= 0 means inside
    Label label;
};

enum class Action {
    discarded_interior,
    discarded_far_outlier,
    discarded_near_duplicate,
    absorbed_as_sv,
    absorbed_with_shrink,
    replaced_under_cap,
    reverted,
};

struct UpdateOutcome {
    Action action;
    std::size_t sv_count;
    double objective;  // model threshold after the update
};

enum class ExpandResult { absorbed, rejected_interior, rejected_ill_conditioned };

// Points removed while shrinking, kept in first-in-first-out order for the
// single re-scan pass.
using BackupSet = std::vector<DataPoint>;

inline const char* to_string(Label label) {
    switch (label) {
        case Label::inside: return "inside";
        case Label::outside: return "outside";
        case Label::far_outlier: return "far_outlier";
        case Label::near_duplicate: return "near_duplicate";
    }
    return "unknown";
}

inline const char* to_string(Action action) {
    switch (action) {
        case Action::discarded_interior: return "discarded_interior";
        case Action::discarded_far_outlier: return "discarded_far_outlier";
        case Action::discarded_near_duplicate: return "discarded_near_duplicate";
        case Action::absorbed_as_sv: return "absorbed_as_sv";
        case Action::absorbed_with_shrink: return "absorbed_with_shrink";
        case Action::replaced_under_cap: return "replaced_under_cap";
        case Action::reverted: return "reverted";
    }
    return "unknown";
}

// The incremental one-class learner. Holds the support vectors, the inverse
// of their similarity matrix, and the multipliers solving A alpha = e; every
// per-point update costs O(k^2) in the current support-vector count k.
//
// Single writer: process() and the mutating helpers need exclusive access.
// score() is read-only and may run concurrently with other score() calls.
class SvddModel {
public:
    // Builds the first model from a burn-in batch: near-duplicates are
    // dropped, the similarity matrix is formed and inverted directly, and
    // interior burn-in points are shrunk away.
    static SvddModel initialize(const std::vector<DataPoint>& burn_in,
                                const HyperParams& params) {
        params.validate();
        if (burn_in.empty()) {
            throw InputError("initialize: burn-in batch is empty");
        }
        const Bandwidth bw(params.sigma);
        const std::size_t dim = burn_in.front().size();

        std::vector<DataPoint> kept;
        for (const DataPoint& p : burn_in) {
            validate_point(p, dim);
            bool duplicate = false;
            for (const DataPoint& q : kept) {
                const double s = gaussian_similarity(p, q, bw);
                if (s > 1.0 - params.eps_near || s >= 1.0) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) {
                kept.push_back(p);
            }
        }

        SvddModel model(std::move(kept), params, bw, dim);
        if (model.alpha_raw_.minCoeff() <= 0.0 && model.order() >= 2) {
            BackupSet dropped;  // burn-in interior points are not re-scanned
            model.shrink(dropped);
        }
        model.enforce_cap();
        return model;
    }

    // Rebuilds a model from persisted state. The inverse is recomputed from
    // the support vectors; the stored multipliers must solve the
    // reconstructed system A alpha = e to within residual_tol.
    static SvddModel from_trained_state(std::vector<DataPoint> support_vectors,
                                        Eigen::VectorXd alpha_raw,
                                        const HyperParams& params,
                                        double residual_tol = 1e-6) {
        params.validate();
        if (support_vectors.empty()) {
            throw CorruptModelError("model has no support vectors");
        }
        const Bandwidth bw(params.sigma);
        const std::size_t dim = support_vectors.front().size();
        for (const DataPoint& p : support_vectors) {
            validate_point(p, dim);
        }
        if (alpha_raw.size() !=
            static_cast<Eigen::Index>(support_vectors.size())) {
            throw CorruptModelError("multiplier count does not match support-vector count");
        }
        if (alpha_raw.minCoeff() <= 0.0) {
            throw CorruptModelError("stored multipliers must be strictly positive");
        }

        SvddModel model(std::move(support_vectors), params, bw, dim);
        const Eigen::MatrixXd a = build_similarity(model.support_vectors_, bw);
        const double residual =
            (a * alpha_raw - Eigen::VectorXd::Ones(alpha_raw.size()))
                .cwiseAbs()
                .maxCoeff();
        if (!(residual < residual_tol)) {
            throw CorruptModelError("stored multipliers do not solve the reconstructed system (residual " +
                                    std::to_string(residual) + ")");
        }
        model.alpha_raw_ = std::move(alpha_raw);
        model.refresh_caches();
        return model;
    }

    // Q(z) = L - sum_i alpha_i K(z, x_i). The two epsilon filters run first
    // and take precedence over the sign of q.
    ScoreOutcome score(const DataPoint& z) const {
        validate_point(z, dim_);
        const KernelVector v = similarity_vector(z, support_vectors_, bandwidth_);
        return score_from_similarities(v);
    }

    // One step of the main loop: score, filter, expand, shrink with backup
    // re-scan, enforce the support-vector cap, and guard objective
    // monotonicity. Every rejection path leaves the model exactly as it was.
    UpdateOutcome process(const DataPoint& z) {
        validate_point(z, dim_);
        const KernelVector v = similarity_vector(z, support_vectors_, bandwidth_);
        const ScoreOutcome scored = score_from_similarities(v);
        switch (scored.label) {
            case Label::far_outlier:
                return outcome(Action::discarded_far_outlier);
            case Label::near_duplicate:
                return outcome(Action::discarded_near_duplicate);
            case Label::inside:
                return outcome(Action::discarded_interior);
            case Label::outside:
                break;
        }

        const SvddModel before = *this;
        const double norm_before = alpha_raw_.sum();
        const bool at_cap = support_vectors_.size() >= params_.max_sv;

        switch (expand(z, v)) {
            case ExpandResult::rejected_interior:
                return outcome(Action::discarded_interior);
            case ExpandResult::rejected_ill_conditioned:
                return outcome(Action::discarded_near_duplicate);
            case ExpandResult::absorbed:
                break;
        }

        Action action = Action::absorbed_as_sv;
        bool needs_shrink = alpha_raw_.minCoeff() <= 0.0;
        if (at_cap && !needs_shrink) {
            // All multipliers positive at M + 1 support vectors: either the
            // new point or the weakest existing one has to go.
            const Eigen::Index weakest = argmin_lowest(alpha_raw_);
            if (weakest == alpha_raw_.size() - 1) {
                *this = before;
                return outcome(Action::discarded_interior);
            }
            remove_support_vector(weakest);
            // The incoming point sits at the last index after the removal.
            if (alpha_raw_[alpha_raw_.size() - 1] <= 0.0) {
                *this = before;
                return outcome(Action::discarded_interior);
            }
            action = Action::replaced_under_cap;
            needs_shrink = alpha_raw_.minCoeff() <= 0.0;
        } else if (needs_shrink) {
            action = Action::absorbed_with_shrink;
        }

        if (needs_shrink) {
            BackupSet backup;
            shrink(backup);
            rescan_backup(backup);
        }

        const double norm_after = alpha_raw_.sum();
        if (norm_after < norm_before) {
            *this = before;
            return outcome(Action::reverted);
        }
        maybe_refresh();
        return outcome(action);
    }

    // Expanding stage: grow the inverse with the incoming point, recompute
    // the multipliers, and roll back if the new point's multiplier comes out
    // nonpositive (it is an interior point in that case).
    ExpandResult expand(const DataPoint& z, const KernelVector& v) {
        validate_point(z, dim_);
        std::optional<ExpandedInverse> grown;
        try {
            grown = expand_inverse(inverse_, v);
        } catch (const IllConditionedError&) {
            return ExpandResult::rejected_ill_conditioned;
        }
        Eigen::VectorXd sums = row_sums(grown->inverse);
        if (sums[sums.size() - 1] <= 0.0) {
            return ExpandResult::rejected_interior;
        }
        inverse_ = std::move(grown->inverse);
        alpha_raw_ = std::move(sums);
        support_vectors_.push_back(z);
        refresh_caches();
        return ExpandResult::absorbed;
    }

    // Shrinking stage: repeatedly remove the support vector with the
    // smallest multiplier (lowest index on ties) until all multipliers are
    // positive, parking each removed point in the backup set.
    void shrink(BackupSet& backup) {
        if (order() < 2) {
            throw InputError("shrink: need at least two support vectors");
        }
        if (alpha_raw_.minCoeff() > 0.0) {
            throw InputError("shrink: all multipliers are already positive");
        }
        while (true) {
            const Eigen::Index victim = argmin_lowest(alpha_raw_);
            backup.push_back(support_vectors_[static_cast<std::size_t>(victim)]);
            remove_support_vector(victim);
            if (alpha_raw_.minCoeff() > 0.0 || order() < 2) {
                break;
            }
        }
    }

    double objective_value() const { return threshold_; }
    double threshold() const { return threshold_; }
    std::size_t sv_count() const { return support_vectors_.size(); }
    std::size_t dimension() const { return dim_; }
    const std::vector<DataPoint>& support_vectors() const { return support_vectors_; }
    const Eigen::VectorXd& alpha_raw() const { return alpha_raw_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    const KernelInverse& inverse() const { return inverse_; }
    const HyperParams& params() const { return params_; }
    const Bandwidth& bandwidth() const { return bandwidth_; }

private:
    SvddModel(std::vector<DataPoint> svs, const HyperParams& params,
              const Bandwidth& bw, std::size_t dim)
        : support_vectors_(std::move(svs)),
          inverse_(invert_similarity(build_similarity(support_vectors_, bw))),
          alpha_raw_(row_sums(inverse_)),
          bandwidth_(bw),
          params_(params),
          dim_(dim) {
        refresh_caches();
    }

    static Eigen::Index argmin_lowest(const Eigen::VectorXd& x) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < x.size(); ++i) {
            if (x[i] < x[best]) {
                best = i;
            }
        }
        return best;
    }

    Eigen::Index order() const { return inverse_.order(); }

    ScoreOutcome score_from_similarities(const KernelVector& v) const {
        const double vmax = v.maxCoeff();
        const double q = threshold_ - alpha_.dot(v);
        if (vmax < params_.eps_far) {
            return ScoreOutcome{q, Label::far_outlier};
        }
        if (vmax > 1.0 - params_.eps_near) {
            return ScoreOutcome{q, Label::near_duplicate};
        }
        return ScoreOutcome{q, q <= 0.0 ? Label::inside : Label::outside};
    }

    UpdateOutcome outcome(Action action) const {
        return UpdateOutcome{action, sv_count(), threshold_};
    }

    void refresh_caches() {
        const double norm = alpha_raw_.sum();
        threshold_ = 1.0 / norm;
        alpha_ = alpha_raw_ / norm;
    }

    // Drop one support vector and bring the multipliers and caches back in
    // sync. Degenerate pivots cannot occur for a valid SPD inverse, so they
    // surface as invariant violations here.
    void remove_support_vector(Eigen::Index index) {
        try {
            inverse_ = shrink_inverse(inverse_, index);
        } catch (const IllConditionedError& e) {
            throw InvariantError(e.what());
        }
        support_vectors_.erase(support_vectors_.begin() + index);
        alpha_raw_ = row_sums(inverse_);
        refresh_caches();
    }

    // Single FIFO pass over the shrink casualties: anything that scores
    // outside the new boundary is re-admitted and immediately takes part in
    // scoring the later entries. Points that cannot fit under the cap stay
    // discarded.
    void rescan_backup(const BackupSet& backup) {
        for (const DataPoint& b : backup) {
            if (support_vectors_.size() >= params_.max_sv) {
                break;
            }
            const KernelVector vb =
                similarity_vector(b, support_vectors_, bandwidth_);
            if (threshold_ - alpha_.dot(vb) > 0.0) {
                expand(b, vb);
            }
        }
        // A re-admission can in rare cases flip another multiplier's sign;
        // restore positivity without a second re-scan.
        if (alpha_raw_.minCoeff() <= 0.0 && order() >= 2) {
            BackupSet spill;
            shrink(spill);
        }
    }

    void enforce_cap() {
        while (support_vectors_.size() > params_.max_sv) {
            remove_support_vector(argmin_lowest(alpha_raw_));
            if (alpha_raw_.minCoeff() <= 0.0 && order() >= 2) {
                BackupSet dropped;
                shrink(dropped);
            }
        }
    }

    void maybe_refresh() {
        if (params_.refresh_every == 0) {
            return;
        }
        if (++updates_since_refresh_ < params_.refresh_every) {
            return;
        }
        updates_since_refresh_ = 0;
        inverse_ = invert_similarity(build_similarity(support_vectors_, bandwidth_));
        alpha_raw_ = row_sums(inverse_);
        refresh_caches();
    }

    std::vector<DataPoint> support_vectors_;
    KernelInverse inverse_;
    Eigen::VectorXd alpha_raw_;  // solution of A alpha = e (row sums of the inverse)
    Eigen::VectorXd alpha_;      // alpha_raw normalized to unit 1-norm
    double threshold_ = 1.0;     // objective value, 1 / ||alpha_raw||_1
    Bandwidth bandwidth_;
    HyperParams params_;
    std::size_t dim_;
    std::size_t updates_since_refresh_ = 0;
};

}  // namespace fisvdd
