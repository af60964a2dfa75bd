#pragma once

#include <array>
#include <chrono>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "fisvdd/csv.hpp"
#include "fisvdd/errors.hpp"
#include "fisvdd/model.hpp"
#include "fisvdd/model_io.hpp"

// Command implementations behind the fisvdd binary. They are plain
// functions over streams so tests can drive them in-process; argument
// parsing lives in the executable.
//
// Exit codes: 0 success, 2 usage or input error, 3 internal invariant
// violation. Reports go to `out` as key=value lines, diagnostics to `err`.
namespace fisvdd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

struct TrainOptions {
    std::string input_path;
    std::string model_path;
    double sigma = 1.0;
    std::size_t burn_in = 10;
    std::size_t max_sv = 1024;
    double eps_far = 1e-6;
    double eps_near = 1e-9;
    std::size_t refresh_every = 0;
};

struct ScoreOptions {
    std::string model_path;
    std::string input_path;
    std::string output_path;  // empty -> write rows to `out`
    bool labeled = false;     // drop a trailing label column before scoring
};

struct EvalOptions {
    std::string model_path;
    std::string input_path;
};

struct InspectOptions {
    std::string model_path;
};

namespace cli_detail {

inline int report_error(const std::exception& e, std::ostream& err, int code) {
    err << "error: " << e.what() << "\n";
    return code;
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const InvariantError& e) {
        return report_error(e, err, kExitInternal);
    } catch (const InputError& e) {
        return report_error(e, err, kExitUsage);
    } catch (const ParseError& e) {
        return report_error(e, err, kExitUsage);
    } catch (const VersionError& e) {
        return report_error(e, err, kExitUsage);
    } catch (const CorruptModelError& e) {
        return report_error(e, err, kExitUsage);
    } catch (const IoError& e) {
        return report_error(e, err, kExitUsage);
    } catch (const std::exception& e) {
        return report_error(e, err, kExitInternal);
    }
}

}  // namespace cli_detail

// Streams a CSV through the learner: the first `burn_in` usable rows build
// the initial model, the rest go through the per-point update. Prints the
// final objective, support-vector count, per-action counts, and wall time.
inline int cmd_train(const TrainOptions& opt, std::ostream& out,
                     std::ostream& err) {
    return cli_detail::guarded(err, [&]() {
        const CsvData data = read_csv_file(opt.input_path, /*labeled=*/false);
        if (data.rows.empty()) {
            throw InputError("'" + opt.input_path + "' contains no data rows");
        }
        if (opt.burn_in < 1) {
            throw InputError("burn-in must be at least 1");
        }
        HyperParams params;
        params.sigma = opt.sigma;
        params.max_sv = opt.max_sv;
        params.eps_far = opt.eps_far;
        params.eps_near = opt.eps_near;
        params.refresh_every = opt.refresh_every;
        params.validate();

        const std::size_t burn = std::min(opt.burn_in, data.rows.size());
        const auto start = std::chrono::steady_clock::now();
        std::vector<DataPoint> burn_rows(data.rows.begin(),
                                         data.rows.begin() + burn);
        SvddModel model = SvddModel::initialize(burn_rows, params);

        std::array<std::size_t, 7> counts{};
        for (std::size_t i = burn; i < data.rows.size(); ++i) {
            const UpdateOutcome o = model.process(data.rows[i]);
            counts[static_cast<std::size_t>(o.action)]++;
        }
        const auto stop = std::chrono::steady_clock::now();
        const double seconds =
            std::chrono::duration<double>(stop - start).count();

        if (!opt.model_path.empty()) {
            save_model(model, opt.model_path);
        }

        out << "objective=" << format_real(model.objective_value()) << "\n";
        out << "sv_count=" << model.sv_count() << "\n";
        for (std::size_t a = 0; a < counts.size(); ++a) {
            out << to_string(static_cast<Action>(a)) << "=" << counts[a] << "\n";
        }
        out << "train_seconds=" << format_real(seconds) << "\n";
        return kExitOk;
    });
}

// Scores every row against a saved model without mutating it. Output is one
// CSV row per input row: the q value and the label.
inline int cmd_score(const ScoreOptions& opt, std::ostream& out,
                     std::ostream& err) {
    return cli_detail::guarded(err, [&]() {
        const SvddModel model = load_model(opt.model_path);
        const CsvData data = read_csv_file(opt.input_path, opt.labeled);
        if (!data.rows.empty() && data.dimension != model.dimension()) {
            throw InputError("dimension mismatch: model expects " +
                             std::to_string(model.dimension()) +
                             " features, input has " +
                             std::to_string(data.dimension));
        }

        std::ofstream file;
        if (!opt.output_path.empty()) {
            file.open(opt.output_path);
            if (!file) {
                throw IoError("cannot open '" + opt.output_path +
                              "' for writing");
            }
        }
        std::ostream& rows_out = opt.output_path.empty() ? out : file;
        rows_out << "q,label\n";
        for (const DataPoint& row : data.rows) {
            const ScoreOutcome s = model.score(row);
            rows_out << format_real(s.q) << ',' << to_string(s.label) << "\n";
        }
        rows_out.flush();
        if (!rows_out) {
            throw IoError("failed while writing scores");
        }
        return kExitOk;
    });
}

// Confusion-matrix evaluation over a labeled CSV (last column 0/1, 1 =
// outlier). Rows scoring outside or far_outlier count as predicted
// outliers; inside and near_duplicate count as predicted normal.
inline int cmd_eval(const EvalOptions& opt, std::ostream& out,
                    std::ostream& err) {
    return cli_detail::guarded(err, [&]() {
        const SvddModel model = load_model(opt.model_path);
        const CsvData data = read_csv_file(opt.input_path, /*labeled=*/true);
        if (data.rows.empty()) {
            throw InputError("'" + opt.input_path + "' contains no data rows");
        }
        if (data.dimension != model.dimension()) {
            throw InputError("dimension mismatch: model expects " +
                             std::to_string(model.dimension()) +
                             " features, input has " +
                             std::to_string(data.dimension));
        }

        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            const ScoreOutcome s = model.score(data.rows[i]);
            const bool predicted_outlier =
                s.label == Label::outside || s.label == Label::far_outlier;
            const bool is_outlier = data.labels[i] == 1;
            if (predicted_outlier && is_outlier) ++tp;
            else if (predicted_outlier && !is_outlier) ++fp;
            else if (!predicted_outlier && is_outlier) ++fn;
            else ++tn;
        }

        const double precision =
            (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double recall =
            (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        const double f1 = (precision + recall) > 0.0
                              ? 2.0 * precision * recall / (precision + recall)
                              : 0.0;

        out << "true_pos=" << tp << "\n";
        out << "false_pos=" << fp << "\n";
        out << "true_neg=" << tn << "\n";
        out << "false_neg=" << fn << "\n";
        out << "precision=" << format_real(precision) << "\n";
        out << "recall=" << format_real(recall) << "\n";
        out << "f1=" << format_real(f1) << "\n";
        out << "objective=" << format_real(model.objective_value()) << "\n";
        out << "sv_count=" << model.sv_count() << "\n";
        // Training time is not persisted in the model file.
        out << "train_seconds=0\n";
        return kExitOk;
    });
}

inline int cmd_inspect(const InspectOptions& opt, std::ostream& out,
                       std::ostream& err) {
    return cli_detail::guarded(err, [&]() {
        const SvddModel model = load_model(opt.model_path);
        const HyperParams& p = model.params();
        out << "format_version=" << kModelFormatVersion << "\n";
        out << "sigma=" << format_real(p.sigma) << "\n";
        out << "eps_far=" << format_real(p.eps_far) << "\n";
        out << "eps_near=" << format_real(p.eps_near) << "\n";
        out << "max_sv=" << p.max_sv << "\n";
        out << "dimension=" << model.dimension() << "\n";
        out << "sv_count=" << model.sv_count() << "\n";
        out << "threshold=" << format_real(model.threshold()) << "\n";
        out << "objective=" << format_real(model.objective_value()) << "\n";
        return kExitOk;
    });
}

}  // namespace fisvdd::cli
