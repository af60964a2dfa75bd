#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fisvdd/errors.hpp"
#include "fisvdd/model.hpp"

namespace fisvdd {

inline constexpr int kModelFormatVersion = 1;

// Canonical number formatting: 17 significant digits round-trip a double
// exactly, and one fixed format keeps save/load/save byte-identical.
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

namespace io_detail {

inline double parse_real(const std::string& token, std::size_t line) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw ParseError("expected a real number, got '" + token + "'", line);
    }
    return value;
}

inline long parse_integer(const std::string& token, std::size_t line) {
    char* end = nullptr;
    const long value = std::strtol(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0') {
        throw ParseError("expected an integer, got '" + token + "'", line);
    }
    return value;
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream stream(line);
    std::string field;
    while (stream >> field) {
        fields.push_back(field);
    }
    return fields;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Returns the next line, skipping blank ones.
    std::string next(const char* what) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.find_first_not_of(" \t") != std::string::npos) {
                return line;
            }
        }
        throw ParseError(std::string("unexpected end of file, expected ") + what,
                         line_no_);
    }

    bool at_end() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                return false;
            }
        }
        return true;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

inline std::string expect_key(LineReader& reader, const std::string& key) {
    const std::string line = reader.next(key.c_str());
    if (line == key) {
        return std::string();  // bare section header
    }
    if (line.size() > key.size() && line.compare(0, key.size(), key) == 0 &&
        line[key.size()] == ' ') {
        return line.substr(key.size() + 1);
    }
    throw ParseError("expected key '" + key + "', got '" + line + "'",
                     reader.line_no());
}

}  // namespace io_detail

// Writes the model as a self-describing UTF-8 text document. The inverse is
// not persisted: it is rebuilt on load from the support vectors, which keeps
// the file at O(k d) and doubles as an integrity check.
inline void save_model(const SvddModel& model, std::ostream& out) {
    const HyperParams& p = model.params();
    out << "format_version " << kModelFormatVersion << "\n";
    out << "sigma " << format_real(p.sigma) << "\n";
    out << "eps_far " << format_real(p.eps_far) << "\n";
    out << "eps_near " << format_real(p.eps_near) << "\n";
    out << "max_sv " << p.max_sv << "\n";
    out << "dimension " << model.dimension() << "\n";
    out << "k " << model.sv_count() << "\n";
    out << "support_vectors\n";
    for (const DataPoint& sv : model.support_vectors()) {
        for (std::size_t i = 0; i < sv.size(); ++i) {
            if (i > 0) out << ' ';
            out << format_real(sv[i]);
        }
        out << "\n";
    }
    out << "alpha_raw\n";
    for (Eigen::Index i = 0; i < model.alpha_raw().size(); ++i) {
        if (i > 0) out << ' ';
        out << format_real(model.alpha_raw()[i]);
    }
    out << "\n";
    out << "threshold " << format_real(model.threshold()) << "\n";
}

inline void save_model(const SvddModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    save_model(model, out);
    out.flush();
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

// Reads a model back. The similarity matrix and its inverse are
// reconstructed from the stored support vectors; the stored multipliers
// must solve the reconstructed system, and the stored threshold must match
// the recomputed one.
inline SvddModel load_model(std::istream& in) {
    using namespace io_detail;
    LineReader reader(in);

    const std::string version_str = expect_key(reader, "format_version");
    const long version = parse_integer(version_str, reader.line_no());
    if (version != kModelFormatVersion) {
        throw VersionError("unsupported model format_version " +
                           std::to_string(version));
    }

    HyperParams params;
    params.sigma = parse_real(expect_key(reader, "sigma"), reader.line_no());
    params.eps_far = parse_real(expect_key(reader, "eps_far"), reader.line_no());
    params.eps_near = parse_real(expect_key(reader, "eps_near"), reader.line_no());
    const long max_sv = parse_integer(expect_key(reader, "max_sv"), reader.line_no());
    if (max_sv < 1) {
        throw ParseError("max_sv must be positive", reader.line_no());
    }
    params.max_sv = static_cast<std::size_t>(max_sv);
    const long dimension = parse_integer(expect_key(reader, "dimension"), reader.line_no());
    const long k = parse_integer(expect_key(reader, "k"), reader.line_no());
    if (dimension < 1 || k < 1) {
        throw ParseError("dimension and k must be positive", reader.line_no());
    }
    if (k > max_sv) {
        throw CorruptModelError("stored k exceeds max_sv");
    }

    expect_key(reader, "support_vectors");
    std::vector<DataPoint> svs;
    svs.reserve(static_cast<std::size_t>(k));
    for (long row = 0; row < k; ++row) {
        const std::string line = reader.next("support-vector row");
        const auto fields = split_fields(line);
        if (fields.size() != static_cast<std::size_t>(dimension)) {
            throw ParseError("support-vector row has " +
                                 std::to_string(fields.size()) +
                                 " fields, expected " + std::to_string(dimension),
                             reader.line_no());
        }
        DataPoint p;
        p.reserve(fields.size());
        for (const std::string& f : fields) {
            p.push_back(parse_real(f, reader.line_no()));
        }
        svs.push_back(std::move(p));
    }

    expect_key(reader, "alpha_raw");
    const auto alpha_fields = split_fields(reader.next("alpha_raw values"));
    if (alpha_fields.size() != static_cast<std::size_t>(k)) {
        throw ParseError("alpha_raw has " + std::to_string(alpha_fields.size()) +
                             " values, expected " + std::to_string(k),
                         reader.line_no());
    }
    Eigen::VectorXd alpha_raw(k);
    for (long i = 0; i < k; ++i) {
        alpha_raw[i] = parse_real(alpha_fields[static_cast<std::size_t>(i)],
                                  reader.line_no());
    }

    const double stored_threshold =
        parse_real(expect_key(reader, "threshold"), reader.line_no());
    if (!reader.at_end()) {
        throw ParseError("trailing content after threshold", reader.line_no());
    }

    SvddModel model = SvddModel::from_trained_state(std::move(svs),
                                                    std::move(alpha_raw), params);
    if (std::abs(model.threshold() - stored_threshold) > 1e-9) {
        throw CorruptModelError("stored threshold " +
                                format_real(stored_threshold) +
                                " disagrees with recomputed " +
                                format_real(model.threshold()));
    }
    return model;
}

inline SvddModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return load_model(in);
}

}  // namespace fisvdd
