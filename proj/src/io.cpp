#include "zgv/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace zgv {

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& value) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw IoError("error while writing " + path);
    }
}

} // namespace

RealMatrix read_matrix_market(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) {
        throw ParseError(path, 1, "empty file");
    }
    ++lineno;
    const auto head = tokens(line);
    if (head.size() != 5 || lower(head[0]) != "%%matrixmarket" || lower(head[1]) != "matrix") {
        throw ParseError(path, lineno, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
    }
    const std::string format = lower(head[2]);
    const std::string field = lower(head[3]);
    const std::string symmetry = lower(head[4]);
    if (format != "coordinate" && format != "array") {
        throw ParseError(path, lineno, "unknown format '" + format + "'");
    }
    if (field != "real" && field != "integer" && field != "double" && field != "complex") {
        throw ParseError(path, lineno, "unsupported field '" + field + "'");
    }
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
        throw ParseError(path, lineno, "unsupported symmetry '" + symmetry + "'");
    }
    const bool complex = field == "complex";
    const std::size_t per_entry = complex ? 2 : 1;

    // skip comments and blank lines up to the size line
    std::vector<std::string_view> size_tokens;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') {
            continue;
        }
        size_tokens = tokens(line);
        if (!size_tokens.empty()) {
            break;
        }
    }
    const std::size_t expect = format == "coordinate" ? 3 : 2;
    if (size_tokens.size() != expect) {
        throw ParseError(path, lineno, "malformed size line");
    }
    long rows = 0, cols = 0, nnz = 0;
    if (!parse_number(size_tokens[0], rows) || !parse_number(size_tokens[1], cols) || rows < 0 || cols < 0 ||
        (format == "coordinate" && (!parse_number(size_tokens[2], nnz) || nnz < 0))) {
        throw ParseError(path, lineno, "malformed size line");
    }
    if (symmetry != "general" && rows != cols) {
        throw ParseError(path, lineno, "symmetric storage requires a square matrix");
    }

    RealMatrix A = RealMatrix::Zero(rows, cols);
    const auto store = [&](long i, long j, double re, double im) {
        if (im != 0.0) {
            throw NonRealEntries(path + ":" + std::to_string(lineno) + ": entry (" + std::to_string(i + 1) +
                                 "," + std::to_string(j + 1) + ") has a nonzero imaginary part");
        }
        A(i, j) = re;
        if (i != j) {
            if (symmetry == "symmetric") {
                A(j, i) = re;
            } else if (symmetry == "skew-symmetric") {
                A(j, i) = -re;
            }
        }
    };

    long count = 0;
    long total = nnz;
    if (format == "array") {
        total = symmetry == "general" ? rows * cols
                : symmetry == "symmetric" ? rows * (rows + 1) / 2
                                          : rows * (rows - 1) / 2;
    }
    while (count < total && std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') {
            continue;
        }
        const auto t = tokens(line);
        if (t.empty()) {
            continue;
        }
        double re = 0.0, im = 0.0;
        long i = 0, j = 0;
        if (format == "coordinate") {
            if (t.size() != 2 + per_entry || !parse_number(t[0], i) || !parse_number(t[1], j)) {
                throw ParseError(path, lineno, "expected 'row col value'");
            }
            --i;
            --j;
            if (i < 0 || j < 0 || i >= rows || j >= cols) {
                throw ParseError(path, lineno, "index out of range");
            }
            if ((symmetry == "symmetric" && i < j) || (symmetry == "skew-symmetric" && i <= j)) {
                throw ParseError(path, lineno, "entry above the stored triangle");
            }
        } else {
            if (t.size() != per_entry) {
                throw ParseError(path, lineno, "expected one value per line");
            }
            // column-major, only the stored triangle for symmetric kinds
            long c = 0, r = count;
            if (symmetry == "general") {
                c = count / rows;
                r = count % rows;
            } else {
                const long skip = symmetry == "symmetric" ? 0 : 1;
                while (r >= rows - c - skip) {
                    r -= rows - c - skip;
                    ++c;
                }
                r += c + skip;
            }
            i = r;
            j = c;
        }
        if (!parse_number(t[t.size() - per_entry], re) || (complex && !parse_number(t.back(), im))) {
            throw ParseError(path, lineno, "malformed number");
        }
        if (!std::isfinite(re) || !std::isfinite(im)) {
            throw ParseError(path, lineno, "non-finite value");
        }
        store(i, j, re, im);
        ++count;
    }
    if (count < total) {
        throw ParseError(path, lineno, "expected " + std::to_string(total) + " entries, found " +
                                           std::to_string(count));
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '%' && !tokens(line).empty()) {
            throw ParseError(path, lineno, "unexpected data after the last entry");
        }
    }
    return A;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x); // shortest round trip
    return std::string(buf, res.ptr);
}

void write_matrix_market(const std::string& path, const RealMatrix& A) {
    std::ofstream out = open_output(path);
    out << "%%MatrixMarket matrix array real general\n" << A.rows() << ' ' << A.cols() << '\n';
    for (Index j = 0; j < A.cols(); ++j) {
        for (Index i = 0; i < A.rows(); ++i) {
            out << format_double(A(i, j)) << '\n';
        }
    }
    finish(out, path);
}

QuadraticPencil load_pencil(const std::string& l0, const std::string& l1, const std::string& l2,
                            const std::string& m) {
    const std::array<std::string, 4> paths{l0, l1, l2, m};
    std::array<RealMatrix, 4> A;
    for (std::size_t i = 0; i < 4; ++i) {
        A[i] = read_matrix_market(paths[i]);
        if (A[i].rows() != A[i].cols()) {
            throw DimensionMismatch(paths[i] + " is " + std::to_string(A[i].rows()) + "x" +
                                    std::to_string(A[i].cols()) + ", expected a square matrix");
        }
        if (i > 0 && A[i].rows() != A[0].rows()) {
            throw DimensionMismatch(paths[i] + " is " + std::to_string(A[i].rows()) + "x" +
                                    std::to_string(A[i].cols()) + " but " + paths[0] + " is " +
                                    std::to_string(A[0].rows()) + "x" + std::to_string(A[0].cols()));
        }
    }
    return QuadraticPencil(A[0], A[1], A[2], A[3]);
}

PlateMaterial read_material(const std::string& path) {
    std::ifstream in = open_input(path);
    std::map<std::string, double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::replace(line.begin(), line.end(), '=', ' ');
        const auto t = tokens(line);
        if (t.empty()) {
            continue;
        }
        double v = 0.0;
        if (t.size() != 2 || !parse_number(t[1], v) || !std::isfinite(v)) {
            throw ParseError(path, lineno, "expected 'key = value'");
        }
        std::string key(t[0]);
        const bool known = key == "rho" || key == "h" || key == "ct" || key == "cl" ||
                           (key.size() == 3 && key[0] == 'C' && key[1] >= '1' && key[1] <= '6' &&
                            key[2] >= '1' && key[2] <= '6');
        if (!known) {
            throw ParseError(path, lineno, "unknown key '" + key + "'");
        }
        if (key[0] == 'C' && key[1] > key[2]) {
            std::swap(key[1], key[2]);
        }
        if (!values.emplace(key, v).second) {
            throw ParseError(path, lineno, "duplicate key '" + key + "'");
        }
    }
    const auto get = [&](const std::string& key) {
        const auto it = values.find(key);
        if (it == values.end()) {
            throw InvalidMaterial(path + ": missing key '" + key + "'");
        }
        return it->second;
    };
    const double rho = get("rho");
    const double h = get("h");
    const bool isotropic = values.count("ct") || values.count("cl");
    bool voigt = false;
    for (const auto& [key, v] : values) {
        voigt = voigt || key[0] == 'C';
    }
    if (isotropic == voigt) {
        throw InvalidMaterial(path + ": give either ct and cl or the stiffness entries Cij");
    }
    PlateMaterial mat;
    if (isotropic) {
        mat = PlateMaterial::isotropic(rho, get("ct"), get("cl"), h);
    } else {
        mat.rho = rho;
        mat.h = h;
        mat.C = RealMatrix::Zero(6, 6);
        for (const auto& [key, v] : values) {
            if (key[0] == 'C') {
                const int i = key[1] - '1';
                const int j = key[2] - '1';
                mat.C(i, j) = v;
                mat.C(j, i) = v;
            }
        }
    }
    mat.validate();
    return mat;
}

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["arguments"] = m.arguments;
    j["inputs"] = m.inputs;
    j["config"] = m.config;
    j["timestamp"] = m.timestamp;
    j["version"] = m.version;
    j["seed"] = m.seed;
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit_results(const std::vector<ZgvPoint>& points, const std::optional<DispersionGrid>& grid,
                  const std::string& out_prefix, const RunManifest& manifest) {
    std::vector<const ZgvPoint*> order;
    for (const auto& p : points) {
        order.push_back(&p);
    }
    std::stable_sort(order.begin(), order.end(), [](const ZgvPoint* a, const ZgvPoint* b) {
        return a->k != b->k ? a->k < b->k : a->omega < b->omega;
    });

    const std::string zgv_path = out_prefix + "_zgv.csv";
    std::ofstream zgv = open_output(zgv_path);
    zgv << "k,omega,classification,residual,omega_gap\n";
    for (const ZgvPoint* p : order) {
        zgv << format_double(p->k) << ',' << format_double(p->omega) << ',' << to_string(p->classification)
            << ',' << format_double(p->residual) << ',' << format_double(p->omega_gap) << '\n';
    }
    finish(zgv, zgv_path);

    if (grid) {
        const std::string path = out_prefix + "_dispersion.csv";
        std::ofstream out = open_output(path);
        out << "k,branch,omega\n";
        for (std::size_t i = 0; i < grid->k_values.size(); ++i) {
            const auto& w = grid->omega_branches[i];
            for (std::size_t b = 0; b < w.size(); ++b) {
                out << format_double(grid->k_values[i]) << ',' << b << ',' << format_double(w[b]) << '\n';
            }
        }
        finish(out, path);
    }

    const std::string manifest_path = out_prefix + "_manifest.json";
    std::ofstream out = open_output(manifest_path);
    out << to_json(manifest).dump(2) << '\n';
    finish(out, manifest_path);
}

} // namespace zgv
