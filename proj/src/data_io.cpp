#include "rcs/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace {

constexpr char kMagic[4] = {'R', 'C', 'S', 'D'};
constexpr std::uint32_t kVersion = 1;
const double kOutlierStd = std::sqrt(1000.0);

std::vector<Index> choose_distinct(Rng& rng, Index n, Index k) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index j = 0; j < k; ++j) {
        const Index r = j + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n - j)));
        std::swap(idx[j], idx[r]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

Matrix gaussian_matrix(Rng& rng, Index n, Index d) {
    Matrix A(n, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < n; ++i) A(i, j) = rng.normal();
    return A;
}

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(os, bits);
}

std::uint64_t get_u64(std::istream& is, const std::string& path) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError(path + ": truncated container");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw IoError(path + ": truncated container");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is, const std::string& path) {
    const std::uint64_t bits = get_u64(is, path);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

double parse_double(std::string_view tok, std::size_t line) {
    double v = 0.0;
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError("bad number '" + std::string(tok) + "'", line);
    }
    return v;
}

}  // namespace

Index outlier_count(double p_fail, Index n) {
    return static_cast<Index>(std::floor(p_fail * static_cast<double>(n) + 0.5));
}

MEstimatorData generate_mestimator_data(const MEstimatorGenConfig& cfg) {
    if (cfg.n < 1 || cfg.d < 1) throw ConfigError("n and d must be positive");
    if (cfg.s < 0 || cfg.s > cfg.d) throw ConfigError("sparsity s must lie in [0, d]");
    if (!(cfg.p_fail >= 0.0 && cfg.p_fail < 1.0)) throw ConfigError("p_fail must lie in [0, 1)");

    Rng rng(cfg.seed);
    MEstimatorData out;
    out.A = gaussian_matrix(rng, cfg.n, cfg.d);

    out.x_star = Vector::Zero(cfg.d);
    for (Index j : choose_distinct(rng, cfg.d, cfg.s)) out.x_star[j] = rng.normal();

    Vector delta = Vector::Zero(cfg.n);
    out.outliers = choose_distinct(rng, cfg.n, outlier_count(cfg.p_fail, cfg.n));
    for (Index i : out.outliers) delta[i] = kOutlierStd * rng.normal();
    std::sort(out.outliers.begin(), out.outliers.end());

    out.b = out.A * out.x_star + delta;
    return out;
}

Matrix hadamard(Index d) {
    if (d < 1 || (d & (d - 1)) != 0) throw ConfigError("Hadamard size must be a power of two");
    Matrix H = Matrix::Ones(1, 1);
    while (H.rows() < d) {
        const Index h = H.rows();
        Matrix next(2 * h, 2 * h);
        next << H, H, H, -H;
        H.swap(next);
    }
    return H / std::sqrt(static_cast<double>(d));
}

HadamardDesign HadamardDesign::make(Index d, Index m, std::uint64_t seed) {
    if (d < 1 || (d & (d - 1)) != 0) throw ConfigError("design dimension must be a power of two");
    if (m < 1) throw ConfigError("design needs m >= 1");
    HadamardDesign design;
    design.d = d;
    design.m = m;
    design.seed = seed;
    Rng rng(seed);
    for (Index j = 0; j < m; ++j) {
        Vector s(d);
        for (Index c = 0; c < d; ++c) s[c] = (rng.next() >> 63) ? -1.0 : 1.0;
        design.signs.push_back(std::move(s));
    }
    return design;
}

Matrix design_matrix(const HadamardDesign& design) {
    if (static_cast<Index>(design.signs.size()) != design.m) throw ConfigError("design has wrong sign count");
    const Matrix H = hadamard(design.d);
    Matrix A(design.n(), design.d);
    for (Index j = 0; j < design.m; ++j) {
        const Vector& s = design.signs[static_cast<std::size_t>(j)];
        if (s.size() != design.d) throw ConfigError("sign vector has wrong length");
        for (Index c = 0; c < s.size(); ++c) {
            if (s[c] != 1.0 && s[c] != -1.0) throw ConfigError("sign entries must be +-1");
        }
        A.middleRows(j * design.d, design.d) = H * s.asDiagonal();
    }
    return A;
}

PhaseRetrievalData generate_pr_data(const HadamardDesign& design, const Vector& x_star, double p_fail,
                                    std::uint64_t seed, bool clip_outliers) {
    if (x_star.size() != design.d) throw DimensionError("x* length does not match the design");
    if (!(p_fail >= 0.0 && p_fail < 1.0)) throw ConfigError("p_fail must lie in [0, 1)");
    PhaseRetrievalData out;
    out.A = design_matrix(design);
    out.b_sq = (out.A * x_star).cwiseAbs2();

    Rng rng(seed);
    out.outliers = choose_distinct(rng, design.n(), outlier_count(p_fail, design.n()));
    for (Index i : out.outliers) {
        const double v = kOutlierStd * rng.normal();
        out.b_sq[i] = clip_outliers ? std::max(v, 0.0) : v;
    }
    std::sort(out.outliers.begin(), out.outliers.end());
    return out;
}

SvmData generate_svm_data(const SvmGenConfig& cfg) {
    if (cfg.n < 1 || cfg.d < 1) throw ConfigError("n and d must be positive");
    Rng rng(cfg.seed);
    SvmData out;
    out.A = gaussian_matrix(rng, cfg.n, cfg.d);
    out.w_star.resize(cfg.d);
    for (Index j = 0; j < cfg.d; ++j) out.w_star[j] = rng.normal();
    const Vector score = out.A * out.w_star;
    out.labels = score.unaryExpr([](double t) { return t < 0.0 ? -1.0 : 1.0; });
    return out;
}

LabeledData read_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    struct Entry {
        Index row, col;
        double value;
    };
    std::vector<Entry> entries;
    std::vector<double> labels;
    Index d = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        const double label = parse_double(tok, lineno);
        const Index row = static_cast<Index>(labels.size());
        labels.push_back(label <= 0.0 ? -1.0 : 1.0);
        while (ss >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
                throw ParseError("expected index:value, got '" + tok + "'", lineno);
            }
            long long idx = 0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
            if (ec != std::errc() || ptr != tok.data() + colon || idx < 1) {
                throw ParseError("bad feature index in '" + tok + "'", lineno);
            }
            const double v = parse_double(std::string_view(tok).substr(colon + 1), lineno);
            entries.push_back({row, static_cast<Index>(idx - 1), v});
            d = std::max(d, static_cast<Index>(idx));
        }
    }
    if (labels.empty()) throw IoError(path + ": no data lines");
    if (d == 0) throw IoError(path + ": no features");

    LabeledData out;
    out.A = Matrix::Zero(static_cast<Index>(labels.size()), d);
    out.b = Eigen::Map<const Vector>(labels.data(), static_cast<Index>(labels.size()));
    for (const Entry& e : entries) out.A(e.row, e.col) = e.value;
    return out;
}

std::string sidecar_path(const std::string& path) { return path + ".json"; }

void write_dataset(const std::string& path, const Dataset& data, bool force) {
    const Index n = data.A.rows(), d = data.A.cols();
    if (data.b.size() != n) throw DimensionError("dataset vector b does not match A");
    if (data.x_star && data.x_star->size() != d) throw DimensionError("dataset x* does not match A");
    const std::string side = sidecar_path(path);
    if (!force && (std::filesystem::exists(path) || std::filesystem::exists(side))) {
        throw IoError(path + " exists (use --force to overwrite)");
    }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u64(os, static_cast<std::uint64_t>(n));
    put_u64(os, static_cast<std::uint64_t>(d));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) put_f64(os, data.A(i, j));
    for (Index i = 0; i < n; ++i) put_f64(os, data.b[i]);
    for (Index j = 0; j < d; ++j) put_f64(os, data.x_star ? (*data.x_star)[j] : 0.0);
    if (!os) throw IoError("write failed for " + path);

    nlohmann::json meta = {
        {"format", "RCSD"},  {"version", kVersion}, {"family", data.family},
        {"n", n},            {"d", d},              {"has_truth", data.x_star.has_value()},
        {"config", data.config},
    };
    std::ofstream js(side, std::ios::trunc);
    if (!js) throw IoError("cannot write " + side);
    js << meta.dump(2) << '\n';
}

Dataset read_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError(path + ": not an RCSD container");
    const std::uint32_t version = get_u32(is, path);
    if (version != kVersion) throw IoError(path + ": unsupported container version " + std::to_string(version));
    const std::uint64_t n = get_u64(is, path), d = get_u64(is, path);
    const std::uintmax_t expected = 24 + 8 * (n * d + n + d);
    if (n == 0 || d == 0 || std::filesystem::file_size(path) != expected) {
        throw IoError(path + ": size does not match header");
    }

    Dataset out;
    out.A.resize(static_cast<Index>(n), static_cast<Index>(d));
    for (Index i = 0; i < out.A.rows(); ++i)
        for (Index j = 0; j < out.A.cols(); ++j) out.A(i, j) = get_f64(is, path);
    out.b.resize(static_cast<Index>(n));
    for (Index i = 0; i < out.b.size(); ++i) out.b[i] = get_f64(is, path);
    Vector xs(static_cast<Index>(d));
    for (Index j = 0; j < xs.size(); ++j) xs[j] = get_f64(is, path);

    bool has_truth = true;
    if (std::ifstream js(sidecar_path(path)); js) {
        nlohmann::json meta;
        try {
            js >> meta;
        } catch (const nlohmann::json::exception& e) {
            throw IoError(sidecar_path(path) + ": " + e.what());
        }
        out.family = meta.value("family", "");
        has_truth = meta.value("has_truth", true);
        out.config = meta.value("config", nlohmann::json::object());
    }
    if (has_truth) out.x_star = std::move(xs);
    return out;
}

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> tokens;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::size_t> token_line;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            tokens.push_back(tok);
            token_line.push_back(lineno);
        }
    }
    if (tokens.size() < 4 || tokens[0] != "P2") throw ParseError("expected plain PGM header 'P2'", 1);
    auto as_int = [&](std::size_t k) {
        long long v = 0;
        const std::string& t = tokens[k];
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size() || v < 0) {
            throw ParseError("bad integer '" + t + "'", token_line[k]);
        }
        return static_cast<Index>(v);
    };
    GrayImage img;
    img.width = as_int(1);
    img.height = as_int(2);
    const Index maxval = as_int(3);
    if (img.width < 1 || img.height < 1 || maxval < 1) throw ParseError("bad PGM dimensions", token_line[3]);
    const Index count = img.width * img.height;
    if (static_cast<Index>(tokens.size()) != 4 + count) {
        throw ParseError("expected " + std::to_string(count) + " pixels", token_line.back());
    }
    img.pixels.resize(count);
    for (Index k = 0; k < count; ++k) {
        const Index v = as_int(static_cast<std::size_t>(4 + k));
        if (v > maxval) throw ParseError("pixel exceeds maxval", token_line[static_cast<std::size_t>(4 + k)]);
        img.pixels[k] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return img;
}

void write_pgm(const std::string& path, const Vector& pixels, Index width, Index height) {
    if (width < 1 || height < 1 || pixels.size() != width * height) {
        throw DimensionError("pixel count does not match width*height");
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot write " + path);
    const double lo = pixels.minCoeff(), hi = pixels.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    os << "P2\n" << width << ' ' << height << "\n255\n";
    for (Index r = 0; r < height; ++r) {
        for (Index c = 0; c < width; ++c) {
            const double v = (pixels[r * width + c] - lo) / span;
            os << static_cast<int>(std::lround(255.0 * v)) << (c + 1 == width ? '\n' : ' ');
        }
    }
}

}  // namespace rcs
