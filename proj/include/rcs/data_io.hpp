#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcs/types.hpp"

namespace rcs {

// Random draws are consumed in a fixed order so datasets are reproducible:
// matrices column by column, then support/outlier locations (partial
// Fisher-Yates), then the values placed at those locations.

struct MEstimatorGenConfig {
    Index n = 1;
    Index d = 1;
    Index s = 0;
    double p_fail = 0.0;
    std::uint64_t seed = 0;
};

struct MEstimatorData {
    Matrix A;
    Vector b;
    Vector x_star;
    std::vector<Index> outliers;
};

// floor(p_fail * n + 0.5)
Index outlier_count(double p_fail, Index n);

// Outlier values are Gaussian with variance 1000.
MEstimatorData generate_mestimator_data(const MEstimatorGenConfig& cfg);

// Sylvester construction scaled by 1/sqrt(d), so H*H = I.
Matrix hadamard(Index d);

struct HadamardDesign {
    Index d = 1;
    Index m = 1;
    std::vector<Vector> signs;  // S_1..S_m as +-1 vectors
    std::uint64_t seed = 0;

    Index n() const { return m * d; }
    static HadamardDesign make(Index d, Index m, std::uint64_t seed);
};

// Rows of block j are the rows of H diag(S_j).
Matrix design_matrix(const HadamardDesign& design);

struct PhaseRetrievalData {
    Matrix A;
    Vector b_sq;
    std::vector<Index> outliers;
};

// Outliers replace b_sq_i by a draw from N(0, 1000); negative draws are kept
// unless clip_outliers is set, in which case they are floored at 0.
PhaseRetrievalData generate_pr_data(const HadamardDesign& design, const Vector& x_star, double p_fail,
                                    std::uint64_t seed, bool clip_outliers = false);

struct SvmGenConfig {
    Index n = 1;
    Index d = 1;
    std::uint64_t seed = 0;
};

struct SvmData {
    Matrix A;
    Vector labels;
    Vector w_star;  // separating direction, labels = sign(A w*)
};

SvmData generate_svm_data(const SvmGenConfig& cfg);

struct LabeledData {
    Matrix A;
    Vector b;
};

// Sparse "label idx:val ..." text; labels <= 0 map to -1, others to +1.
LabeledData read_libsvm(const std::string& path);

struct Dataset {
    std::string family;  // "mestimator", "pr" or "svm"
    Matrix A;
    Vector b;
    std::optional<Vector> x_star;
    nlohmann::json config = nlohmann::json::object();
};

// Binary "RCSD" container plus "<path>.json" sidecar.
void write_dataset(const std::string& path, const Dataset& data, bool force = false);
Dataset read_dataset(const std::string& path);
std::string sidecar_path(const std::string& path);

struct GrayImage {
    Index width = 0;
    Index height = 0;
    Vector pixels;  // row-major, scaled to [0, 1]
};

GrayImage read_pgm(const std::string& path);
// Values are min-max scaled to 0..255 before writing.
void write_pgm(const std::string& path, const Vector& pixels, Index width, Index height);

}  // namespace rcs
