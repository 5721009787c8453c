#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "supmmd/textfeat.hpp"

namespace supmmd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct KernelSpec {
    double gamma = 1.0;
    std::vector<Channel> channels;
    std::vector<double> weights;  // nonnegative, sums to 1
};

KernelSpec make_kernel_spec(double gamma, const std::string& channel_codes, const std::vector<double>& weights);
void validate_kernel_spec(const KernelSpec& spec);

// pairwise cosine of tf-isf vectors; unit_diag forces 1 on the diagonal (self pairs)
Matrix cosine_gram(const std::vector<SparseVec>& rows, const std::vector<SparseVec>& cols, bool unit_diag);

// exp(gamma * (sum_i w_i * cos_i - 1)); diagonal of a unit-diag combination is exactly 1
Matrix combined_kernel(const std::vector<Matrix>& channel_cosines, const KernelSpec& spec);

// K - row means - col means + grand mean
Matrix center_gram(const Matrix& K);

double frobenius_inner(const Matrix& A, const Matrix& B);

struct MklResult {
    std::vector<double> weights;  // normalized, sums to 1
    std::vector<double> raw;      // nonnegative minimizer before normalization
    double objective = 0.0;       // raw' M raw - 2 raw' a
    bool fallback_uniform = false;
    int iterations = 0;
};

// min_{w >= 0}  w'Mw - 2w'a  by projected gradient, then normalize to the simplex
MklResult mkl_weights(const Matrix& M, const Vector& a);

}  // namespace supmmd
