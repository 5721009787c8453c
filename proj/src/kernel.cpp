#include "supmmd/kernel.hpp"

#include <cmath>

#include "supmmd/errors.hpp"
#include "supmmd/util.hpp"

namespace supmmd {

KernelSpec make_kernel_spec(double gamma, const std::string& channel_codes, const std::vector<double>& weights) {
    KernelSpec spec;
    spec.gamma = gamma;
    for (char c : channel_codes) spec.channels.push_back(parse_channel(c));
    spec.weights = weights;
    validate_kernel_spec(spec);
    return spec;
}

void validate_kernel_spec(const KernelSpec& spec) {
    if (!(spec.gamma > 0.0)) throw SpecError("gamma must be positive");
    if (spec.channels.empty()) throw SpecError("at least one channel required");
    if (spec.channels.size() != spec.weights.size()) throw SpecError("channel and weight counts differ");
    double sum = 0.0;
    for (double w : spec.weights) {
        if (!(w >= 0.0)) throw SpecError("weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw SpecError("weights must sum to 1");
}

Matrix cosine_gram(const std::vector<SparseVec>& rows, const std::vector<SparseVec>& cols, bool unit_diag) {
    const long n = static_cast<long>(rows.size());
    const long m = static_cast<long>(cols.size());
    Matrix K(n, m);
    std::vector<double> row_norms(n), col_norms(m);
    for (long i = 0; i < n; ++i) row_norms[i] = sparse_norm(rows[i]);
    for (long j = 0; j < m; ++j) col_norms[j] = sparse_norm(cols[j]);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < m; ++j) {
            if (unit_diag && i == j) {
                K(i, j) = 1.0;
                continue;
            }
            double d = row_norms[i] * col_norms[j];
            K(i, j) = d == 0.0 ? 0.0 : sparse_dot(rows[i], cols[j]) / d;
        }
    }
    return K;
}

Matrix combined_kernel(const std::vector<Matrix>& channel_cosines, const KernelSpec& spec) {
    validate_kernel_spec(spec);
    if (channel_cosines.size() != spec.weights.size())
        throw SpecError("cosine stack does not match kernel spec");
    if (channel_cosines.empty()) throw SpecError("no channel matrices");
    const long n = channel_cosines[0].rows();
    const long m = channel_cosines[0].cols();
    Matrix mix = Matrix::Zero(n, m);
    for (std::size_t c = 0; c < channel_cosines.size(); ++c) {
        if (channel_cosines[c].rows() != n || channel_cosines[c].cols() != m)
            throw DimensionMismatchError("channel cosine shapes differ");
        mix += spec.weights[c] * channel_cosines[c];
    }
    Matrix K(n, m);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < m; ++j) K(i, j) = std::exp(spec.gamma * (mix(i, j) - 1.0));
    return K;
}

Matrix center_gram(const Matrix& K) {
    const long n = K.rows();
    if (n != K.cols()) throw DimensionMismatchError("centering needs a square gram");
    Vector row_mu = K.rowwise().mean();
    Vector col_mu = K.colwise().mean();
    double mu = K.mean();
    Matrix C(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) C(i, j) = K(i, j) - row_mu(i) - col_mu(j) + mu;
    return C;
}

double frobenius_inner(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionMismatchError("frobenius inner product");
    double acc = 0.0;
    for (long i = 0; i < A.rows(); ++i)
        for (long j = 0; j < A.cols(); ++j) acc += A(i, j) * B(i, j);
    return acc;
}

MklResult mkl_weights(const Matrix& M, const Vector& a) {
    const long r = M.rows();
    if (M.cols() != r || a.size() != r) throw DimensionMismatchError("alignment system shapes");
    MklResult res;
    res.raw.assign(static_cast<std::size_t>(r), 0.0);

    auto fallback = [&](const char* why) {
        warn(std::string("kernel weight fit fell back to uniform: ") + why);
        res.weights.assign(static_cast<std::size_t>(r), 1.0 / static_cast<double>(r));
        res.fallback_uniform = true;
        return res;
    };

    if (!M.allFinite() || !a.allFinite()) return fallback("non-finite alignment statistics");

    Matrix Ms = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Ms);
    double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale)) return fallback("degenerate alignment matrix");

    Matrix Mt = Ms / scale;
    Vector at = a / scale;
    Vector w = Vector::Constant(r, 1.0 / static_cast<double>(r));
    const double step = 0.5;
    const double tol = 1e-8;
    const int max_iter = 100000;
    int it = 0;
    for (; it < max_iter; ++it) {
        Vector g = 2.0 * (Mt * w) - 2.0 * at;
        double resid = 0.0;
        for (long i = 0; i < r; ++i) {
            double ri = w(i) > 0.0 ? std::abs(g(i)) : std::max(0.0, -g(i));
            resid = std::max(resid, ri);
        }
        if (resid < tol) break;
        w = (w - step * g).cwiseMax(0.0);
        if (!w.allFinite() || w.maxCoeff() > 1e12) return fallback("iteration escaped");
    }
    res.iterations = it;
    if (it >= max_iter) return fallback("projected gradient did not settle");

    double total = w.sum();
    for (long i = 0; i < r; ++i) res.raw[static_cast<std::size_t>(i)] = w(i);
    res.objective = w.dot(Ms * w) - 2.0 * w.dot(a);
    if (!(total > 0.0)) return fallback("all-zero minimizer");
    res.weights.resize(static_cast<std::size_t>(r));
    for (long i = 0; i < r; ++i) res.weights[static_cast<std::size_t>(i)] = w(i) / total;
    return res;
}

}  // namespace supmmd
