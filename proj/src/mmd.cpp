#include "supmmd/mmd.hpp"

#include <cmath>

#include "supmmd/errors.hpp"

namespace supmmd {

double quad_form(const Matrix& K, const Vector& wr, const Vector& wc) {
    const long n = K.rows(), m = K.cols();
    if (wr.size() != n || wc.size() != m) throw DimensionMismatchError("quad form weights");
    double acc = 0.0;
    if (n == m) {
        // mirrored pairs are added together, so transpose+swap commutes exactly
        for (long i = 0; i < n; ++i) {
            acc += wr(i) * wc(i) * K(i, i);
            for (long j = i + 1; j < n; ++j)
                acc += wr(i) * wc(j) * K(i, j) + wr(j) * wc(i) * K(j, i);
        }
    } else if (n > m) {
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < m; ++j) acc += wr(i) * wc(j) * K(i, j);
    } else {
        for (long j = 0; j < m; ++j)
            for (long i = 0; i < n; ++i) acc += wr(i) * wc(j) * K(i, j);
    }
    return acc;
}

namespace {

double finalize_sq(double v) {
    if (!std::isfinite(v)) throw NumericError("squared discrepancy is not finite");
    if (v < 0.0) {
        if (v > -1e-12) return 0.0;
        throw NumericError("squared discrepancy is negative beyond round-off");
    }
    return v;
}

double combine_terms(const Matrix& K_xx, const Matrix& K_yy, const Matrix& K_xy,
                     const Vector& p, const Vector& q) {
    double t_self = quad_form(K_xx, p, p) + quad_form(K_yy, q, q);
    double t_cross = 2.0 * quad_form(K_xy, p, q);
    return finalize_sq(t_self - t_cross);
}

}  // namespace

double mmd2(const Matrix& K_xx, const Matrix& K_yy, const Matrix& K_xy) {
    const long n = K_xx.rows(), m = K_yy.rows();
    if (K_xx.cols() != n || K_yy.cols() != m) throw DimensionMismatchError("self grams must be square");
    if (K_xy.rows() != n || K_xy.cols() != m) throw DimensionMismatchError("cross gram shape");
    if (n == 0 || m == 0) throw EmptySetError("squared discrepancy needs nonempty samples");
    Vector p = Vector::Constant(n, 1.0 / static_cast<double>(n));
    Vector q = Vector::Constant(m, 1.0 / static_cast<double>(m));
    return combine_terms(K_xx, K_yy, K_xy, p, q);
}

Vector softmax(const Vector& z) {
    if (z.size() == 0) throw EmptySetError("softmax of empty vector");
    double m = z.maxCoeff();
    Vector e = (z.array() - m).exp();
    double total = e.sum();
    return e / total;
}

double weighted_loss(const TopicLossContext& ctx, const Vector& p, const Vector& q) {
    return combine_terms(ctx.K_vv, ctx.K_ss, ctx.K_vs, p, q);
}

double topic_loss(const TopicLossContext& ctx, const Vector& theta) {
    Vector p = softmax(ctx.omega_v * theta);
    Vector q = softmax(ctx.omega_s * theta);
    return weighted_loss(ctx, p, q);
}

LossGrad topic_loss_grad(const TopicLossContext& ctx, const Vector& theta) {
    Vector p = softmax(ctx.omega_v * theta);
    Vector q = softmax(ctx.omega_s * theta);
    LossGrad out;
    out.loss = weighted_loss(ctx, p, q);
    Vector u = ctx.K_vv * p - ctx.K_vs * q;
    Vector z = ctx.K_ss * q - ctx.K_vs.transpose() * p;
    Vector cp = p.cwiseProduct(u);
    Vector cq = q.cwiseProduct(z);
    out.grad = 2.0 * (ctx.omega_v.transpose() * cp - cp.sum() * (ctx.omega_v.transpose() * p)) +
               2.0 * (ctx.omega_s.transpose() * cq - cq.sum() * (ctx.omega_s.transpose() * q));
    return out;
}

ComparativeGrad comparative_loss_grad(const TopicLossContext& main, const TopicLossContext& contrast,
                                      const Vector& theta_main, const Vector& theta_contrast, double lambda) {
    ComparativeGrad out;
    LossGrad gb = topic_loss_grad(main, theta_main);
    out.grad_main = gb.grad;
    if (lambda == 0.0) {
        // exact reduction to the single-set loss
        out.loss = gb.loss;
        out.grad_contrast = Vector::Zero(theta_contrast.size());
        return out;
    }
    LossGrad ga = topic_loss_grad(contrast, theta_contrast);
    out.loss = gb.loss - lambda * ga.loss;
    out.grad_contrast = -lambda * ga.grad;
    return out;
}

}  // namespace supmmd
