#pragma once

#include <Eigen/Dense>

#include "supmmd/kernel.hpp"

namespace supmmd {

// weighted pair sum  sum_ij wr_i wc_j K_ij  in a canonical order, so that
// transposing K while swapping wr/wc reproduces the result bitwise
double quad_form(const Matrix& K, const Vector& wr, const Vector& wc);

// empirical squared MMD between the samples behind K_xx, K_yy, K_xy;
// tiny negative round-off clamps to 0, anything worse raises NumericError
double mmd2(const Matrix& K_xx, const Matrix& K_yy, const Matrix& K_xy);

Vector softmax(const Vector& z);

// kernels and feature rows for one topic: V rows against a candidate summary S
struct TopicLossContext {
    Matrix K_vv;     // |V| x |V|
    Matrix K_vs;     // |V| x |S|
    Matrix K_ss;     // |S| x |S|
    Matrix omega_v;  // |V| x d
    Matrix omega_s;  // |S| x d
};

// importance-weighted squared MMD with p over V rows and q over S rows
double weighted_loss(const TopicLossContext& ctx, const Vector& p, const Vector& q);

double topic_loss(const TopicLossContext& ctx, const Vector& theta);

struct LossGrad {
    double loss = 0.0;
    Vector grad;
};

LossGrad topic_loss_grad(const TopicLossContext& ctx, const Vector& theta);

struct ComparativeGrad {
    double loss = 0.0;   // main - lambda * contrast
    Vector grad_main;    // d/d theta of the main term
    Vector grad_contrast;  // d/d theta_a of the full expression (already carries -lambda)
};

ComparativeGrad comparative_loss_grad(const TopicLossContext& main, const TopicLossContext& contrast,
                                      const Vector& theta_main, const Vector& theta_contrast, double lambda);

}  // namespace supmmd
