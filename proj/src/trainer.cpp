#include "supmmd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "supmmd/errors.hpp"
#include "supmmd/util.hpp"

namespace supmmd {

namespace {

constexpr const char* kQuasiNewton = "full_batch_quasi_newton";
constexpr const char* kAdaptive = "minibatch_adaptive";

struct Resolved {
    std::string optimizer;
    double lr;
    int patience;
    bool untied;
    int dim;  // per-vector dimension
};

Resolved resolve(const TrainOptions& opt, int dim) {
    Resolved r;
    if (opt.mode != "generic" && opt.mode != "comparative")
        throw UsageError("mode must be generic or comparative");
    r.optimizer = opt.optimizer.empty()
                      ? (opt.mode == "generic" ? kQuasiNewton : kAdaptive)
                      : opt.optimizer;
    if (r.optimizer != kQuasiNewton && r.optimizer != kAdaptive)
        throw UsageError("unknown optimizer " + r.optimizer);
    r.lr = opt.learning_rate > 0.0 ? opt.learning_rate
                                   : (r.optimizer == kQuasiNewton ? 0.005 : 0.002);
    r.patience = opt.patience > 0 ? opt.patience : (r.optimizer == kQuasiNewton ? 20 : 50);
    r.untied = opt.mode == "comparative" && !opt.tied;
    r.dim = dim;
    if (opt.mode == "comparative" && opt.lambda < 0.0)
        throw LambdaError("contrast strength must be >= 0");
    if (opt.beta < 0.0) throw UsageError("regularization strength must be >= 0");
    return r;
}

struct TopicEval {
    double loss = 0.0;
    Vector grad_main, grad_contrast;
};

TopicEval eval_topic(const TrainTopic& t, const Vector& theta_main, const Vector& theta_contrast,
                     const TrainOptions& opt, bool with_grad) {
    TopicEval out;
    if (opt.mode == "generic") {
        if (with_grad) {
            LossGrad g = topic_loss_grad(t.main, theta_main);
            out.loss = g.loss;
            out.grad_main = std::move(g.grad);
        } else {
            out.loss = topic_loss(t.main, theta_main);
        }
        return out;
    }
    if (!t.contrast) throw NoOracleError("comparative training needs both sets for topic " + t.id);
    if (with_grad) {
        ComparativeGrad g =
            comparative_loss_grad(t.main, *t.contrast, theta_main, theta_contrast, opt.lambda);
        out.loss = g.loss;
        out.grad_main = std::move(g.grad_main);
        out.grad_contrast = std::move(g.grad_contrast);
    } else {
        out.loss = topic_loss(t.main, theta_main);
        if (opt.lambda != 0.0) out.loss -= opt.lambda * topic_loss(*t.contrast, theta_contrast);
    }
    return out;
}

// mean loss over the subset plus optional gradient, in fixed subset order
struct CoreEval {
    double mean_loss = 0.0;
    Vector grad_main, grad_contrast;
};

CoreEval eval_subset(const std::vector<TrainTopic>& topics, const std::vector<int>& subset,
                     const Vector& theta_main, const Vector& theta_contrast,
                     const TrainOptions& opt, bool with_grad, int jobs) {
    if (subset.empty()) throw EmptyInputError("no topics to evaluate");
    std::vector<TopicEval> slots(subset.size());
    parallel_for(subset.size(), jobs, [&](std::size_t k) {
        slots[k] = eval_topic(topics[static_cast<std::size_t>(subset[k])], theta_main,
                              theta_contrast, opt, with_grad);
    });
    CoreEval out;
    const double inv = 1.0 / static_cast<double>(subset.size());
    out.grad_main = Vector::Zero(theta_main.size());
    out.grad_contrast = Vector::Zero(theta_contrast.size());
    for (const auto& s : slots) {
        out.mean_loss += s.loss;
        if (with_grad) {
            out.grad_main += s.grad_main;
            if (s.grad_contrast.size() > 0) out.grad_contrast += s.grad_contrast;
        }
    }
    out.mean_loss *= inv;
    if (with_grad) {
        out.grad_main *= inv;
        out.grad_contrast *= inv;
    }
    return out;
}

void check_finite(double value, const Vector& grad, const TrainOptions& opt) {
    if (!std::isfinite(value)) throw DivergenceError("objective is not finite");
    if (grad.size() > 0 && !grad.allFinite()) throw DivergenceError("gradient is not finite");
    if (opt.mode == "comparative" && value < -1e3)
        throw DivergenceError(
            "comparative objective fell below -1000; try a contrast strength in [0.25, 0.625]");
}

}  // namespace

ObjectiveValue train_objective(const std::vector<TrainTopic>& topics, const std::vector<int>& subset,
                               const Vector& params, const TrainOptions& opt, bool with_grad,
                               int jobs) {
    const bool untied = opt.mode == "comparative" && !opt.tied;
    const long dim = untied ? params.size() / 2 : params.size();
    Vector theta_main = untied ? Vector(params.head(dim)) : params;
    Vector theta_contrast = untied ? Vector(params.tail(dim)) : params;

    CoreEval core = eval_subset(topics, subset, theta_main, theta_contrast, opt, with_grad, jobs);

    ObjectiveValue out;
    out.value = core.mean_loss;
    if (opt.mode == "generic" || opt.tied) {
        // tied mode regularizes the shared vector once, so lambda=0 matches generic exactly
        out.value += opt.beta * theta_main.squaredNorm();
    } else {
        out.value += opt.beta * (theta_main.squaredNorm() + theta_contrast.squaredNorm());
    }
    if (with_grad) {
        if (opt.mode == "generic") {
            out.grad = core.grad_main + 2.0 * opt.beta * theta_main;
        } else if (opt.tied) {
            out.grad = core.grad_main + core.grad_contrast + 2.0 * opt.beta * theta_main;
        } else {
            out.grad = Vector(2 * dim);
            out.grad.head(dim) = core.grad_main + 2.0 * opt.beta * theta_main;
            out.grad.tail(dim) = core.grad_contrast + 2.0 * opt.beta * theta_contrast;
        }
    }
    check_finite(out.value, out.grad, opt);
    return out;
}

double validation_loss(const std::vector<TrainTopic>& topics, const std::vector<int>& subset,
                       const Vector& params, const TrainOptions& opt, int jobs) {
    const bool untied = opt.mode == "comparative" && !opt.tied;
    const long dim = untied ? params.size() / 2 : params.size();
    Vector theta_main = untied ? Vector(params.head(dim)) : params;
    Vector theta_contrast = untied ? Vector(params.tail(dim)) : params;
    CoreEval core = eval_subset(topics, subset, theta_main, theta_contrast, opt, false, jobs);
    if (!std::isfinite(core.mean_loss)) throw DivergenceError("validation loss is not finite");
    return core.mean_loss;
}

namespace {

struct RunResult {
    Vector params;
    std::vector<double> val_curve;    // empty when no validation subset
    std::vector<double> train_curve;  // objective after each epoch
    int epochs_run = 0;
};

Vector lbfgs_direction(const Vector& g, const std::deque<std::pair<Vector, Vector>>& pairs) {
    Vector q = g;
    std::vector<double> alpha(pairs.size());
    std::vector<double> rho(pairs.size());
    for (long i = static_cast<long>(pairs.size()) - 1; i >= 0; --i) {
        const auto& [s, y] = pairs[static_cast<std::size_t>(i)];
        rho[static_cast<std::size_t>(i)] = 1.0 / y.dot(s);
        alpha[static_cast<std::size_t>(i)] = rho[static_cast<std::size_t>(i)] * s.dot(q);
        q -= alpha[static_cast<std::size_t>(i)] * y;
    }
    if (!pairs.empty()) {
        const auto& [s, y] = pairs.back();
        q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [s, y] = pairs[i];
        double beta = rho[i] * y.dot(q);
        q += (alpha[i] - beta) * s;
    }
    return -q;
}

RunResult run_epochs(const std::vector<TrainTopic>& topics, const std::vector<int>& train_idx,
                     const std::vector<int>& val_idx, long param_dim, const TrainOptions& opt,
                     const Resolved& rv, int epoch_limit, bool use_patience, unsigned seed) {
    RunResult res;
    Vector x = Vector::Zero(param_dim);
    std::mt19937 rng(seed);

    double best_val = 0.0;
    int stale = 0;

    if (rv.optimizer == kQuasiNewton) {
        std::deque<std::pair<Vector, Vector>> pairs;
        ObjectiveValue cur = train_objective(topics, train_idx, x, opt, true, opt.jobs);
        for (int epoch = 1; epoch <= epoch_limit; ++epoch) {
            Vector dir = lbfgs_direction(cur.grad, pairs);
            if (dir.dot(cur.grad) >= 0.0) dir = -cur.grad;  // keep a descent direction
            double t = rv.lr;
            bool accepted = false;
            for (int h = 0; h < 30; ++h) {
                Vector cand = x + t * dir;
                ObjectiveValue nxt = train_objective(topics, train_idx, cand, opt, true, opt.jobs);
                if (nxt.value <= cur.value) {
                    Vector s = cand - x;
                    Vector y = nxt.grad - cur.grad;
                    if (s.dot(y) > 1e-12) {
                        pairs.emplace_back(std::move(s), std::move(y));
                        if (pairs.size() > 10) pairs.pop_front();
                    }
                    x = std::move(cand);
                    cur = std::move(nxt);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            (void)accepted;
            res.train_curve.push_back(cur.value);
            res.epochs_run = epoch;
            if (!val_idx.empty()) {
                double v = validation_loss(topics, val_idx, x, opt, opt.jobs);
                res.val_curve.push_back(v);
                if (res.val_curve.size() == 1 || v < best_val) {
                    best_val = v;
                    stale = 0;
                } else if (++stale >= rv.patience && use_patience) {
                    break;
                }
            }
        }
    } else {
        Vector m = Vector::Zero(param_dim);
        Vector v = Vector::Zero(param_dim);
        const double b1 = 0.9, b2 = 0.999, eps = 1e-3;
        for (int epoch = 1; epoch <= epoch_limit; ++epoch) {
            std::vector<int> order = train_idx;
            shuffle_det(order, rng);
            double lr_e = rv.lr * std::pow(0.5, (epoch - 1) / opt.lr_halving_period);
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(opt.batch_topics)) {
                std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(opt.batch_topics));
                std::vector<int> batch(order.begin() + static_cast<long>(start),
                                       order.begin() + static_cast<long>(stop));
                ObjectiveValue g = train_objective(topics, batch, x, opt, true, opt.jobs);
                Vector g2 = g.grad.cwiseProduct(g.grad);
                for (long i = 0; i < param_dim; ++i) {
                    double diff = v(i) - g2(i);
                    double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
                    v(i) -= (1.0 - b2) * sign * g2(i);
                }
                m = b1 * m + (1.0 - b1) * g.grad;
                x -= lr_e * m.cwiseQuotient((v.cwiseSqrt().array() + eps).matrix());
            }
            res.train_curve.push_back(train_objective(topics, train_idx, x, opt, false, opt.jobs).value);
            res.epochs_run = epoch;
            if (!val_idx.empty()) {
                double val = validation_loss(topics, val_idx, x, opt, opt.jobs);
                res.val_curve.push_back(val);
                if (res.val_curve.size() == 1 || val < best_val) {
                    best_val = val;
                    stale = 0;
                } else if (++stale >= rv.patience && use_patience) {
                    break;
                }
            }
        }
    }
    res.params = std::move(x);
    return res;
}

}  // namespace

TrainOutput train_model(const std::vector<TrainTopic>& topics, int dim, const TrainOptions& opt) {
    if (topics.empty()) throw EmptyInputError("no training topics");
    if (dim < 1) throw UsageError("feature dimension must be >= 1");
    Resolved rv = resolve(opt, dim);
    const long param_dim = rv.untied ? 2L * dim : dim;
    const int n = static_cast<int>(topics.size());
    if (opt.max_epochs < 1) throw UsageError("max_epochs must be >= 1");

    TrainOutput out;
    int chosen = opt.max_epochs;

    if (opt.folds >= 2) {
        if (opt.folds > n) throw FoldError("more folds than topics");
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::mt19937 split_rng(opt.seed);
        shuffle_det(order, split_rng);

        for (int f = 0; f < opt.folds; ++f) {
            std::size_t lo = static_cast<std::size_t>(f) * order.size() / static_cast<std::size_t>(opt.folds);
            std::size_t hi = static_cast<std::size_t>(f + 1) * order.size() / static_cast<std::size_t>(opt.folds);
            std::vector<int> val(order.begin() + static_cast<long>(lo), order.begin() + static_cast<long>(hi));
            std::vector<int> train;
            train.insert(train.end(), order.begin(), order.begin() + static_cast<long>(lo));
            train.insert(train.end(), order.begin() + static_cast<long>(hi), order.end());
            if (train.empty() || val.empty()) throw FoldError("fold split left an empty side");
            RunResult rr = run_epochs(topics, train, val, param_dim, opt, rv, opt.max_epochs, true,
                                      opt.seed + 1000003u * static_cast<unsigned>(f + 1));
            // stopped folds carry their last observed loss forward
            auto curve = rr.val_curve;
            while (static_cast<int>(curve.size()) < opt.max_epochs) curve.push_back(curve.back());
            out.fold_curves.push_back(std::move(curve));
        }
        out.mean_curve.assign(static_cast<std::size_t>(opt.max_epochs), 0.0);
        for (const auto& c : out.fold_curves)
            for (std::size_t e = 0; e < c.size(); ++e) out.mean_curve[e] += c[e];
        for (auto& v : out.mean_curve) v /= static_cast<double>(opt.folds);
        chosen = 1;
        for (int e = 1; e < opt.max_epochs; ++e)
            if (out.mean_curve[static_cast<std::size_t>(e)] <
                out.mean_curve[static_cast<std::size_t>(chosen - 1)])
                chosen = e + 1;
    }

    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    RunResult fin = run_epochs(topics, all, {}, param_dim, opt, rv, chosen, false, opt.seed);
    out.chosen_epochs = chosen;
    out.train_curve = std::move(fin.train_curve);
    out.final_objective = train_objective(topics, all, fin.params, opt, false, opt.jobs).value;
    if (rv.untied) {
        out.theta = fin.params.head(dim);
        out.theta_a = Vector(fin.params.tail(dim));
    } else {
        out.theta = std::move(fin.params);
    }
    return out;
}

}  // namespace supmmd
