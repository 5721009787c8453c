#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supmmd/mmd.hpp"

namespace supmmd {

struct TrainTopic {
    std::string id;
    TopicLossContext main;                     // candidate set against its oracle summary
    std::optional<TopicLossContext> contrast;  // earlier set against the same summary
};

struct TrainOptions {
    std::string mode = "generic";  // "generic" | "comparative"
    bool tied = true;
    double beta = 0.0;
    double lambda = 0.0;
    // "full_batch_quasi_newton" | "minibatch_adaptive"; empty picks the mode default
    std::string optimizer;
    double learning_rate = 0.0;  // 0 picks the optimizer default (0.005 / 0.002)
    int batch_topics = 8;
    int lr_halving_period = 20;
    int max_epochs = 100;
    int patience = 0;  // 0 picks the optimizer default (20 / 50)
    int folds = 5;
    unsigned seed = 0;
    int jobs = 1;
};

struct TrainOutput {
    Vector theta;
    std::optional<Vector> theta_a;
    int chosen_epochs = 0;
    std::vector<double> mean_curve;               // cross-validated loss per epoch
    std::vector<std::vector<double>> fold_curves;
    std::vector<double> train_curve;              // objective per epoch of the final run
    double final_objective = 0.0;
};

// regularized training objective over a topic subset; grad sized to the parameter vector
struct ObjectiveValue {
    double value = 0.0;
    Vector grad;
};

ObjectiveValue train_objective(const std::vector<TrainTopic>& topics, const std::vector<int>& subset,
                               const Vector& params, const TrainOptions& opt, bool with_grad,
                               int jobs = 1);

// unregularized mean topic loss, used for validation curves
double validation_loss(const std::vector<TrainTopic>& topics, const std::vector<int>& subset,
                       const Vector& params, const TrainOptions& opt, int jobs = 1);

TrainOutput train_model(const std::vector<TrainTopic>& topics, int dim, const TrainOptions& opt);

}  // namespace supmmd
