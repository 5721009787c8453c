#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "supmmd/kernel.hpp"

namespace supmmd {

double importance_score(const Vector& theta, const Vector& omega);

// scores rescaled so the set mean is exactly 1; theta = 0 gives exactly 1.0 everywhere
Vector normalized_importances(const Matrix& omega, const Vector& theta);

struct ModelArtifact {
    std::string mode = "generic";  // "generic" | "comparative"
    std::vector<std::string> schema;
    Vector theta;
    std::optional<Vector> theta_a;  // untied comparative only
    double beta = 0.0;
    double gamma = 1.0;
    std::optional<double> lambda;  // comparative only
    std::string channels;          // e.g. "ub", aligned with kernel_weights
    std::vector<double> kernel_weights;
    Vector std_mean, std_scale;
    std::string stopword_list_hash;
    std::string noun_lexicon_hash;
    std::map<std::string, std::string> train_config_echo;
};

void save_model(const ModelArtifact& model, const std::string& path);
ModelArtifact load_model(const std::string& path);  // rejects unknown major versions

}  // namespace supmmd
