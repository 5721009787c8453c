#include "supmmd/importance.hpp"

#include <json.hpp>

#include <cmath>

#include "supmmd/errors.hpp"
#include "supmmd/util.hpp"

using nlohmann::json;

namespace supmmd {

double importance_score(const Vector& theta, const Vector& omega) {
    if (theta.size() != omega.size()) throw DimensionMismatchError("importance score");
    return std::exp(theta.dot(omega));
}

Vector normalized_importances(const Matrix& omega, const Vector& theta) {
    const long n = omega.rows();
    if (n == 0) throw EmptySetError("no rows to weight");
    Vector scores(n);
    for (long i = 0; i < n; ++i) scores(i) = importance_score(theta, omega.row(i));
    double total = scores.sum();
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericError("importance scores degenerate");
    double rescale = static_cast<double>(n) / total;
    return scores * rescale;
}

namespace {

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (long i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) throw SchemaError(std::string(what) + " must be an array");
    Vector v(arr.size());
    long i = 0;
    for (const auto& x : arr) {
        if (!x.is_number()) throw SchemaError(std::string(what) + " must hold numbers");
        v(i++) = x.get<double>();
    }
    return v;
}

}  // namespace

void save_model(const ModelArtifact& model, const std::string& path) {
    json j;
    j["version"] = "1.0";
    j["mode"] = model.mode;
    j["schema"] = model.schema;
    j["theta"] = vector_to_json(model.theta);
    j["theta_a"] = model.theta_a ? vector_to_json(*model.theta_a) : json(nullptr);
    j["beta"] = model.beta;
    j["gamma"] = model.gamma;
    j["lambda"] = model.lambda ? json(*model.lambda) : json(nullptr);
    json kw;
    kw["gamma"] = model.gamma;
    json chans = json::array();
    for (char c : model.channels) chans.push_back(std::string(1, c));
    kw["channels"] = std::move(chans);
    kw["weights"] = model.kernel_weights;
    j["kernel_weights"] = std::move(kw);
    json st;
    st["mean"] = vector_to_json(model.std_mean);
    st["scale"] = vector_to_json(model.std_scale);
    j["standardization"] = std::move(st);
    j["stopword_list_hash"] = model.stopword_list_hash;
    j["noun_lexicon_hash"] = model.noun_lexicon_hash;
    j["train_config_echo"] = model.train_config_echo;
    write_file(path, j.dump(2) + "\n");
}

ModelArtifact load_model(const std::string& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw SchemaError("model file is not valid JSON");
    if (!j.contains("version") || !j["version"].is_string()) throw SchemaError("model missing version");
    std::string v = j["version"].get<std::string>();
    if (v.substr(0, v.find('.')) != "1") throw SchemaError("unsupported model major version " + v);

    ModelArtifact m;
    m.mode = j.at("mode").get<std::string>();
    if (m.mode != "generic" && m.mode != "comparative") throw SchemaError("unknown mode " + m.mode);
    m.schema = j.at("schema").get<std::vector<std::string>>();
    m.theta = vector_from_json(j.at("theta"), "theta");
    if (j.contains("theta_a") && !j["theta_a"].is_null()) m.theta_a = vector_from_json(j["theta_a"], "theta_a");
    m.beta = j.at("beta").get<double>();
    m.gamma = j.at("gamma").get<double>();
    if (j.contains("lambda") && !j["lambda"].is_null()) m.lambda = j["lambda"].get<double>();
    const auto& kw = j.at("kernel_weights");
    for (const auto& c : kw.at("channels")) {
        auto s = c.get<std::string>();
        if (s.size() != 1) throw SchemaError("channel codes are single characters");
        m.channels += s;
    }
    m.kernel_weights = kw.at("weights").get<std::vector<double>>();
    m.std_mean = vector_from_json(j.at("standardization").at("mean"), "standardization.mean");
    m.std_scale = vector_from_json(j.at("standardization").at("scale"), "standardization.scale");
    m.stopword_list_hash = j.at("stopword_list_hash").get<std::string>();
    m.noun_lexicon_hash = j.at("noun_lexicon_hash").get<std::string>();
    if (j.contains("train_config_echo") && j["train_config_echo"].is_object())
        for (const auto& [k, val] : j["train_config_echo"].items())
            m.train_config_echo[k] = val.is_string() ? val.get<std::string>() : val.dump();

    if (static_cast<long>(m.schema.size()) != m.theta.size())
        throw SchemaError("theta length does not match schema");
    if (m.theta_a && m.theta_a->size() != m.theta.size())
        throw SchemaError("theta_a length does not match theta");
    if (m.std_mean.size() != m.theta.size() || m.std_scale.size() != m.theta.size())
        throw SchemaError("standardization length does not match schema");
    if (m.kernel_weights.size() != m.channels.size())
        throw SchemaError("kernel weights do not match channels");
    return m;
}

}  // namespace supmmd
