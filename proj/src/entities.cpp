#include "supmmd/entities.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "supmmd/errors.hpp"
#include "supmmd/util.hpp"

namespace supmmd {

namespace {

struct Endpoint {
    std::string host;  // scheme://host:port
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw UsageError("endpoint must start with http://");
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

std::vector<std::string> parse_resources(const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("annotation response is not JSON: ") + e.what());
    }
    std::vector<std::string> uris;
    if (!doc.contains("Resources")) return uris;
    const auto& res = doc["Resources"];
    if (!res.is_array()) throw ProtocolError("Resources is not an array");
    for (const auto& r : res) {
        if (!r.is_object() || !r.contains("@URI") || !r["@URI"].is_string())
            throw ProtocolError("resource entry lacks @URI");
        uris.push_back(r["@URI"].get<std::string>());
    }
    return uris;
}

std::vector<std::string> annotate_one(httplib::Client& client, const Endpoint& ep,
                                      const AnnotateConfig& cfg, const std::string& text) {
    httplib::Params params{{"text", text}, {"confidence", std::to_string(cfg.confidence)}};
    int delay_ms = 250;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
            delay_ms = std::min(delay_ms * 2, 4000);
        }
        auto res = client.Post(ep.path, httplib::Headers{{"Accept", "application/json"}}, params);
        if (!res) continue;                      // transport failure, retry
        if (res->status >= 500) continue;        // server hiccup, retry
        if (res->status != 200)
            throw ProtocolError("annotation service returned status " + std::to_string(res->status));
        return parse_resources(res->body);
    }
    throw NetworkError("annotation service unreachable after " +
                       std::to_string(cfg.max_retries + 1) + " attempts: " + ep.host);
}

}  // namespace

std::vector<EntityAnnotation> fetch_entities(const AnnotateConfig& cfg,
                                             const std::vector<PreprocessedTopic>& topics) {
    Endpoint ep = split_endpoint(cfg.endpoint);
    httplib::Client client(ep.host);
    client.set_connection_timeout(0, cfg.timeout_ms * 1000);
    client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);

    std::vector<EntityAnnotation> out;
    auto handle = [&](const std::string& topic_id, const std::vector<SentenceRecord>& sents) {
        for (const auto& s : sents) {
            auto uris = annotate_one(client, ep, cfg, s.raw_text);
            if (uris.empty()) continue;
            EntityAnnotation ann;
            ann.topic_id = topic_id;
            ann.article_id = s.article_id;
            ann.sentence_index = s.index_in_article;
            ann.entities = std::move(uris);
            out.push_back(std::move(ann));
        }
    };
    for (const auto& t : topics) {
        handle(t.id, t.sentences_a);
        handle(t.id, t.sentences_b);
    }
    return out;
}

}  // namespace supmmd
