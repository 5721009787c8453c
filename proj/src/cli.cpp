#include "supmmd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "supmmd/corpus.hpp"
#include "supmmd/dataset.hpp"
#include "supmmd/entities.hpp"
#include "supmmd/errors.hpp"
#include "supmmd/importance.hpp"
#include "supmmd/kernel.hpp"
#include "supmmd/oracle.hpp"
#include "supmmd/rouge.hpp"
#include "supmmd/selector.hpp"
#include "supmmd/surface.hpp"
#include "supmmd/trainer.hpp"
#include "supmmd/util.hpp"

namespace supmmd {

using nlohmann::json;

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::map<std::string, std::string> kv;
    for (const auto& raw : read_lines(path)) {
        std::string line = raw;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config: expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw UsageError("config: empty key in '" + line + "'");
        kv[key] = val;  // later lines win
    }
    return kv;
}

namespace {

std::string default_data_dir() {
#ifdef SUPMMD_DEFAULT_DATA_DIR
    return SUPMMD_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

std::string fmt_num(double v) { return json(v).dump(); }

double to_num(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config: " + key + " is not a number: '" + s + "'");
    }
}

long to_int(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config: " + key + " is not an integer: '" + s + "'");
    }
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw UsageError("config: " + key + " is not a boolean: '" + s + "'");
}

// effective command config: file values, overridden by flags, padded with defaults
struct Eff {
    std::map<std::string, std::string> kv;

    static Eff from_file(const std::string& path) {
        Eff e;
        if (!path.empty()) e.kv = parse_config_file(path);
        return e;
    }
    void put(const std::string& key, const std::string& val) { kv[key] = val; }
    void fallback(const std::string& key, const std::string& val) { kv.emplace(key, val); }
    bool has(const std::string& key) const { return kv.count(key) > 0; }
    const std::string& str(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw UsageError("config: missing key " + key);
        return it->second;
    }
    double num(const std::string& key) const { return to_num(key, str(key)); }
    long integer(const std::string& key) const { return to_int(key, str(key)); }
    bool flag(const std::string& key) const { return to_bool(key, str(key)); }
};

std::string strip_trailing_slash(std::string p) {
    while (p.size() > 1 && p.back() == '/') p.pop_back();
    return p;
}

std::string basename_of(const std::string& path) {
    std::string p = strip_trailing_slash(path);
    auto slash = p.find_last_of('/');
    return slash == std::string::npos ? p : p.substr(slash + 1);
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
};

// manifest carries input/output hashes and the effective config; wall time varies
// run to run so it lives in a sidecar the determinism checks ignore
void write_manifest(const std::string& command, const std::string& primary,
                    const std::map<std::string, std::string>& inputs, const Eff& eff,
                    const std::vector<std::string>& output_paths, const Stopwatch& watch) {
    std::map<std::string, std::string> outputs;
    for (const auto& p : output_paths) outputs[p] = sha256_file(p);
    json j;
    j["version"] = "1.0";
    j["command"] = command;
    j["inputs"] = inputs;
    j["params"] = eff.kv;
    j["outputs"] = outputs;
    std::string base = strip_trailing_slash(primary);
    write_file(base + ".manifest.json", j.dump(2) + "\n");
    json t;
    t["command"] = command;
    t["wall_ms"] = watch.ms();
    write_file(base + ".timing.json", t.dump(2) + "\n");
}

std::string hash_input(std::map<std::string, std::string>& inputs, const std::string& path) {
    inputs[path] = sha256_file(path);
    return path;
}

std::string channel_codes_from_list(const std::string& listed) {
    std::string codes;
    for (char c : listed)
        if (c != ',' && c != ' ') codes.push_back(c);
    if (codes.empty()) throw UsageError("channels: empty list");
    for (char c : codes) parse_channel(c);
    return codes;
}

std::vector<double> parse_weight_list(const std::string& listed) {
    std::vector<double> w;
    std::string cur;
    std::stringstream ss(listed);
    while (std::getline(ss, cur, ',')) w.push_back(to_num("weights", trim(cur)));
    return w;
}

std::vector<Channel> channels_of(const std::string& codes) {
    std::vector<Channel> out;
    for (char c : codes) out.push_back(parse_channel(c));
    return out;
}

struct DataFiles {
    std::string stopwords, abbreviations, nouns;
};

DataFiles data_files(const std::string& dir) {
    return {dir + "/stopwords_en.txt", dir + "/abbreviations_en.txt", dir + "/noun_lexicon_en.txt"};
}

struct MklArtifact {
    std::string channels;
    std::vector<double> weights;
};

MklArtifact load_mkl_artifact(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw SchemaError(std::string("kernel weights: ") + e.what());
    }
    if (!j.contains("version") || !j["version"].is_string()) throw SchemaError("kernel weights: missing version");
    std::string v = j["version"].get<std::string>();
    if (v.substr(0, v.find('.')) != "1") throw SchemaError("kernel weights: unsupported major version " + v);
    MklArtifact a;
    for (const auto& c : j.at("channels")) {
        auto s = c.get<std::string>();
        if (s.size() != 1) throw SchemaError("kernel weights: bad channel code " + s);
        a.channels.push_back(s[0]);
    }
    a.weights = j.at("weights").get<std::vector<double>>();
    if (a.weights.size() != a.channels.size()) throw SchemaError("kernel weights: channel/weight mismatch");
    return a;
}

const OracleRecord& oracle_for(const std::vector<OracleRecord>& recs, const std::string& topic_id,
                               const std::string& set) {
    for (const auto& r : recs)
        if (r.topic_id == topic_id && r.set == set) return r;
    throw NoOracleError(topic_id + " set " + set);
}

std::string target_set(const PreprocessedTopic& t) { return t.has_set_b ? "B" : "A"; }

// ---- command payloads ----

struct CommonOpts {
    std::string config_path;
    std::string data_dir = default_data_dir();
    int jobs = 1;
};

void add_common(CLI::App* sub, const std::shared_ptr<CommonOpts>& c, bool with_jobs = true) {
    sub->add_option("--config", c->config_path, "key = value config file");
    sub->add_option("--data-dir", c->data_dir, "directory with stopword/abbreviation/noun lists");
    if (with_jobs) sub->add_option("--jobs", c->jobs, "worker threads over topics");
}

int cmd_synth(const CommonOpts& common, CLI::App* sub, const std::string& out, const std::string& seed_s,
              const std::string& topics_s, bool update, const std::string& articles_s,
              const std::string& sentences_s, const std::string& planted_s, const std::string& refs_s) {
    Stopwatch watch;
    Eff eff = Eff::from_file(common.config_path);
    if (sub->count("--seed")) eff.put("seed", seed_s);
    if (sub->count("--topics")) eff.put("synth.topics", topics_s);
    if (sub->count("--update") || update) eff.put("synth.update", update ? "true" : "false");
    if (sub->count("--articles")) eff.put("synth.articles", articles_s);
    if (sub->count("--sentences")) eff.put("synth.sentences", sentences_s);
    if (sub->count("--planted")) eff.put("synth.planted", planted_s);
    if (sub->count("--references")) eff.put("synth.references", refs_s);
    eff.fallback("seed", "7");
    eff.fallback("synth.topics", "30");
    eff.fallback("synth.update", "false");
    SyntheticSpec spec;
    eff.fallback("synth.articles", std::to_string(spec.n_articles));
    eff.fallback("synth.sentences", std::to_string(spec.sentences_per_article));
    eff.fallback("synth.planted", std::to_string(spec.n_planted));
    eff.fallback("synth.references", std::to_string(spec.n_references));

    spec.n_articles = static_cast<int>(eff.integer("synth.articles"));
    spec.sentences_per_article = static_cast<int>(eff.integer("synth.sentences"));
    spec.n_planted = static_cast<int>(eff.integer("synth.planted"));
    spec.n_references = static_cast<int>(eff.integer("synth.references"));
    spec.with_set_b = eff.flag("synth.update");

    auto topics = generate_synthetic(static_cast<unsigned>(eff.integer("seed")),
                                     static_cast<int>(eff.integer("synth.topics")), spec);
    save_topics(topics, out);
    write_manifest("synth", out, {}, eff, {out}, watch);
    return 0;
}

int cmd_preprocess(const CommonOpts& common, CLI::App* sub, const std::string& input, const std::string& out,
                   const std::string& min_s, const std::string& max_s) {
    Stopwatch watch;
    Eff eff = Eff::from_file(common.config_path);
    if (sub->count("--min-words")) eff.put("preprocess.min_words", min_s);
    if (sub->count("--max-words")) eff.put("preprocess.max_words", max_s);
    eff.fallback("preprocess.min_words", "8");
    eff.fallback("preprocess.max_words", "55");

    DataFiles files = data_files(common.data_dir);
    std::map<std::string, std::string> inputs;
    hash_input(inputs, input);
    hash_input(inputs, files.stopwords);
    hash_input(inputs, files.abbreviations);

    PreprocessConfig pc;
    pc.min_words = static_cast<int>(eff.integer("preprocess.min_words"));
    pc.max_words = static_cast<int>(eff.integer("preprocess.max_words"));
    pc.substitutions = PreprocessConfig::default_substitutions();
    Preprocessor pre(pc, load_word_set(files.stopwords), load_word_set(files.abbreviations));

    auto topics = load_topics(input);
    std::vector<PreprocessedTopic> done(topics.size());
    parallel_for(topics.size(), common.jobs,
                 [&](std::size_t i) { done[i] = pre.preprocess(topics[i]); });
    write_file(out, preprocessed_to_jsonl(done));
    write_manifest("preprocess", out, inputs, eff, {out}, watch);
    return 0;
}

int cmd_annotate(const CommonOpts& common, CLI::App* sub, const std::string& corpus, const std::string& out,
                 const std::string& endpoint, const std::string& confidence_s, const std::string& timeout_s,
                 const std::string& retries_s, const std::string& offline) {
    Stopwatch watch;
    Eff eff = Eff::from_file(common.config_path);
    if (sub->count("--endpoint")) eff.put("annotate.endpoint", endpoint);
    if (sub->count("--confidence")) eff.put("annotate.confidence", confidence_s);
    if (sub->count("--timeout-ms")) eff.put("annotate.timeout_ms", timeout_s);
    if (sub->count("--max-retries")) eff.put("annotate.max_retries", retries_s);
    eff.fallback("annotate.confidence", "0.5");
    eff.fallback("annotate.timeout_ms", "10000");
    eff.fallback("annotate.max_retries", "3");

    std::map<std::string, std::string> inputs;
    hash_input(inputs, corpus);
    auto topics = load_preprocessed(corpus);

    std::vector<EntityAnnotation> anns;
    if (!offline.empty()) {
        hash_input(inputs, offline);
        anns = load_annotations(offline);
        attach_entities(topics, anns);  // validates coordinates against the corpus
    } else if (eff.has("annotate.endpoint")) {
        AnnotateConfig ac;
        ac.endpoint = eff.str("annotate.endpoint");
        ac.confidence = eff.num("annotate.confidence");
        ac.timeout_ms = static_cast<int>(eff.integer("annotate.timeout_ms"));
        ac.max_retries = static_cast<int>(eff.integer("annotate.max_retries"));
        anns = fetch_entities(ac, topics);
    } else {
        throw UsageError("annotate needs --endpoint for live calls or --annotations for offline ingestion");
    }
    save_annotations(anns, out);
    write_manifest("annotate", out, inputs, eff, {out}, watch);
    return 0;
}

int cmd_mkl(const CommonOpts& common, CLI::App* sub, const std::string& corpus, const std::string& oracles_path,
            const std::string& out, const std::string& channels_s, const std::string& annotations) {
    Stopwatch watch;
    Eff eff = Eff::from_file(common.config_path);
    if (sub->count("--channels")) eff.put("kernel.channels", channels_s);
    eff.fallback("kernel.channels", "u,b");
    std::string codes = channel_codes_from_list(eff.str("kernel.channels"));
    auto chans = channels_of(codes);

    std::map<std::string, std::string> inputs;
    hash_input(inputs, corpus);
    hash_input(inputs, oracles_path);
    auto topics = load_preprocessed(corpus);
    if (!annotations.empty()) {
        hash_input(inputs, annotations);
        attach_entities(topics, load_annotations(annotations));
    }
    auto oracles = load_oracles(oracles_path);

    const long C = static_cast<long>(chans.size());
    std::vector<Matrix> Ms(topics.size());
    std::vector<Vector> as(topics.size());
    parallel_for(topics.size(), common.jobs, [&](std::size_t i) {
        const auto& t = topics[i];
        std::string set = target_set(t);
        const OracleRecord& rec = oracle_for(oracles, t.id, set);
        auto grams = build_centered_channel_grams(t, set[0], chans);
        Vector y = mkl_labels(eligible_ids(t, set[0]), rec);
        Matrix Mt(C, C);
        Vector at(C);
        for (long r = 0; r < C; ++r) {
            at(r) = y.dot(grams[static_cast<std::size_t>(r)] * y);
            for (long s = 0; s < C; ++s)
                Mt(r, s) = frobenius_inner(grams[static_cast<std::size_t>(r)],
                                           grams[static_cast<std::size_t>(s)]);
        }
        Ms[i] = std::move(Mt);
        as[i] = std::move(at);
    });
    Matrix M = Matrix::Zero(C, C);
    Vector a = Vector::Zero(C);
    for (std::size_t i = 0; i < topics.size(); ++i) {
        M += Ms[i];
        a += as[i];
    }
    MklResult res = mkl_weights(M, a);

    json j;
    j["version"] = "1.0";
    json cj = json::array();
    for (char c : codes) cj.push_back(std::string(1, c));
    j["channels"] = std::move(cj);
    j["weights"] = res.weights;
    j["objective"] = res.objective;
    j["fallback_uniform"] = res.fallback_uniform;
    j["iterations"] = res.iterations;
    write_file(out, j.dump(2) + "\n");
    write_manifest("mkl", out, inputs, eff, {out}, watch);
    return 0;
}

int cmd_oracle(const CommonOpts& common, CLI::App* sub, const std::string& corpus, const std::string& out,
               const std::string& budget_s, const std::string& r_s, const std::string& metric_s) {
    Stopwatch watch;
    Eff eff = Eff::from_file(common.config_path);
    if (sub->count("--budget")) eff.put("oracle.budget", budget_s);
    if (sub->count("--r")) eff.put("oracle.r", r_s);
    if (sub->count("--metric")) eff.put("oracle.metric", metric_s);
    eff.fallback("oracle.budget", "104");
    eff.fallback("oracle.r", "0.4");
    eff.fallback("oracle.metric", "harmonic");

    OracleConfig oc;
    oc.budget = static_cast<int>(eff.integer("oracle.budget"));
    oc.r = eff.num("oracle.r");
    std::string metric = eff.str("oracle.metric");
    if (metric != "harmonic" && metric != "r2_only")
        throw UsageError("oracle metric must be harmonic or r2_only");
    oc.r2_only = metric == "r2_only";

    std::map<std::string, std::string> inputs;
    hash_input(inputs, corpus);
    auto topics = load_preprocessed(corpus);

    std::vector<OracleRecord> recs(topics.size());
    parallel_for(topics.size(), common.jobs, [&](std::size_t i) {
        const auto& t = topics[i];
        std::string set = target_set(t);
        const auto& sents = t.has_set_b ? t.sentences_b : t.sentences_a;
        std::vector<const SentenceRecord*> cands;
        for (const auto& s : sents)
            if (s.eligible) cands.push_back(&s);
        std::vector<std::vector<std::string>> refs;
        for (const auto& r : t.references) refs.push_back(r.tokens_all);
        OracleResult res = extract_oracle(cands, refs, oc);
        OracleRecord rec;
        rec.topic_id = t.id;
        rec.set = set;
        for (int pos : res.picked)
            rec.sentence_ids.push_back(cands[static_cast<std::size_t>(pos)]->article_id + "#" +
                                       std::to_string(cands[static_cast<std::size_t>(pos)]->index_in_article));
        rec.alpha = res.alpha;
        rec.words = res.words;
        recs[i] = std::move(rec);
    });
    save_oracles(recs, out);
    write_manifest("oracle", out, inputs, eff, {out}, watch);
    return 0;
}

struct TrainFlags {
    std::string corpus, oracles, out, weights, annotations, dump_features;
    std::string mode, gamma, beta, lambda, lr, batch_topics, lr_halving_period, max_epochs, patience,
        folds, seed, optimizer, channels, kernel_weights, boost;
    bool untied = false;
};

void resolve_trainer_defaults(Eff& eff) {
    eff.fallback("tied", "true");
    eff.fallback("gamma", "1.0");
    eff.fallback("beta", "0.0");
    const std::string mode = eff.str("mode");
    eff.fallback("optimizer",
                 mode == "generic" ? "full_batch_quasi_newton" : "minibatch_adaptive");
    const std::string optim = eff.str("optimizer");
    eff.fallback("lr", optim == "full_batch_quasi_newton" ? "0.005" : "0.002");
    eff.fallback("patience", optim == "full_batch_quasi_newton" ? "20" : "50");
    eff.fallback("batch_topics", "8");
    eff.fallback("lr_halving_period", "20");
    eff.fallback("max_epochs", "100");
    eff.fallback("folds", "5");
    eff.fallback("seed", "0");
}

// pooled feature rows of every participating set, in corpus order
Matrix stack_rows(const std::vector<TopicData>& data, bool update) {
    long rows = 0, cols = 0;
    for (const auto& d : data) {
        rows += d.raw_feats_a.rows();
        cols = d.raw_feats_a.cols();
        if (update) rows += d.raw_feats_b.rows();
    }
    Matrix out(rows, cols);
    long at = 0;
    for (const auto& d : data) {
        out.middleRows(at, d.raw_feats_a.rows()) = d.raw_feats_a;
        at += d.raw_feats_a.rows();
        if (update) {
            out.middleRows(at, d.raw_feats_b.rows()) = d.raw_feats_b;
            at += d.raw_feats_b.rows();
        }
    }
    return out;
}

void dump_features_csv(const std::string& path, const std::vector<TopicData>& data,
                       const std::vector<std::string>& schema, bool update) {
    std::ostringstream out;
    out << "topic_id,set,sentence_id";
    for (const auto& name : schema) out << "," << name;
    out << "\n";
    auto emit = [&](const TopicData& d, const char* set, const std::vector<std::string>& ids, const Matrix& F) {
        for (long i = 0; i < F.rows(); ++i) {
            out << d.id << "," << set << "," << ids[static_cast<std::size_t>(i)];
            for (long c = 0; c < F.cols(); ++c) out << "," << fmt_num(F(i, c));
            out << "\n";
        }
    };
    for (const auto& d : data) {
        emit(d, "A", d.ids_a, d.feats_a);
        if (update && d.feats_b.rows() > 0) emit(d, "B", d.ids_b, d.feats_b);
    }
    write_file(path, out.str());
}

int cmd_train(const CommonOpts& common, CLI::App* sub, const TrainFlags& f) {
    Stopwatch watch;
    Eff eff = Eff::from_file(common.config_path);
    auto take = [&](const char* flag, const char* key, const std::string& val) {
        if (sub->count(flag)) eff.put(key, val);
    };
    take("--mode", "mode", f.mode);
    take("--gamma", "gamma", f.gamma);
    take("--beta", "beta", f.beta);
    take("--lambda", "lambda", f.lambda);
    take("--lr", "lr", f.lr);
    take("--batch-topics", "batch_topics", f.batch_topics);
    take("--lr-halving-period", "lr_halving_period", f.lr_halving_period);
    take("--max-epochs", "max_epochs", f.max_epochs);
    take("--patience", "patience", f.patience);
    take("--folds", "folds", f.folds);
    take("--seed", "seed", f.seed);
    take("--optimizer", "optimizer", f.optimizer);
    take("--channels", "kernel.channels", f.channels);
    take("--kernel-weights", "kernel.weights", f.kernel_weights);
    take("--boost", "btfisf_boost", f.boost);
    if (sub->count("--untied")) eff.put("tied", "false");
    if (sub->count("--tied")) eff.put("tied", "true");

    if (!eff.has("mode")) throw UsageError("train needs --mode generic|comparative");
    const std::string mode = eff.str("mode");
    if (mode != "generic" && mode != "comparative")
        throw UsageError("mode must be generic or comparative");
    const bool comparative = mode == "comparative";
    if (comparative && !eff.has("lambda"))
        throw LambdaError("comparative training needs a contrast strength (try [0.25, 0.625])");
    resolve_trainer_defaults(eff);
    eff.fallback("btfisf_boost", comparative ? "3" : "2");

    std::map<std::string, std::string> inputs;
    hash_input(inputs, f.corpus);
    hash_input(inputs, f.oracles);
    DataFiles files = data_files(common.data_dir);
    hash_input(inputs, files.stopwords);
    hash_input(inputs, files.nouns);

    auto topics = load_preprocessed(f.corpus);
    if (topics.empty()) throw EmptyInputError("corpus has no topics");
    if (!f.annotations.empty()) {
        hash_input(inputs, f.annotations);
        attach_entities(topics, load_annotations(f.annotations));
    }
    auto oracles = load_oracles(f.oracles);

    std::string codes;
    std::vector<double> kweights;
    if (!f.weights.empty()) {
        hash_input(inputs, f.weights);
        MklArtifact art = load_mkl_artifact(f.weights);
        codes = art.channels;
        kweights = art.weights;
        std::string listed;
        for (char c : codes) {
            if (!listed.empty()) listed += ",";
            listed += c;
        }
        eff.put("kernel.channels", listed);
        std::string wl;
        for (double w : kweights) {
            if (!wl.empty()) wl += ",";
            wl += fmt_num(w);
        }
        eff.put("kernel.weights", wl);
    } else {
        eff.fallback("kernel.channels", "u,b");
        codes = channel_codes_from_list(eff.str("kernel.channels"));
        if (eff.has("kernel.weights")) {
            kweights = parse_weight_list(eff.str("kernel.weights"));
        } else {
            kweights.assign(codes.size(), 1.0 / static_cast<double>(codes.size()));
            std::string wl;
            for (double w : kweights) {
                if (!wl.empty()) wl += ",";
                wl += fmt_num(w);
            }
            eff.put("kernel.weights", wl);
        }
    }

    DatasetConfig dcfg;
    dcfg.kernel = make_kernel_spec(eff.num("gamma"), codes, kweights);
    dcfg.update_mode = comparative;
    dcfg.btfisf_boost = static_cast<int>(eff.integer("btfisf_boost"));
    dcfg.stopwords = load_word_set(files.stopwords);
    dcfg.noun_lexicon = load_word_set(files.nouns);

    if (comparative)
        for (const auto& t : topics)
            if (!t.has_set_b) throw SchemaError(t.id + ": comparative training needs set B");

    std::vector<TopicData> data(topics.size());
    parallel_for(topics.size(), common.jobs,
                 [&](std::size_t i) { data[i] = build_topic_data(topics[i], dcfg); });

    auto schema = feature_schema(comparative);
    Standardizer st = Standardizer::fit(stack_rows(data, comparative), indicator_mask(comparative));
    for (auto& d : data) apply_standardizer(d, st);

    std::vector<TrainTopic> train_topics;
    train_topics.reserve(topics.size());
    for (std::size_t i = 0; i < topics.size(); ++i) {
        const OracleRecord& rec = oracle_for(oracles, topics[i].id, comparative ? "B" : "A");
        train_topics.push_back(make_train_topic(data[i], rec, comparative));
    }

    TrainOptions opt;
    opt.mode = mode;
    opt.tied = eff.flag("tied");
    opt.beta = eff.num("beta");
    opt.lambda = comparative ? eff.num("lambda") : 0.0;
    opt.optimizer = eff.str("optimizer");
    opt.learning_rate = eff.num("lr");
    opt.batch_topics = static_cast<int>(eff.integer("batch_topics"));
    opt.lr_halving_period = static_cast<int>(eff.integer("lr_halving_period"));
    opt.max_epochs = static_cast<int>(eff.integer("max_epochs"));
    opt.patience = static_cast<int>(eff.integer("patience"));
    opt.folds = static_cast<int>(eff.integer("folds"));
    opt.seed = static_cast<unsigned>(eff.integer("seed"));
    opt.jobs = common.jobs;
    TrainOutput res = train_model(train_topics, static_cast<int>(schema.size()), opt);

    ModelArtifact model;
    model.mode = mode;
    model.schema = schema;
    model.theta = res.theta;
    model.theta_a = res.theta_a;
    model.beta = opt.beta;
    model.gamma = dcfg.kernel.gamma;
    if (comparative) model.lambda = opt.lambda;
    model.channels = codes;
    model.kernel_weights = kweights;
    model.std_mean = st.mean;
    model.std_scale = st.scale;
    model.stopword_list_hash = sha256_file(files.stopwords);
    model.noun_lexicon_hash = sha256_file(files.nouns);
    model.train_config_echo = eff.kv;
    save_model(model, f.out);

    json report;
    report["version"] = "1.0";
    report["chosen_epochs"] = res.chosen_epochs;
    report["mean_curve"] = res.mean_curve;
    report["fold_curves"] = res.fold_curves;
    report["train_curve"] = res.train_curve;
    report["final_objective"] = res.final_objective;
    std::string report_path = f.out + ".train_report.json";
    write_file(report_path, report.dump(2) + "\n");

    std::vector<std::string> outputs{f.out, report_path};
    if (!f.dump_features.empty()) {
        dump_features_csv(f.dump_features, data, schema, comparative);
        outputs.push_back(f.dump_features);
    }
    write_manifest("train", f.out, inputs, eff, outputs, watch);
    return 0;
}

struct SummarizeFlags {
    std::string corpus, model, out, annotations, dump_features;
    std::string budget, lambda, r;
};

int cmd_summarize(const CommonOpts& common, CLI::App* sub, const SummarizeFlags& f) {
    Stopwatch watch;
    Eff eff = Eff::from_file(common.config_path);
    if (sub->count("--budget")) eff.put("inference.budget", f.budget);
    if (sub->count("--lambda")) eff.put("lambda", f.lambda);
    if (sub->count("--r")) eff.put("r_inf", f.r);
    eff.fallback("inference.budget", "100");

    std::map<std::string, std::string> inputs;
    hash_input(inputs, f.corpus);
    hash_input(inputs, f.model);
    DataFiles files = data_files(common.data_dir);
    hash_input(inputs, files.stopwords);
    hash_input(inputs, files.nouns);

    ModelArtifact model = load_model(f.model);
    const bool update = model.mode == "comparative";

    auto topics = load_preprocessed(f.corpus);
    if (!f.annotations.empty()) {
        hash_input(inputs, f.annotations);
        attach_entities(topics, load_annotations(f.annotations));
    }

    double lambda = 0.0;
    if (eff.has("lambda")) lambda = eff.num("lambda");
    else if (model.lambda) lambda = *model.lambda;
    double r = 0.0;
    if (eff.has("r_inf")) r = eff.num("r_inf");
    else if (model.train_config_echo.count("r_inf"))
        r = to_num("r_inf", model.train_config_echo.at("r_inf"));
    eff.put("r_inf", fmt_num(r));
    eff.put("lambda", fmt_num(lambda));
    const int budget = static_cast<int>(eff.integer("inference.budget"));

    DatasetConfig dcfg;
    dcfg.kernel = make_kernel_spec(model.gamma, model.channels, model.kernel_weights);
    dcfg.update_mode = update;
    dcfg.btfisf_boost = update ? 3 : 2;
    if (model.train_config_echo.count("btfisf_boost"))
        dcfg.btfisf_boost =
            static_cast<int>(to_int("btfisf_boost", model.train_config_echo.at("btfisf_boost")));
    dcfg.stopwords = load_word_set(files.stopwords);
    dcfg.noun_lexicon = load_word_set(files.nouns);

    Standardizer st;
    st.mean = model.std_mean;
    st.scale = model.std_scale;
    st.indicator = indicator_mask(update);
    if (st.mean.size() != static_cast<long>(model.schema.size()))
        throw SchemaError("model standardization does not match its schema");

    if (update)
        for (const auto& t : topics)
            if (!t.has_set_b) throw SchemaError(t.id + ": comparative summarization needs set B");

    std::filesystem::create_directories(f.out);

    struct TopicOutput {
        std::string text;
        json sidecar;
    };
    std::vector<TopicOutput> results(topics.size());
    std::vector<TopicData> data(topics.size());
    parallel_for(topics.size(), common.jobs, [&](std::size_t i) {
        const auto& t = topics[i];
        TopicData d = build_topic_data(t, dcfg);
        apply_standardizer(d, st);

        SelectorInput in;
        Vector z;
        const std::vector<int>* elig;
        const std::vector<SentenceRecord>* sents;
        const std::vector<std::string>* ids;
        if (update) {
            in.K_cc = &d.K_bb;
            z = d.feats_b * model.theta;
            in.lengths = d.len_b;
            elig = &d.elig_b;
            sents = &t.sentences_b;
            ids = &d.ids_b;
            if (lambda != 0.0) {
                const Vector& theta_a = model.theta_a ? *model.theta_a : model.theta;
                in.K_xc = &d.K_ab;
                in.z_alt = d.feats_b * theta_a;
                in.p_alt = softmax(d.feats_a * theta_a);
                in.lambda = lambda;
            }
        } else {
            in.K_cc = &d.K_aa;
            z = d.feats_a * model.theta;
            in.lengths = d.len_a;
            elig = &d.elig_a;
            sents = &t.sentences_a;
            ids = &d.ids_a;
            if (lambda != 0.0) throw LambdaError("generic model has no contrast side");
        }
        in.z = z;
        in.p = softmax(z);
        in.budget = budget;
        in.r = r;
        SelectionResult sel = select_summary(in);

        std::ostringstream text;
        json sids = json::array();
        int word_check = 0;
        for (int pos : sel.picked) {
            int orig = (*elig)[static_cast<std::size_t>(pos)];
            text << (*sents)[static_cast<std::size_t>(orig)].raw_text << "\n";
            sids.push_back((*ids)[static_cast<std::size_t>(pos)]);
            word_check += in.lengths[static_cast<std::size_t>(pos)];
        }
        (void)word_check;
        json side;
        side["version"] = "1.0";
        side["topic_id"] = t.id;
        side["sentence_ids"] = std::move(sids);
        side["objective"] = sel.objective;
        side["words"] = sel.words;
        side["singleton_fallback"] = sel.singleton_fallback;
        side["trajectory"] = sel.trajectory;
        results[i] = {text.str(), std::move(side)};
        data[i] = std::move(d);
    });

    std::vector<std::string> outputs;
    std::string base = strip_trailing_slash(f.out);
    for (std::size_t i = 0; i < topics.size(); ++i) {
        std::string txt = base + "/" + topics[i].id + ".txt";
        std::string meta = base + "/" + topics[i].id + ".json";
        write_file(txt, results[i].text);
        write_file(meta, results[i].sidecar.dump(2) + "\n");
        outputs.push_back(txt);
        outputs.push_back(meta);
    }
    if (!f.dump_features.empty()) {
        dump_features_csv(f.dump_features, data, model.schema, update);
        outputs.push_back(f.dump_features);
    }
    write_manifest("summarize", f.out, inputs, eff, outputs, watch);
    return 0;
}

int cmd_evaluate(const CommonOpts& common, CLI::App* sub, const std::string& system_dir,
                 const std::string& refs_path, const std::string& out, const std::string& truncate_s) {
    Stopwatch watch;
    Eff eff = Eff::from_file(common.config_path);
    if (sub->count("--truncate")) eff.put("evaluate.truncate", truncate_s);
    eff.fallback("evaluate.truncate", "100");
    const int truncate = static_cast<int>(eff.integer("evaluate.truncate"));

    std::map<std::string, std::string> inputs;
    hash_input(inputs, refs_path);
    DataFiles files = data_files(common.data_dir);
    hash_input(inputs, files.stopwords);
    hash_input(inputs, files.abbreviations);

    PreprocessConfig pc;
    pc.substitutions = PreprocessConfig::default_substitutions();
    Preprocessor pre(pc, load_word_set(files.stopwords), load_word_set(files.abbreviations));

    auto topics = load_topics(refs_path);
    const std::string system = basename_of(system_dir);

    std::ostringstream csv;
    csv << "topic_id,system,rouge1_recall,rouge2_recall\n";
    char buf[64];
    for (const auto& t : topics) {
        std::string path = strip_trailing_slash(system_dir) + "/" + t.id + ".txt";
        if (!std::filesystem::exists(path)) {
            warn("no summary for topic " + t.id + ", skipping");
            continue;
        }
        inputs[path] = sha256_file(path);
        std::vector<std::string> cand;
        for (const auto& line : read_lines(path)) {
            auto toks = pre.tokenize(line).second;
            cand.insert(cand.end(), toks.begin(), toks.end());
        }
        std::vector<std::vector<std::string>> refs;
        for (const auto& ref : t.references) refs.push_back(pre.tokenize(ref.text).second);
        double r1 = rouge_n_recall(cand, refs, 1, truncate);
        double r2 = rouge_n_recall(cand, refs, 2, truncate);
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", r1, r2);
        csv << t.id << "," << system << "," << buf << "\n";
    }
    write_file(out, csv.str());
    write_manifest("evaluate", out, inputs, eff, {out}, watch);
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"supervised kernel two-sample summarization pipeline"};
    app.require_subcommand(1);
    int rc = 0;

    // synth
    auto synth_c = std::make_shared<CommonOpts>();
    auto synth_out = std::make_shared<std::string>();
    auto synth_vals = std::make_shared<std::vector<std::string>>(6);
    auto synth_update = std::make_shared<bool>(false);
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    add_common(synth, synth_c, false);
    synth->add_option("--out", *synth_out, "corpus JSONL path")->required();
    synth->add_option("--seed", (*synth_vals)[0], "rng seed");
    synth->add_option("--topics", (*synth_vals)[1], "topic count");
    synth->add_flag("--update", *synth_update, "emit update-style topics with a set B");
    synth->add_option("--articles", (*synth_vals)[2], "articles per set");
    synth->add_option("--sentences", (*synth_vals)[3], "sentences per article");
    synth->add_option("--planted", (*synth_vals)[4], "planted salient sentences per topic");
    synth->add_option("--references", (*synth_vals)[5], "reference summaries per topic");
    synth->callback([=, &rc] {
        rc = cmd_synth(*synth_c, synth, *synth_out, (*synth_vals)[0], (*synth_vals)[1], *synth_update,
                       (*synth_vals)[2], (*synth_vals)[3], (*synth_vals)[4], (*synth_vals)[5]);
    });

    // preprocess
    auto pre_c = std::make_shared<CommonOpts>();
    auto pre_in = std::make_shared<std::string>();
    auto pre_out = std::make_shared<std::string>();
    auto pre_min = std::make_shared<std::string>();
    auto pre_max = std::make_shared<std::string>();
    CLI::App* prep = app.add_subcommand("preprocess", "split, tokenize and filter a raw corpus");
    add_common(prep, pre_c);
    prep->add_option("--input", *pre_in, "raw topics JSONL")->required();
    prep->add_option("--out", *pre_out, "preprocessed JSONL path")->required();
    prep->add_option("--min-words", *pre_min, "eligibility lower bound");
    prep->add_option("--max-words", *pre_max, "eligibility upper bound");
    prep->callback([=, &rc] { rc = cmd_preprocess(*pre_c, prep, *pre_in, *pre_out, *pre_min, *pre_max); });

    // annotate
    auto ann_c = std::make_shared<CommonOpts>();
    auto ann_vals = std::make_shared<std::vector<std::string>>(7);
    CLI::App* ann = app.add_subcommand("annotate", "resolve entity mentions per sentence");
    add_common(ann, ann_c, false);
    ann->add_option("--corpus", (*ann_vals)[0], "preprocessed JSONL")->required();
    ann->add_option("--out", (*ann_vals)[1], "annotations JSONL path")->required();
    ann->add_option("--endpoint", (*ann_vals)[2], "annotation service URL");
    ann->add_option("--confidence", (*ann_vals)[3], "minimum linking confidence");
    ann->add_option("--timeout-ms", (*ann_vals)[4], "per-request timeout");
    ann->add_option("--max-retries", (*ann_vals)[5], "transport retries before giving up");
    ann->add_option("--annotations", (*ann_vals)[6], "offline annotations JSONL to validate and ingest");
    ann->callback([=, &rc] {
        rc = cmd_annotate(*ann_c, ann, (*ann_vals)[0], (*ann_vals)[1], (*ann_vals)[2], (*ann_vals)[3],
                          (*ann_vals)[4], (*ann_vals)[5], (*ann_vals)[6]);
    });

    // mkl
    auto mkl_c = std::make_shared<CommonOpts>();
    auto mkl_vals = std::make_shared<std::vector<std::string>>(5);
    CLI::App* mkl = app.add_subcommand("mkl", "fit kernel channel weights against oracle labels");
    add_common(mkl, mkl_c);
    mkl->add_option("--corpus", (*mkl_vals)[0], "preprocessed JSONL")->required();
    mkl->add_option("--oracles", (*mkl_vals)[1], "oracle JSONL")->required();
    mkl->add_option("--out", (*mkl_vals)[2], "weights JSON path")->required();
    mkl->add_option("--channels", (*mkl_vals)[3], "channel codes, e.g. u,b,e");
    mkl->add_option("--annotations", (*mkl_vals)[4], "entity annotations JSONL");
    mkl->callback([=, &rc] {
        rc = cmd_mkl(*mkl_c, mkl, (*mkl_vals)[0], (*mkl_vals)[1], (*mkl_vals)[2], (*mkl_vals)[3],
                     (*mkl_vals)[4]);
    });

    // oracle
    auto orc_c = std::make_shared<CommonOpts>();
    auto orc_vals = std::make_shared<std::vector<std::string>>(5);
    CLI::App* orc = app.add_subcommand("oracle", "extract greedy reference-matching summaries");
    add_common(orc, orc_c);
    orc->add_option("--corpus", (*orc_vals)[0], "preprocessed JSONL")->required();
    orc->add_option("--out", (*orc_vals)[1], "oracle JSONL path")->required();
    orc->add_option("--budget", (*orc_vals)[2], "word budget");
    orc->add_option("--r", (*orc_vals)[3], "length scaling exponent");
    orc->add_option("--metric", (*orc_vals)[4], "harmonic or r2_only");
    orc->callback([=, &rc] {
        rc = cmd_oracle(*orc_c, orc, (*orc_vals)[0], (*orc_vals)[1], (*orc_vals)[2], (*orc_vals)[3],
                        (*orc_vals)[4]);
    });

    // train
    auto tr_c = std::make_shared<CommonOpts>();
    auto tr = std::make_shared<TrainFlags>();
    CLI::App* train = app.add_subcommand("train", "fit importance weights on oracle summaries");
    add_common(train, tr_c);
    train->add_option("--corpus", tr->corpus, "preprocessed JSONL")->required();
    train->add_option("--oracles", tr->oracles, "oracle JSONL")->required();
    train->add_option("--out", tr->out, "model JSON path")->required();
    train->add_option("--mode", tr->mode, "generic or comparative");
    train->add_option("--weights", tr->weights, "kernel weights JSON from the mkl step");
    train->add_option("--annotations", tr->annotations, "entity annotations JSONL");
    train->add_option("--dump-features", tr->dump_features, "write standardized features CSV");
    auto* tied_flag = train->add_flag("--tied", "share one weight vector across sets");
    train->add_flag("--untied", tr->untied, "separate weight vector for the earlier set")
        ->excludes(tied_flag);
    train->add_option("--gamma", tr->gamma, "kernel bandwidth");
    train->add_option("--beta", tr->beta, "l2 regularization strength");
    train->add_option("--lambda", tr->lambda, "contrast strength");
    train->add_option("--lr", tr->lr, "learning rate / trial step");
    train->add_option("--batch-topics", tr->batch_topics, "minibatch size in topics");
    train->add_option("--lr-halving-period", tr->lr_halving_period, "epochs between rate halvings");
    train->add_option("--max-epochs", tr->max_epochs, "epoch cap");
    train->add_option("--patience", tr->patience, "epochs without improvement before stopping");
    train->add_option("--folds", tr->folds, "cross-validation folds; <2 disables");
    train->add_option("--seed", tr->seed, "rng seed");
    train->add_option("--optimizer", tr->optimizer, "full_batch_quasi_newton or minibatch_adaptive");
    train->add_option("--channels", tr->channels, "kernel channel codes");
    train->add_option("--kernel-weights", tr->kernel_weights, "comma-separated channel weights");
    train->add_option("--boost", tr->boost, "first-sentence term boost");
    train->callback([=, &rc] { rc = cmd_train(*tr_c, train, *tr); });

    // summarize
    auto sm_c = std::make_shared<CommonOpts>();
    auto sm = std::make_shared<SummarizeFlags>();
    CLI::App* summ = app.add_subcommand("summarize", "select summaries with a trained model");
    add_common(summ, sm_c);
    summ->add_option("--corpus", sm->corpus, "preprocessed JSONL")->required();
    summ->add_option("--model", sm->model, "model JSON")->required();
    summ->add_option("--out", sm->out, "output directory")->required();
    summ->add_option("--annotations", sm->annotations, "entity annotations JSONL");
    summ->add_option("--budget", sm->budget, "word budget");
    summ->add_option("--lambda", sm->lambda, "contrast strength override");
    summ->add_option("--r", sm->r, "length scaling exponent override");
    summ->add_option("--dump-features", sm->dump_features, "write standardized features CSV");
    summ->callback([=, &rc] { rc = cmd_summarize(*sm_c, summ, *sm); });

    // evaluate
    auto ev_c = std::make_shared<CommonOpts>();
    auto ev_vals = std::make_shared<std::vector<std::string>>(4);
    CLI::App* eval = app.add_subcommand("evaluate", "score summaries against references");
    add_common(eval, ev_c, false);
    eval->add_option("--system-dir", (*ev_vals)[0], "directory of <topic>.txt summaries")->required();
    eval->add_option("--refs", (*ev_vals)[1], "raw topics JSONL with references")->required();
    eval->add_option("--out", (*ev_vals)[2], "CSV path")->required();
    eval->add_option("--truncate", (*ev_vals)[3], "candidate word cap before scoring");
    eval->callback([=, &rc] {
        rc = cmd_evaluate(*ev_c, eval, (*ev_vals)[0], (*ev_vals)[1], (*ev_vals)[2], (*ev_vals)[3]);
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return rc;
}

}  // namespace supmmd
