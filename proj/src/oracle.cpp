#include "supmmd/oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "supmmd/errors.hpp"
#include "supmmd/rouge.hpp"
#include "supmmd/util.hpp"

using nlohmann::json;

namespace supmmd {

OracleResult extract_oracle(const std::vector<const SentenceRecord*>& candidates,
                            const std::vector<std::vector<std::string>>& references,
                            const OracleConfig& cfg) {
    if (candidates.empty()) throw NoEligibleSentenceError("oracle extraction has no candidates");
    if (cfg.budget < 1) throw UsageError("budget must be >= 1");
    if (cfg.r < 0.0) throw UsageError("length exponent must be >= 0");

    const int n = static_cast<int>(candidates.size());
    std::vector<double> len_pow(n);
    for (int i = 0; i < n; ++i)
        len_pow[i] = std::pow(static_cast<double>(candidates[i]->word_count), cfg.r);

    OracleResult res;
    std::vector<bool> in_s(n, false);
    std::vector<int> chosen_sorted;  // document order
    bool first_eval = true;

    auto alpha_of = [&](const std::vector<int>& subset) {
        std::vector<std::string> tokens;
        for (int i : subset)
            tokens.insert(tokens.end(), candidates[i]->tokens_all.begin(), candidates[i]->tokens_all.end());
        double a = alpha_score(tokens, references, INT_MAX, cfg.r2_only, first_eval);
        first_eval = false;
        return a;
    };

    while (true) {
        int best = -1;
        double best_gain = 0.0, best_alpha = 0.0;
        for (int i = 0; i < n; ++i) {
            if (in_s[i]) continue;
            std::vector<int> trial = chosen_sorted;
            trial.insert(std::upper_bound(trial.begin(), trial.end(), i), i);
            double a = alpha_of(trial);
            double gain = (a - res.alpha) / len_pow[i];
            if (best < 0 || gain > best_gain) {
                best = i;
                best_gain = gain;
                best_alpha = a;
            }
        }
        if (best < 0 || best_gain <= 0.0) break;
        if (res.words + candidates[best]->word_count > cfg.budget) break;  // stop, never overshoot
        in_s[best] = true;
        chosen_sorted.insert(std::upper_bound(chosen_sorted.begin(), chosen_sorted.end(), best), best);
        res.picked.push_back(best);
        res.words += candidates[best]->word_count;
        res.alpha = best_alpha;
        res.trace.push_back({best, res.alpha, res.words});
    }
    return res;
}

std::vector<OracleRecord> load_oracles(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<OracleRecord> recs;
    std::unordered_set<std::string> seen;
    long line_no = 0;
    for (const auto& line : lines) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw SchemaError("invalid JSON", line_no);
        OracleRecord r;
        if (!j.contains("topic_id") || !j["topic_id"].is_string())
            throw SchemaError("topic_id must be a string", line_no);
        r.topic_id = j["topic_id"].get<std::string>();
        if (!seen.insert(r.topic_id).second) throw DuplicateIdError(r.topic_id, line_no);
        r.set = j.at("set").get<std::string>();
        if (r.set != "A" && r.set != "B") throw SchemaError("set must be A or B", line_no);
        r.sentence_ids = j.at("sentence_ids").get<std::vector<std::string>>();
        r.alpha = j.at("alpha").get<double>();
        r.words = j.at("words").get<int>();
        recs.push_back(std::move(r));
    }
    return recs;
}

void save_oracles(const std::vector<OracleRecord>& recs, const std::string& path) {
    std::ostringstream out;
    for (const auto& r : recs) {
        json j;
        j["version"] = "1.0";
        j["topic_id"] = r.topic_id;
        j["set"] = r.set;
        j["sentence_ids"] = r.sentence_ids;
        j["alpha"] = r.alpha;
        j["words"] = r.words;
        out << j.dump() << "\n";
    }
    write_file(path, out.str());
}

}  // namespace supmmd
