#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "supmmd/corpus.hpp"
#include "supmmd/dataset.hpp"
#include "supmmd/importance.hpp"
#include "supmmd/kernel.hpp"
#include "supmmd/mmd.hpp"
#include "supmmd/oracle.hpp"
#include "supmmd/rouge.hpp"
#include "supmmd/selector.hpp"
#include "supmmd/trainer.hpp"
#include "supmmd/util.hpp"
#include "support/helpers.hpp"

using namespace supmmd;
namespace fs = std::filesystem;

namespace {

// thresholds pinned from the brute-force oracles at suite creation
constexpr double kGreedyRatioFloor = 0.90;     // measured 5th percentile 0.9004 of greedy/exhaustive
constexpr double kPlantedRecoveryFloor = 0.95; // measured 1.000 recovery of planted sentences

struct Outcome {
    bool pass = true;
    bool skip = false;
    std::string detail;
};

double now_s() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

Vector randn_vec(std::mt19937& rng, long n, double sd = 1.0) {
    std::normal_distribution<double> d(0.0, sd);
    Vector v(n);
    for (long i = 0; i < n; ++i) v(i) = d(rng);
    return v;
}

Matrix randn_mat(std::mt19937& rng, long r, long c, double sd = 1.0) {
    std::normal_distribution<double> d(0.0, sd);
    Matrix m(r, c);
    for (long i = 0; i < r; ++i)
        for (long j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

Vector simplex_vec(std::mt19937& rng, long n) { return softmax(randn_vec(rng, n)); }

Matrix rbf_gram(const Matrix& a, const Matrix& b, double gamma) {
    Matrix k(a.rows(), b.rows());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < b.rows(); ++j)
            k(i, j) = std::exp(-gamma * (a.row(i) - b.row(j)).squaredNorm());
    return k;
}

TopicLossContext random_ctx(std::mt19937& rng, long nv, long ns, long d, double gamma) {
    Matrix pv = randn_mat(rng, nv, 3);
    Matrix ps = randn_mat(rng, ns, 3);
    TopicLossContext ctx;
    ctx.K_vv = rbf_gram(pv, pv, gamma);
    ctx.K_ss = rbf_gram(ps, ps, gamma);
    ctx.K_vs = rbf_gram(pv, ps, gamma);
    ctx.omega_v = randn_mat(rng, nv, d);
    ctx.omega_s = randn_mat(rng, ns, d);
    return ctx;
}

struct DataFilesAcc {
    std::unordered_set<std::string> stopwords, abbreviations, nouns;
};

DataFilesAcc acc_data_files() {
    std::string dir = SUPMMD_DATA_DIR_FOR_TESTS;
    return {load_word_set(dir + "/stopwords_en.txt"), load_word_set(dir + "/abbreviations_en.txt"),
            load_word_set(dir + "/noun_lexicon_en.txt")};
}

std::vector<PreprocessedTopic> preprocess_all(const std::vector<Topic>& topics, const DataFilesAcc& df) {
    PreprocessConfig pc;
    pc.substitutions = PreprocessConfig::default_substitutions();
    Preprocessor pre(pc, df.stopwords, df.abbreviations);
    std::vector<PreprocessedTopic> out;
    out.reserve(topics.size());
    for (const auto& t : topics) out.push_back(pre.preprocess(t));
    return out;
}

// ---- criterion 1: weighted-mmd floor, zero-theta identity, mean-embedding norm form ----

Outcome criterion1() {
    double t0 = now_s();
    std::mt19937 rng(101);
    std::uniform_int_distribution<long> size(1, 10);
    int bad_floor = 0, bad_bitwise = 0;
    for (int it = 0; it < 1000; ++it) {
        long nv = size(rng), ns = size(rng);
        TopicLossContext ctx = random_ctx(rng, nv, ns, 3, 0.7);
        Vector p = simplex_vec(rng, nv), q = simplex_vec(rng, ns);
        double wl = weighted_loss(ctx, p, q);
        if (!(wl >= -1e-12)) ++bad_floor;
        Vector zero = Vector::Zero(3);
        double at_zero = topic_loss(ctx, zero);
        double plain = mmd2(ctx.K_vv, ctx.K_ss, ctx.K_vs);
        if (at_zero != plain) ++bad_bitwise;
    }
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        long nv = size(rng), ns = size(rng), k = 4;
        Matrix xv = randn_mat(rng, nv, k), xs = randn_mat(rng, ns, k);
        TopicLossContext ctx;
        ctx.K_vv = xv * xv.transpose();
        ctx.K_ss = xs * xs.transpose();
        ctx.K_vs = xv * xs.transpose();
        Vector p = simplex_vec(rng, nv), q = simplex_vec(rng, ns);
        double lhs = weighted_loss(ctx, p, q);
        double rhs = (xv.transpose() * p - xs.transpose() * q).squaredNorm();
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    double secs = now_s() - t0;
    Outcome o;
    o.pass = bad_floor == 0 && bad_bitwise == 0 && worst < 1e-10 && secs < 10.0;
    o.detail = fmt("floor violations %d/1000, zero-theta mismatches %d/1000, "
                   "norm-form max err %.2e, %.1fs",
                   bad_floor, bad_bitwise, worst, secs);
    return o;
}

// ---- criterion 2: analytic gradients vs central differences ----

double rel_err(const Vector& got, const Vector& want) {
    double denom = std::max(want.norm(), 1e-10);
    return (got - want).norm() / denom;
}

Outcome criterion2() {
    double t0 = now_s();
    std::mt19937 rng(202);
    std::uniform_int_distribution<long> size(2, 8);
    const double h = 1e-5;
    double worst_g = 0.0;
    for (int it = 0; it < 100; ++it) {
        long d = 4;
        TopicLossContext ctx = random_ctx(rng, size(rng), size(rng), d, 0.7);
        Vector theta = randn_vec(rng, d);
        LossGrad an = topic_loss_grad(ctx, theta);
        Vector fd(d);
        for (long i = 0; i < d; ++i) {
            Vector tp = theta, tm = theta;
            tp(i) += h;
            tm(i) -= h;
            fd(i) = (topic_loss(ctx, tp) - topic_loss(ctx, tm)) / (2 * h);
        }
        worst_g = std::max(worst_g, rel_err(fd, an.grad));
    }
    std::uniform_real_distribution<double> lam(0.25, 0.625);
    double worst_c = 0.0;
    for (int it = 0; it < 100; ++it) {
        long d = 4;
        bool tied = it < 50;
        TopicLossContext main = random_ctx(rng, size(rng), size(rng), d, 0.7);
        TopicLossContext con = random_ctx(rng, size(rng), size(rng), d, 0.7);
        double lambda = lam(rng);
        Vector th = randn_vec(rng, d);
        Vector ta = tied ? th : randn_vec(rng, d);
        ComparativeGrad an = comparative_loss_grad(main, con, th, ta, lambda);
        auto value = [&](const Vector& m, const Vector& a) {
            return comparative_loss_grad(main, con, m, a, lambda).loss;
        };
        if (tied) {
            Vector fd(d);
            for (long i = 0; i < d; ++i) {
                Vector tp = th, tm = th;
                tp(i) += h;
                tm(i) -= h;
                fd(i) = (value(tp, tp) - value(tm, tm)) / (2 * h);
            }
            worst_c = std::max(worst_c, rel_err(fd, Vector(an.grad_main + an.grad_contrast)));
        } else {
            Vector fd_m(d), fd_a(d);
            for (long i = 0; i < d; ++i) {
                Vector tp = th, tm = th;
                tp(i) += h;
                tm(i) -= h;
                fd_m(i) = (value(tp, ta) - value(tm, ta)) / (2 * h);
                Vector ap = ta, am = ta;
                ap(i) += h;
                am(i) -= h;
                fd_a(i) = (value(th, ap) - value(th, am)) / (2 * h);
            }
            worst_c = std::max(worst_c, rel_err(fd_m, an.grad_main));
            worst_c = std::max(worst_c, rel_err(fd_a, an.grad_contrast));
        }
    }
    double secs = now_s() - t0;
    Outcome o;
    o.pass = worst_g < 1e-5 && worst_c < 1e-5 && secs < 30.0;
    o.detail = fmt("generic max rel err %.2e, comparative %.2e over 100+100 instances, %.1fs",
                   worst_g, worst_c, secs);
    return o;
}

// ---- criterion 3: kernel contracts over synthetic topics ----

Outcome criterion3() {
    DataFilesAcc df = acc_data_files();
    SyntheticSpec spec;
    auto pts = preprocess_all(generate_synthetic(11, 100, spec), df);
    DatasetConfig dcfg;
    dcfg.kernel = make_kernel_spec(1.0, "ub", {0.5, 0.5});
    dcfg.stopwords = df.stopwords;
    dcfg.noun_lexicon = df.nouns;
    int bad_diag = 0;
    double min_eig = 1.0, worst_row = 0.0;
    for (const auto& t : pts) {
        TopicData d = build_topic_data(t, dcfg);
        for (long i = 0; i < d.K_aa.rows(); ++i)
            if (d.K_aa(i, i) != 1.0) ++bad_diag;
        Eigen::SelfAdjointEigenSolver<Matrix> es(d.K_aa, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        Matrix c = center_gram(d.K_aa);
        worst_row = std::max(worst_row, c.rowwise().sum().cwiseAbs().maxCoeff());
    }
    Outcome o;
    o.pass = bad_diag == 0 && min_eig >= -1e-8 && worst_row < 1e-9;
    o.detail = fmt("diag offenders %d, min eigenvalue %.2e, centered row sum max %.2e over 100 topics",
                   bad_diag, min_eig, worst_row);
    return o;
}

// ---- criterion 4: projected gradient vs direction grid with exact line search ----

Outcome criterion4() {
    std::mt19937 rng(404);
    double worst = 0.0, beat = 0.0, worst_simplex = 0.0;
    int bad_sign = 0;
    for (int it = 0; it < 50; ++it) {
        Matrix r = randn_mat(rng, 2, 2);
        Matrix ms = r.transpose() * r + 1e-3 * Matrix::Identity(2, 2);
        Vector a = randn_vec(rng, 2);
        MklResult res = mkl_weights(ms, a);
        double sum = 0.0;
        for (double w : res.weights) {
            if (w < 0.0) ++bad_sign;
            sum += w;
        }
        worst_simplex = std::max(worst_simplex, std::abs(sum - 1.0));
        double best = 0.0;  // the empty direction
        for (int g = 0; g <= 1000; ++g) {
            double t = g / 1000.0;
            Vector u(2);
            u << t, 1.0 - t;
            double ua = u.dot(a), umu = u.dot(ms * u);
            if (ua > 0.0 && umu > 0.0) best = std::min(best, -ua * ua / umu);
        }
        // one sided: the grid is a floor the solver must reach, not an exactness
        // oracle; near-singular cases have valleys sharper than the grid step and
        // the solver lands below the best grid point
        worst = std::max(worst, res.objective - best);
        beat = std::max(beat, best - res.objective);
    }
    Outcome o;
    o.pass = worst <= 1e-3 && bad_sign == 0 && worst_simplex <= 1e-9;
    o.detail = fmt("solver above 1001-point grid by at most %.2e, below by up to %.2e, "
                   "simplex err %.1e, negative weights %d, 50 cases",
                   worst, beat, worst_simplex, bad_sign);
    return o;
}

// ---- criterion 5: greedy against exhaustive search, submodular subset bound ----

Outcome criterion5() {
    double t0 = now_s();
    std::mt19937 rng(505);
    const int n = 10;
    // four instance families: flat similarity (objective is a concave function of
    // cardinality, so exactly monotone submodular), two clusters (sometimes
    // submodular, decided by enumeration), and rbf geometry with and without
    // importance scores (realistic, usually not submodular)
    std::uniform_real_distribution<double> loggam(std::log(0.02), std::log(3.0));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> ratios;
    double sub_min_ratio = 1.0;
    int verified = 0, degenerate = 0;
    for (int it = 0; it < 200; ++it) {
        int family = it % 4;
        bool zero_theta = family != 2;
        Matrix K;
        if (family == 0) {
            double c = 0.3 + 0.6 * unif(rng);
            K = Matrix::Constant(n, n, c);
            K.diagonal().setOnes();
        } else if (family == 1) {
            int split = 3 + static_cast<int>(rng() % 5u);  // cluster sizes 3..7
            double cw = 0.55 + 0.35 * unif(rng);
            double cb = cw - 0.05 - 0.3 * unif(rng);
            K = Matrix::Constant(n, n, cb);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if ((i < split) == (j < split)) K(i, j) = cw;
            K.diagonal().setOnes();
        } else {
            Matrix pts = randn_mat(rng, n, 2);
            K = rbf_gram(pts, pts, std::exp(loggam(rng)));
        }
        SelectorInput in;
        in.K_cc = &K;
        in.p = family < 2 ? Vector(Vector::Constant(n, 1.0 / n)) : simplex_vec(rng, n);
        in.z = zero_theta ? Vector(Vector::Zero(n)) : randn_vec(rng, n);
        in.lengths.assign(n, 1);
        in.budget = 3;
        in.r = 0.0;

        std::vector<double> table(1u << n, 0.0);
        std::vector<int> subset;
        for (unsigned m = 1; m < table.size(); ++m) {
            subset.clear();
            for (int b = 0; b < n; ++b)
                if (m & (1u << b)) subset.push_back(b);
            table[m] = summary_objective(in, subset);
        }
        double best = 0.0;
        for (unsigned m = 0; m < table.size(); ++m)
            if (std::popcount(m) <= 3) best = std::max(best, table[m]);
        double got = select_summary(in).objective;
        if (best <= 1e-12) {
            ++degenerate;
            continue;
        }
        double ratio = got / best;
        ratios.push_back(ratio);

        if (zero_theta) {
            bool monotone = true, submodular = true;
            for (unsigned m = 0; m < table.size() && (monotone || submodular); ++m) {
                for (int x = 0; x < n; ++x) {
                    if (m & (1u << x)) continue;
                    unsigned mx = m | (1u << x);
                    if (table[mx] < table[m] - 1e-10) monotone = false;
                    for (int y = x + 1; y < n; ++y) {
                        if (m & (1u << y)) continue;
                        unsigned my = m | (1u << y);
                        if (table[mx | (1u << y)] - table[mx] > table[my] - table[m] + 1e-10)
                            submodular = false;
                    }
                }
            }
            if (monotone && submodular) {
                ++verified;
                sub_min_ratio = std::min(sub_min_ratio, ratio);
            }
        }
    }
    std::sort(ratios.begin(), ratios.end());
    double p5 = ratios.empty() ? 0.0 : ratios[ratios.size() / 20];
    double secs = now_s() - t0;
    Outcome o;
    o.pass = !ratios.empty() && p5 >= kGreedyRatioFloor &&
             verified > 0 && sub_min_ratio > 0.632 && secs < 120.0;
    o.detail = fmt("p5 ratio %.4f (floor %.2f), min %.4f, submodular-verified %d with min ratio %.4f, "
                   "degenerate %d, %.1fs",
                   p5, kGreedyRatioFloor, ratios.empty() ? 0.0 : ratios.front(), verified,
                   sub_min_ratio, degenerate, secs);
    return o;
}

// ---- criterion 6: oracle recovery of planted sentences ----

Outcome criterion6() {
    DataFilesAcc df = acc_data_files();
    SyntheticSpec spec;
    auto raw = generate_synthetic(7, 30, spec);
    auto planted = synthetic_planted_positions(7, 30, spec);
    auto pts = preprocess_all(raw, df);
    OracleConfig oc;  // 104-word budget, harmonic gain
    int hit = 0, total = 0, over_budget = 0, alpha_drops = 0;
    for (std::size_t ti = 0; ti < pts.size(); ++ti) {
        const auto& t = pts[ti];
        std::vector<const SentenceRecord*> cands;
        std::vector<int> pos_of;  // candidate -> article-major sentence position
        for (std::size_t j = 0; j < t.sentences_a.size(); ++j)
            if (t.sentences_a[j].eligible) {
                cands.push_back(&t.sentences_a[j]);
                pos_of.push_back(static_cast<int>(j));
            }
        std::vector<std::vector<std::string>> refs;
        for (const auto& r : t.references) refs.push_back(r.tokens_all);
        OracleResult res = extract_oracle(cands, refs, oc);
        if (res.words > oc.budget) ++over_budget;
        for (std::size_t s = 1; s < res.trace.size(); ++s)
            if (res.trace[s].alpha < res.trace[s - 1].alpha) ++alpha_drops;
        total += static_cast<int>(planted[ti].size());
        for (int pick : res.picked)
            for (int pp : planted[ti])
                if (pos_of[static_cast<std::size_t>(pick)] == pp) ++hit;
    }
    double recovery = total > 0 ? static_cast<double>(hit) / total : 0.0;
    Outcome o;
    o.pass = recovery >= kPlantedRecoveryFloor && over_budget == 0 && alpha_drops == 0;
    o.detail = fmt("recovery %.3f (floor %.2f, %d/%d), budget breaches %d, alpha drops %d",
                   recovery, kPlantedRecoveryFloor, hit, total, over_budget, alpha_drops);
    return o;
}

// ---- criterion 7: supervision beats unsupervised selection on held-out topics ----

double mean_rouge2(const std::string& csv_path) {
    auto lines = read_lines(csv_path);
    double sum = 0.0;
    int rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto last = lines[i].find_last_of(',');
        if (last == std::string::npos) continue;
        sum += std::stod(lines[i].substr(last + 1));
        ++rows;
    }
    return rows ? sum / rows : 0.0;
}

Outcome criterion7() {
    double t0 = now_s();
    std::string dir = testsup::fresh_dir("acc_c7");
    auto sh = [&](const std::string& cmd) {
        if (testsup::run_cli(dir, cmd) != 0) throw std::runtime_error("pipeline step failed: " + cmd);
    };
    sh("synth --out corpus.jsonl --seed 7 --topics 30");
    sh("preprocess --input corpus.jsonl --out pre.jsonl");

    auto pre = load_preprocessed(dir + "/pre.jsonl");
    auto raw = load_topics(dir + "/corpus.jsonl");
    std::vector<PreprocessedTopic> train_t(pre.begin(), pre.begin() + 20);
    std::vector<PreprocessedTopic> test_t(pre.begin() + 20, pre.end());
    std::vector<Topic> test_raw(raw.begin() + 20, raw.end());
    write_file(dir + "/train_pre.jsonl", preprocessed_to_jsonl(train_t));
    write_file(dir + "/test_pre.jsonl", preprocessed_to_jsonl(test_t));
    save_topics(test_raw, dir + "/test_raw.jsonl");

    sh("oracle --corpus train_pre.jsonl --out oracles.jsonl");
    sh("mkl --corpus train_pre.jsonl --oracles oracles.jsonl --out weights.json");
    sh("train --corpus train_pre.jsonl --oracles oracles.jsonl --out model.json --mode generic "
       "--weights weights.json --seed 7");

    ModelArtifact model = load_model(dir + "/model.json");
    ModelArtifact zero = model;
    zero.theta.setZero();
    save_model(zero, dir + "/zero.json");

    sh("summarize --corpus test_pre.jsonl --model model.json --out sys_trained --budget 40");
    sh("summarize --corpus test_pre.jsonl --model zero.json --out sys_zero --budget 40");
    sh("evaluate --system-dir sys_trained --refs test_raw.jsonl --out trained.csv");
    sh("evaluate --system-dir sys_zero --refs test_raw.jsonl --out zero.csv");

    double r2_trained = mean_rouge2(dir + "/trained.csv");
    double r2_zero = mean_rouge2(dir + "/zero.csv");
    long pos1 = -1;
    for (std::size_t i = 0; i < model.schema.size(); ++i)
        if (model.schema[i] == "pos_1") pos1 = static_cast<long>(i);
    double theta_pos1 = pos1 >= 0 ? model.theta(pos1) : 0.0;
    double secs = now_s() - t0;
    Outcome o;
    o.pass = r2_trained > r2_zero && theta_pos1 > 0.0 && secs < 300.0;
    o.detail = fmt("held-out mean rouge-2 trained %.4f vs unsupervised %.4f, theta[pos_1] %.3f, %.0fs",
                   r2_trained, r2_zero, theta_pos1, secs);
    return o;
}

// ---- criterion 8: byte-identical reruns, also under --jobs 4 ----

Outcome criterion8() {
    auto chain = [](const std::string& dir, const std::string& jobs) {
        auto sh = [&](const std::string& cmd) {
            if (testsup::run_cli(dir, cmd) != 0) throw std::runtime_error("pipeline step failed: " + cmd);
        };
        sh("synth --out corpus.jsonl --seed 13 --topics 6 --articles 3 --sentences 6");
        sh("preprocess --input corpus.jsonl --out pre.jsonl" + jobs);
        sh("oracle --corpus pre.jsonl --out oracles.jsonl --budget 50" + jobs);
        sh("mkl --corpus pre.jsonl --oracles oracles.jsonl --out weights.json" + jobs);
        sh("train --corpus pre.jsonl --oracles oracles.jsonl --out model.json --mode generic "
           "--weights weights.json --folds 2 --max-epochs 6 --seed 2" + jobs);
        sh("summarize --corpus pre.jsonl --model model.json --out sum --budget 50" + jobs);
        sh("evaluate --system-dir sum --refs corpus.jsonl --out scores.csv");
    };
    std::string d1 = testsup::fresh_dir("acc_c8");
    std::string d2 = testsup::fresh_dir("acc_c8");
    chain(d1, "");
    chain(d2, " --jobs 4");
    std::vector<std::string> files = {"corpus.jsonl", "pre.jsonl",          "oracles.jsonl",
                                      "weights.json", "model.json",         "scores.csv",
                                      "model.json.manifest.json",           "weights.json.manifest.json",
                                      "sum.manifest.json",                  "scores.csv.manifest.json"};
    for (const auto& t : load_topics(d1 + "/corpus.jsonl")) {
        files.push_back("sum/" + t.id + ".txt");
        files.push_back("sum/" + t.id + ".json");
    }
    int diffs = 0;
    std::string first_diff;
    for (const auto& f : files)
        if (!testsup::same_bytes(d1 + "/" + f, d2 + "/" + f)) {
            ++diffs;
            if (first_diff.empty()) first_diff = f;
        }
    Outcome o;
    o.pass = diffs == 0;
    o.detail = diffs == 0 ? fmt("%zu artifacts byte-identical across serial and --jobs 4 runs", files.size())
                          : fmt("%d artifacts differ, first: %s", diffs, first_diff.c_str());
    return o;
}

// ---- criterion 9: benchmark reproduction, runs only when corpora are supplied ----

Outcome criterion9() {
    const char* duc04 = std::getenv("SUPMMD_DUC2004_JSONL");
    if (!duc04 || !*duc04) {
        Outcome o;
        o.skip = true;
        o.detail = "set SUPMMD_DUC2004_JSONL (and optionally SUPMMD_DUC2003_JSONL) to run the reproduction";
        return o;
    }
    const char* duc03 = std::getenv("SUPMMD_DUC2003_JSONL");
    std::string dir = testsup::fresh_dir("acc_c9");
    fs::copy_file(duc04, dir + "/duc04.jsonl");
    auto sh = [&](const std::string& cmd) {
        if (testsup::run_cli(dir, cmd) != 0) throw std::runtime_error("pipeline step failed: " + cmd);
    };
    sh("preprocess --input duc04.jsonl --out pre04.jsonl");
    sh("oracle --corpus pre04.jsonl --out oracles04.jsonl");

    // oracle statistics on the evaluation corpus
    auto oracles = load_oracles(dir + "/oracles04.jsonl");
    double sents = 0.0;
    for (const auto& r : oracles) sents += static_cast<double>(r.sentence_ids.size());
    sents /= static_cast<double>(oracles.size());

    DataFilesAcc df = acc_data_files();
    PreprocessConfig pc;
    pc.substitutions = PreprocessConfig::default_substitutions();
    Preprocessor prep(pc, df.stopwords, df.abbreviations);
    auto pre04 = load_preprocessed(dir + "/pre04.jsonl");
    auto raw04 = load_topics(dir + "/duc04.jsonl");
    double r1o = 0.0, r2o = 0.0;
    for (std::size_t i = 0; i < pre04.size(); ++i) {
        const auto& rec = oracles[i];
        std::vector<std::string> cand;
        for (const auto& sid : rec.sentence_ids) {
            auto hash = sid.find_last_of('#');
            std::string art = sid.substr(0, hash);
            int idx = std::stoi(sid.substr(hash + 1));
            const auto& sents_v = rec.set == "B" ? pre04[i].sentences_b : pre04[i].sentences_a;
            for (const auto& s : sents_v)
                if (s.article_id == art && s.index_in_article == idx) {
                    cand.insert(cand.end(), s.tokens_all.begin(), s.tokens_all.end());
                    break;
                }
        }
        std::vector<std::vector<std::string>> refs;
        for (const auto& r : raw04[i].references) refs.push_back(prep.tokenize(r.text).second);
        r1o += rouge_n_recall(cand, refs, 1, 100);
        r2o += rouge_n_recall(cand, refs, 2, 100);
    }
    r1o = 100.0 * r1o / static_cast<double>(pre04.size());
    r2o = 100.0 * r2o / static_cast<double>(pre04.size());

    // full pipeline; trains on the 2003 corpus when provided
    std::string train_pre = "pre04.jsonl", train_orc = "oracles04.jsonl";
    if (duc03 && *duc03) {
        fs::copy_file(duc03, dir + "/duc03.jsonl");
        sh("preprocess --input duc03.jsonl --out pre03.jsonl");
        sh("oracle --corpus pre03.jsonl --out oracles03.jsonl");
        train_pre = "pre03.jsonl";
        train_orc = "oracles03.jsonl";
    }
    sh("mkl --corpus " + train_pre + " --oracles " + train_orc + " --out weights.json");
    sh("train --corpus " + train_pre + " --oracles " + train_orc +
       " --out model.json --mode generic --weights weights.json --seed 7");
    sh("summarize --corpus pre04.jsonl --model model.json --out sys");
    sh("evaluate --system-dir sys --refs duc04.jsonl --out scores.csv");
    double r2 = 100.0 * mean_rouge2(dir + "/scores.csv");

    bool ok_sents = std::abs(sents - 4.02) <= 0.3;
    bool ok_r1 = std::abs(r1o - 42.0) <= 1.0;
    bool ok_r2o = std::abs(r2o - 14.9) <= 1.0;
    bool ok_sys = std::abs(r2 - 10.54) <= 1.0;
    Outcome o;
    o.pass = ok_sents && ok_r1 && ok_r2o && ok_sys;
    o.detail = fmt("oracle sents %.2f (want 4.02±0.3), oracle R1 %.1f R2 %.1f (want 42.0/14.9±1.0), "
                   "system R2 %.2f (want 10.54±1.0)%s",
                   sents, r1o, r2o, r2, (duc03 && *duc03) ? "" : ", trained in-domain");
    return o;
}

}  // namespace

int main() {
    using Fn = Outcome (*)();
    Fn checks[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                   criterion6, criterion7, criterion8, criterion9};
    int failures = 0;
    for (int i = 0; i < 9; ++i) {
        Outcome o;
        try {
            o = checks[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const char* tag = o.skip ? "SKIP" : o.pass ? "PASS" : "FAIL";
        std::printf("criterion %d: %s  %s\n", i + 1, tag, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass && !o.skip) ++failures;
    }
    return failures;
}
