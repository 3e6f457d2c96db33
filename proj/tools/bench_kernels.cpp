// Times the OpenMP kernels against their serial references on a synthetic
// corpus and verifies the results are bit-identical while it is at it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skeetrl/kernels.hpp"
#include "skeetrl/reward.hpp"
#include "skeetrl/rng.hpp"

namespace {

using namespace skeetrl;
using clock_type = std::chrono::steady_clock;

std::vector<std::string> make_corpus(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> bank = {
        "engagement", "baseline",  "reward",   "policy",   "gradient", "article",
        "semantic",   "transfer",  "penalty",  "diversity", "rollout",  "curriculum",
        "regret",     "variance",  "monitor",  "template", "network",  "posting",
        "history",    "signal",    "update",   "metric",   "buffer",   "sample"};
    std::mt19937_64 rng(seed);
    std::vector<std::string> corpus;
    corpus.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        const std::size_t words = 20 + uniform_index(rng, 20);
        for (std::size_t w = 0; w < words; ++w) {
            if (w) text += ' ';
            text += bank[uniform_index(rng, bank.size())];
        }
        corpus.push_back(std::move(text));
    }
    return corpus;
}

template <typename F>
double best_ms(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        fn();
        const auto t1 = clock_type::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

double max_abs_diff(const std::vector<Embedding>& a, const std::vector<Embedding>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_abs_diff(a[i], b[i]));
    return m;
}

void row(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-22s %10.2f %10.2f %8.2fx %12g\n", name, serial_ms, parallel_ms,
                parallel_ms > 0 ? serial_ms / parallel_ms : 0.0, diff);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel benchmark: serial reference vs OpenMP"};
    std::size_t n_texts = 2000;
    std::size_t n_pairs = 1200;  // pairwise kernels are O(n^2), kept smaller
    int reps = 5;
    app.add_option("--texts", n_texts, "corpus size for the embedding kernel");
    app.add_option("--pair-texts", n_pairs, "corpus size for the pairwise kernels");
    app.add_option("--reps", reps, "repetitions, best time wins");
    CLI11_PARSE(app, argc, argv);

    const EmbedderSpec spec;
    const auto corpus = make_corpus(n_texts, 42);
    const auto pair_corpus = make_corpus(n_pairs, 43);

    std::printf("%-22s %10s %10s %9s %12s\n", "kernel", "serial ms", "openmp ms", "speedup",
                "max |diff|");

    std::vector<Embedding> es, ep;
    const double t_es = best_ms(reps, [&] { es = kernels::embed_corpus_serial(corpus, spec); });
    const double t_ep = best_ms(reps, [&] { ep = kernels::embed_corpus(corpus, spec); });
    row("embed_corpus", t_es, t_ep, max_abs_diff(es, ep));

    const auto pe = kernels::embed_corpus(pair_corpus, spec);
    std::vector<double> ms, mp;
    const double t_ms = best_ms(reps, [&] { ms = kernels::max_pair_similarity_serial(pe); });
    const double t_mp = best_ms(reps, [&] { mp = kernels::max_pair_similarity(pe); });
    row("max_pair_similarity", t_ms, t_mp, max_abs_diff(ms, mp));

    double ds = 0.0, dp = 0.0;
    const double t_ds = best_ms(reps, [&] { ds = kernels::batch_diversity_serial(pe); });
    const double t_dp = best_ms(reps, [&] { dp = kernels::batch_diversity(pe); });
    row("batch_diversity", t_ds, t_dp, std::fabs(ds - dp));

    std::vector<HistoricalExemplar> exemplars;
    RewardConfig rcfg;
    for (std::size_t i = 0; i < std::min<std::size_t>(200, corpus.size()); ++i)
        exemplars.push_back({corpus[i], static_cast<double>(i % 37), {}, 0.0});
    finalize_exemplars(exemplars, rcfg);
    std::vector<double> ts, tp;
    const double t_ts = best_ms(reps, [&] { ts = kernels::transfer_scores_serial(pe, exemplars); });
    const double t_tp = best_ms(reps, [&] { tp = kernels::transfer_scores(pe, exemplars); });
    row("transfer_scores", t_ts, t_tp, max_abs_diff(ts, tp));

    return 0;
}
