#include "skeetrl/kernels.hpp"

#include <stdexcept>

#include "skeetrl/reward.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace skeetrl::kernels {

// ------------------------ corpus embedding ------------------------

std::vector<Embedding> embed_corpus_serial(const std::vector<std::string>& texts,
                                           const EmbedderSpec& spec) {
    std::vector<Embedding> out(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) out[i] = embed(texts[i], spec);
    return out;
}

std::vector<Embedding> embed_corpus(const std::vector<std::string>& texts,
                                    const EmbedderSpec& spec) {
    std::vector<Embedding> out(texts.size());
    const std::int64_t n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = embed(texts[static_cast<std::size_t>(i)], spec);
    }
    return out;
}

// ------------------------ pairwise similarity ------------------------

std::vector<double> max_pair_similarity_serial(const std::vector<Embedding>& embs) {
    const std::size_t n = embs.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double s = cosine(embs[i], embs[j]);
            if (s > best) best = s;
        }
        out[i] = best;
    }
    return out;
}

std::vector<double> max_pair_similarity(const std::vector<Embedding>& embs) {
    const std::size_t n = embs.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i) {
        double best = -1.0;
        for (std::int64_t j = 0; j < ni; ++j) {
            if (j == i) continue;
            const double s = cosine(embs[static_cast<std::size_t>(i)],
                                    embs[static_cast<std::size_t>(j)]);
            if (s > best) best = s;
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

// ------------------------ batch diversity ------------------------

double batch_diversity_serial(const std::vector<Embedding>& embs) {
    const std::size_t n = embs.size();
    if (n < 2) throw std::invalid_argument("batch_diversity: need at least 2 embeddings");
    // Same row-partial summation structure as the parallel version, so the
    // two are comparable bit for bit.
    std::vector<double> partial(n - 1, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double s = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) s += 1.0 - cosine(embs[i], embs[j]);
        partial[i] = s;
    }
    double sum = 0.0;
    for (double p : partial) sum += p;
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double batch_diversity(const std::vector<Embedding>& embs) {
    const std::size_t n = embs.size();
    if (n < 2) throw std::invalid_argument("batch_diversity: need at least 2 embeddings");
    // Row partials are each computed serially, then reduced in row order, so
    // the sum is independent of the thread count.
    std::vector<double> partial(n - 1, 0.0);
    const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < ni - 1; ++i) {
        double s = 0.0;
        for (std::int64_t j = i + 1; j < ni; ++j) {
            s += 1.0 - cosine(embs[static_cast<std::size_t>(i)],
                              embs[static_cast<std::size_t>(j)]);
        }
        partial[static_cast<std::size_t>(i)] = s;
    }
    double sum = 0.0;
    for (double p : partial) sum += p;
    return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

// ------------------------ transfer scoring ------------------------

static double transfer_one(const Embedding& cand,
                           const std::vector<HistoricalExemplar>& exemplars) {
    // best starts at 0, so negative sim * weight products can never win.
    double best = 0.0;
    for (const HistoricalExemplar& ex : exemplars) {
        const double s = cosine(cand, ex.embedding) * ex.weight;
        if (s > best) best = s;
    }
    return best;
}

std::vector<double> transfer_scores_serial(const std::vector<Embedding>& candidates,
                                           const std::vector<HistoricalExemplar>& exemplars) {
    std::vector<double> out(candidates.size(), 0.0);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        out[i] = transfer_one(candidates[i], exemplars);
    }
    return out;
}

std::vector<double> transfer_scores(const std::vector<Embedding>& candidates,
                                    const std::vector<HistoricalExemplar>& exemplars) {
    std::vector<double> out(candidates.size(), 0.0);
    const std::int64_t n = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            transfer_one(candidates[static_cast<std::size_t>(i)], exemplars);
    }
    return out;
}

}  // namespace skeetrl::kernels
