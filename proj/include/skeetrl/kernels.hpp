#pragma once

#include <string>
#include <vector>

#include "skeetrl/embedding.hpp"

namespace skeetrl {

struct HistoricalExemplar;

namespace kernels {

// Batch kernels on the scoring hot path. Each has a plain serial reference
// and an OpenMP version; iterations write disjoint slots and partial sums are
// reduced in index order, so the two produce bit-identical results. Tests
// assert that equivalence and the bench tool compares their throughput.

std::vector<Embedding> embed_corpus_serial(const std::vector<std::string>& texts,
                                           const EmbedderSpec& spec);
std::vector<Embedding> embed_corpus(const std::vector<std::string>& texts,
                                    const EmbedderSpec& spec);

// For each i, max over j != i of cosine(e_i, e_j). Singleton input -> {0.0}.
std::vector<double> max_pair_similarity_serial(const std::vector<Embedding>& embs);
std::vector<double> max_pair_similarity(const std::vector<Embedding>& embs);

double batch_diversity_serial(const std::vector<Embedding>& embs);
double batch_diversity(const std::vector<Embedding>& embs);

// Per-candidate semantic transfer: max over exemplars of cosine * weight,
// floored at 0. Empty exemplar list -> all zeros.
std::vector<double> transfer_scores_serial(const std::vector<Embedding>& candidates,
                                           const std::vector<HistoricalExemplar>& exemplars);
std::vector<double> transfer_scores(const std::vector<Embedding>& candidates,
                                    const std::vector<HistoricalExemplar>& exemplars);

}  // namespace kernels
}  // namespace skeetrl
