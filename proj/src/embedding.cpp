#include "skeetrl/embedding.hpp"

#include <cmath>
#include <stdexcept>

#include "skeetrl/kernels.hpp"
#include "skeetrl/text.hpp"

namespace skeetrl {

Embedding embed(std::string_view text, const EmbedderSpec& spec) {
    if (spec.kind == EmbedderKind::external) {
        throw std::runtime_error("embed: external encoder not configured");
    }
    Embedding v(kEmbeddingDim, 0.0);
    const std::string lower = ascii_lower(text);
    const std::vector<std::size_t> offs = utf8_offsets(lower);
    const std::size_t m = offs.size() - 1;  // scalar count
    for (std::size_t n = 3; n <= 5; ++n) {
        if (m < n) break;
        for (std::size_t i = 0; i + n <= m; ++i) {
            const std::string_view gram(lower.data() + offs[i], offs[i + n] - offs[i]);
            v[hash64(gram, spec.seed) % kEmbeddingDim] += 1.0;
        }
    }
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (double& x : v) x *= inv;
    }
    return v;
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double batch_diversity(const std::vector<Embedding>& embeddings) {
    return kernels::batch_diversity(embeddings);
}

}  // namespace skeetrl
