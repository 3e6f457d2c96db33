#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace skeetrl {

// Fixed embedding width. Both the hash embedder and any external encoder
// plugged into the same slot must produce exactly this many components.
inline constexpr std::size_t kEmbeddingDim = 384;

using Embedding = std::vector<double>;

enum class EmbedderKind { reference_hash, external };

struct EmbedderSpec {
    EmbedderKind kind = EmbedderKind::reference_hash;
    std::uint64_t seed = 42;
};

// Deterministic bag-of-character-n-grams embedding: ASCII-lowercase the text,
// take n-grams for n in {3,4,5} over Unicode scalars, hash each gram with the
// seeded 64-bit hash into one of the 384 buckets, accumulate counts, then
// L2-normalize. Texts with no grams embed to the zero vector, never NaN.
// The external kind is an integration seam and throws until one is wired in.
Embedding embed(std::string_view text, const EmbedderSpec& spec);

// Cosine similarity. Zero-norm inputs give 0. Throws on dimension mismatch.
double cosine(const Embedding& a, const Embedding& b);

// Mean over unordered pairs of (1 - cosine). Throws when given < 2 embeddings.
double batch_diversity(const std::vector<Embedding>& embeddings);

}  // namespace skeetrl
