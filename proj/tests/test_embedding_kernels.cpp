#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "skeetrl/embedding.hpp"
#include "skeetrl/kernels.hpp"
#include "skeetrl/reward.hpp"

using namespace skeetrl;

namespace {

std::vector<std::string> test_corpus() {
    std::vector<std::string> texts;
    const char* bases[] = {"grid batteries reshape evening prices",
                           "coral atlas maps every known reef",
                           "rust lands in the mainline kernel",
                           "open data changes city traffic lights",
                           "cheap sensors catch water leaks early"};
    for (int i = 0; i < 60; ++i) {
        texts.push_back(std::string(bases[i % 5]) + " variant " + std::to_string(i));
    }
    return texts;
}

}  // namespace

TEST_CASE("embed returns a deterministic unit vector of fixed width") {
    const EmbedderSpec spec;
    const Embedding a = embed("Grid batteries are everywhere now", spec);
    const Embedding b = embed("Grid batteries are everywhere now", spec);
    REQUIRE(a.size() == kEmbeddingDim);
    CHECK(a == b);

    double sq = 0.0;
    for (double x : a) sq += x * x;
    CHECK(std::sqrt(sq) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embed lowercases before hashing") {
    const EmbedderSpec spec;
    CHECK(embed("ABC def GHI", spec) == embed("abc DEF ghi", spec));
}

TEST_CASE("embed maps texts below the smallest n-gram to the zero vector") {
    const EmbedderSpec spec;
    for (const char* t : {"", "a", "ab"}) {
        const Embedding e = embed(t, spec);
        double sq = 0.0;
        for (double x : e) sq += x * x;
        CHECK(sq == 0.0);
    }
}

TEST_CASE("embedder seed changes the bucketing") {
    EmbedderSpec a, b;
    b.seed = 7;
    CHECK(embed("same text either way", a) != embed("same text either way", b));
}

TEST_CASE("external embedder kind is a hard error") {
    EmbedderSpec spec;
    spec.kind = EmbedderKind::external;
    CHECK_THROWS(embed("anything", spec));
}

TEST_CASE("cosine basics") {
    const EmbedderSpec spec;
    const Embedding a = embed("solar panels on every roof", spec);
    const Embedding b = embed("coral reefs mapped from orbit", spec);
    CHECK(cosine(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(a, b) == doctest::Approx(cosine(b, a)).epsilon(1e-15));
    const Embedding zero(kEmbeddingDim, 0.0);
    CHECK(cosine(a, zero) == 0.0);
    CHECK_THROWS(cosine(a, Embedding(3, 0.0)));
}

TEST_CASE("parallel kernels are bit-identical to the serial references") {
    const EmbedderSpec spec;
    const auto texts = test_corpus();

    const auto es = kernels::embed_corpus_serial(texts, spec);
    const auto ep = kernels::embed_corpus(texts, spec);
    REQUIRE(es.size() == ep.size());
    for (std::size_t i = 0; i < es.size(); ++i) CHECK(es[i] == ep[i]);

    const auto ms = kernels::max_pair_similarity_serial(ep);
    const auto mp = kernels::max_pair_similarity(ep);
    CHECK(ms == mp);

    CHECK(kernels::batch_diversity_serial(ep) == kernels::batch_diversity(ep));

    std::vector<HistoricalExemplar> exemplars;
    RewardConfig rcfg;
    for (std::size_t i = 0; i < 10; ++i)
        exemplars.push_back({texts[i], static_cast<double>(i), {}, 0.0});
    finalize_exemplars(exemplars, rcfg);
    const auto ts = kernels::transfer_scores_serial(ep, exemplars);
    const auto tp = kernels::transfer_scores(ep, exemplars);
    CHECK(ts == tp);
}

TEST_CASE("max_pair_similarity edge cases") {
    const EmbedderSpec spec;
    const Embedding a = embed("one single embedding here", spec);
    const auto single = kernels::max_pair_similarity({a});
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 0.0);

    const auto twin = kernels::max_pair_similarity({a, a});
    CHECK(twin[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("batch_diversity rejects singletons and scores sameness as zero") {
    const EmbedderSpec spec;
    const Embedding a = embed("identical text in this batch", spec);
    CHECK_THROWS(kernels::batch_diversity({a}));
    CHECK(kernels::batch_diversity({a, a, a}) == doctest::Approx(0.0).epsilon(1e-12));

    const Embedding b = embed("a completely different subject", spec);
    CHECK(kernels::batch_diversity({a, b}) > 0.0);
}

TEST_CASE("transfer_scores floors at zero and handles empty pools") {
    const EmbedderSpec spec;
    const auto embs = kernels::embed_corpus({"candidate text one", "candidate text two"}, spec);
    const auto zeros = kernels::transfer_scores(embs, {});
    CHECK(zeros == std::vector<double>{0.0, 0.0});
}

TEST_CASE("batch_diversity agrees with the direct pairwise formula") {
    const EmbedderSpec spec;
    const auto texts = test_corpus();
    std::vector<Embedding> embs;
    for (std::size_t i = 0; i < 8; ++i) embs.push_back(embed(texts[i], spec));

    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < embs.size(); ++i) {
        for (std::size_t j = i + 1; j < embs.size(); ++j) {
            sum += 1.0 - cosine(embs[i], embs[j]);
            ++pairs;
        }
    }
    CHECK(kernels::batch_diversity(embs) ==
          doctest::Approx(sum / static_cast<double>(pairs)).epsilon(1e-12));
}
