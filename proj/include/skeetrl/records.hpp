#pragma once

#include <map>
#include <string>
#include <vector>

namespace skeetrl {

struct EngagementCounts {
    double likes = 0.0;
    double replies = 0.0;
    double reposts = 0.0;
};

struct ArticleRecord {
    std::string url;
    std::string title;
};

struct PostRecord {
    std::string uri;
    std::string text;
    std::string article_url;
    std::string author;
    std::string created_at;  // optional, empty when absent
    EngagementCounts counts;
};

struct ScoreRecord {
    std::string post_uri;
    double score = 0.0;
};

template <typename T>
struct LoadResult {
    std::vector<T> items;
    std::map<std::string, int> dropped;  // reason -> count
};

struct ScoredPost {
    PostRecord post;
    double score = 0.0;
};

struct ArticleGroup {
    ArticleRecord article;
    std::vector<ScoredPost> posts;
};

// Joined view of the three input files: per-article groups of scored,
// substantive posts, plus per-reason drop counters for everything that fell
// out of the join. retained posts + sum(dropped) == posts passed in.
struct TrainingDataset {
    std::vector<ArticleGroup> groups;
    std::map<std::string, int> dropped;
    std::size_t input_posts = 0;
    std::size_t retained_posts = 0;
};

}  // namespace skeetrl
