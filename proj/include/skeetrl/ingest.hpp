#pragma once

#include <string>

#include "skeetrl/records.hpp"

namespace skeetrl {

// Loaders are forgiving row by row and fatal on structure: a missing file or
// a missing required column throws; a bad row is skipped and counted.
// Extra columns are ignored. Expected headers:
//   articles: url,title            posts: uri,text,article_url,author
//   scores:   post_uri,score       (posts also read created_at,likes,replies,reposts)
LoadResult<ArticleRecord> load_articles(const std::string& path);
LoadResult<PostRecord> load_posts(const std::string& path);
LoadResult<ScoreRecord> load_scores(const std::string& path);

// Joins posts to articles and scores. Drop reasons, checked in this order:
// dangling_article, missing_score, not_substantive. Groups keep article file
// order and only articles with at least one retained post appear.
TrainingDataset join_dataset(const std::vector<ArticleRecord>& articles,
                             const std::vector<PostRecord>& posts,
                             const std::vector<ScoreRecord>& scores);

}  // namespace skeetrl
