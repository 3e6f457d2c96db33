#include "skeetrl/ingest.hpp"

#include <cstdlib>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "skeetrl/csv.hpp"
#include "skeetrl/engagement.hpp"

namespace skeetrl {

namespace {

// Column index lookup; required columns missing from the header are fatal.
struct Columns {
    std::unordered_map<std::string, std::size_t> index;

    explicit Columns(const std::vector<std::string>& header) {
        for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);
    }
    std::size_t require(const std::string& name, const std::string& file) const {
        const auto it = index.find(name);
        if (it == index.end()) {
            throw std::runtime_error("ingest: " + file + " is missing required column '" + name + "'");
        }
        return it->second;
    }
    int optional(const std::string& name) const {
        const auto it = index.find(name);
        return it == index.end() ? -1 : static_cast<int>(it->second);
    }
};

const std::string* field(const std::vector<std::string>& row, std::size_t i) {
    return i < row.size() ? &row[i] : nullptr;
}

bool parse_double(const std::string& s, double* out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    *out = v;
    return true;
}

double count_field(const std::vector<std::string>& row, int idx) {
    if (idx < 0) return 0.0;
    const std::string* s = field(row, static_cast<std::size_t>(idx));
    double v = 0.0;
    if (s && parse_double(*s, &v)) return v;
    return 0.0;
}

}  // namespace

LoadResult<ArticleRecord> load_articles(const std::string& path) {
    const CsvTable t = read_csv(path);
    const Columns cols(t.header);
    const std::size_t c_url = cols.require("url", path);
    const std::size_t c_title = cols.require("title", path);

    LoadResult<ArticleRecord> out;
    std::unordered_set<std::string> seen;
    for (const auto& row : t.rows) {
        const std::string* url = field(row, c_url);
        const std::string* title = field(row, c_title);
        if (!url || !title) {
            ++out.dropped["malformed_row"];
            continue;
        }
        if (url->empty()) {
            ++out.dropped["empty_url"];
            continue;
        }
        if (!seen.insert(*url).second) {
            ++out.dropped["duplicate_url"];
            continue;
        }
        out.items.push_back({*url, *title});
    }
    return out;
}

LoadResult<PostRecord> load_posts(const std::string& path) {
    const CsvTable t = read_csv(path);
    const Columns cols(t.header);
    const std::size_t c_uri = cols.require("uri", path);
    const std::size_t c_text = cols.require("text", path);
    const std::size_t c_article = cols.require("article_url", path);
    const std::size_t c_author = cols.require("author", path);
    const int c_created = cols.optional("created_at");
    const int c_likes = cols.optional("likes");
    const int c_replies = cols.optional("replies");
    const int c_reposts = cols.optional("reposts");

    LoadResult<PostRecord> out;
    std::unordered_set<std::string> seen;
    for (const auto& row : t.rows) {
        const std::string* uri = field(row, c_uri);
        const std::string* text = field(row, c_text);
        const std::string* article = field(row, c_article);
        const std::string* author = field(row, c_author);
        if (!uri || !text || !article || !author || uri->empty()) {
            ++out.dropped["malformed_row"];
            continue;
        }
        if (!seen.insert(*uri).second) {
            ++out.dropped["duplicate_uri"];  // keep first occurrence
            continue;
        }
        PostRecord p;
        p.uri = *uri;
        p.text = *text;
        p.article_url = *article;
        p.author = *author;
        if (c_created >= 0) {
            const std::string* ts = field(row, static_cast<std::size_t>(c_created));
            if (ts) p.created_at = *ts;
        }
        p.counts.likes = count_field(row, c_likes);
        p.counts.replies = count_field(row, c_replies);
        p.counts.reposts = count_field(row, c_reposts);
        out.items.push_back(std::move(p));
    }
    return out;
}

LoadResult<ScoreRecord> load_scores(const std::string& path) {
    const CsvTable t = read_csv(path);
    const Columns cols(t.header);
    const std::size_t c_uri = cols.require("post_uri", path);
    const std::size_t c_score = cols.require("score", path);

    LoadResult<ScoreRecord> out;
    std::unordered_set<std::string> seen;
    for (const auto& row : t.rows) {
        const std::string* uri = field(row, c_uri);
        const std::string* score = field(row, c_score);
        double v = 0.0;
        if (!uri || !score || uri->empty()) {
            ++out.dropped["malformed_row"];
            continue;
        }
        if (!parse_double(*score, &v)) {
            ++out.dropped["parse_error"];
            continue;
        }
        if (!seen.insert(*uri).second) {
            ++out.dropped["duplicate_uri"];
            continue;
        }
        out.items.push_back({*uri, v});
    }
    return out;
}

TrainingDataset join_dataset(const std::vector<ArticleRecord>& articles,
                             const std::vector<PostRecord>& posts,
                             const std::vector<ScoreRecord>& scores) {
    std::unordered_map<std::string, std::size_t> article_of;
    for (std::size_t i = 0; i < articles.size(); ++i) article_of.emplace(articles[i].url, i);
    std::unordered_map<std::string, double> score_of;
    for (const ScoreRecord& s : scores) score_of.emplace(s.post_uri, s.score);

    TrainingDataset ds;
    ds.input_posts = posts.size();
    std::vector<std::vector<ScoredPost>> buckets(articles.size());
    for (const PostRecord& p : posts) {
        const auto ai = article_of.find(p.article_url);
        if (ai == article_of.end()) {
            ++ds.dropped["dangling_article"];
            continue;
        }
        const auto si = score_of.find(p.uri);
        if (si == score_of.end()) {
            ++ds.dropped["missing_score"];
            continue;
        }
        if (!is_substantive(p.text)) {
            ++ds.dropped["not_substantive"];
            continue;
        }
        buckets[ai->second].push_back({p, si->second});
        ++ds.retained_posts;
    }
    for (std::size_t i = 0; i < articles.size(); ++i) {
        if (buckets[i].empty()) continue;
        ds.groups.push_back({articles[i], std::move(buckets[i])});
    }
    return ds;
}

}  // namespace skeetrl
