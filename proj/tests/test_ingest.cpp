#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "skeetrl/ingest.hpp"

using namespace skeetrl;

namespace {

struct TempCsv {
    std::filesystem::path path;
    explicit TempCsv(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / ("skeetrl_" + name);
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::filesystem::remove(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("load_articles drops malformed and duplicate rows") {
    const TempCsv f("articles.csv",
                    "url,title\n"
                    "https://a.example/1,First\n"
                    "https://a.example/1,First again\n"
                    ",No url\n"
                    "https://a.example/2\n"
                    "https://a.example/3,Third\n");
    const auto r = load_articles(f.str());
    REQUIRE(r.items.size() == 2);
    CHECK(r.items[0].title == "First");
    CHECK(r.items[1].url == "https://a.example/3");
    CHECK(r.dropped.at("duplicate_url") == 1);
    CHECK(r.dropped.at("empty_url") == 1);
    CHECK(r.dropped.at("malformed_row") == 1);
}

TEST_CASE("load_articles requires its columns") {
    const TempCsv f("articles_bad.csv", "link,title\nx,y\n");
    CHECK_THROWS(load_articles(f.str()));
}

TEST_CASE("load_posts reads optional engagement columns when present") {
    const TempCsv f("posts.csv",
                    "uri,text,article_url,author,likes,replies,reposts\n"
                    "p1,hello world text,https://a.example/1,alice,3,1,2\n"
                    "p1,duplicate uri,https://a.example/1,alice,0,0,0\n"
                    "p2,counts default to zero,https://a.example/1,bob,,,\n");
    const auto r = load_posts(f.str());
    REQUIRE(r.items.size() == 2);
    CHECK(r.items[0].counts.likes == doctest::Approx(3.0));
    CHECK(r.items[0].counts.reposts == doctest::Approx(2.0));
    CHECK(r.items[1].counts.likes == doctest::Approx(0.0));
    CHECK(r.items[0].created_at.empty());
    CHECK(r.dropped.at("duplicate_uri") == 1);
}

TEST_CASE("load_scores drops unparseable values") {
    const TempCsv f("scores.csv",
                    "post_uri,score\n"
                    "p1,12.5\n"
                    "p2,oops\n"
                    "p1,99\n");
    const auto r = load_scores(f.str());
    REQUIRE(r.items.size() == 1);
    CHECK(r.items[0].score == doctest::Approx(12.5));
    CHECK(r.dropped.at("parse_error") == 1);
    CHECK(r.dropped.at("duplicate_uri") == 1);
}

TEST_CASE("join_dataset accounts for every input post") {
    const std::vector<ArticleRecord> articles = {{"https://a.example/1", "One"},
                                                 {"https://a.example/2", "Two"}};
    std::vector<PostRecord> posts(5);
    posts[0] = {"p0", "a substantive comment that easily clears the bar", "https://a.example/1",
                "alice", "", {1, 0, 0}};
    posts[1] = {"p1", "another substantive comment for article two here", "https://a.example/2",
                "bob", "", {2, 0, 0}};
    posts[2] = {"p2", "this article url matches nothing in the table", "https://ghost.example/x",
                "carol", "", {0, 0, 0}};
    posts[3] = {"p3", "substantive but nobody ever scored this post", "https://a.example/1",
                "dave", "", {0, 0, 0}};
    posts[4] = {"p4", "https://a.example/1", "https://a.example/1", "erin", "", {0, 0, 0}};
    const std::vector<ScoreRecord> scores = {{"p0", 1.0}, {"p1", -2.0}, {"p2", 3.0}, {"p4", 0.0}};

    const TrainingDataset ds = join_dataset(articles, posts, scores);
    CHECK(ds.input_posts == 5);
    CHECK(ds.retained_posts == 2);
    CHECK(ds.dropped.at("dangling_article") == 1);
    CHECK(ds.dropped.at("missing_score") == 1);
    CHECK(ds.dropped.at("not_substantive") == 1);

    std::size_t dropped = 0;
    for (const auto& [_, n] : ds.dropped) dropped += static_cast<std::size_t>(n);
    CHECK(ds.retained_posts + dropped == ds.input_posts);

    REQUIRE(ds.groups.size() == 2);
    CHECK(ds.groups[0].article.url == "https://a.example/1");  // article file order
    CHECK(ds.groups[0].posts.size() == 1);
    CHECK(ds.groups[1].posts[0].score == doctest::Approx(-2.0));
}

TEST_CASE("join_dataset checks dangling before missing score") {
    const std::vector<ArticleRecord> articles = {{"https://a.example/1", "One"}};
    std::vector<PostRecord> posts(1);
    posts[0] = {"p0", "dangling and unscored at the same time right here", "https://ghost.example",
                "alice", "", {0, 0, 0}};
    const TrainingDataset ds = join_dataset(articles, posts, {});
    CHECK(ds.dropped.at("dangling_article") == 1);
    CHECK(ds.dropped.count("missing_score") == 0);
    CHECK(ds.groups.empty());
}
