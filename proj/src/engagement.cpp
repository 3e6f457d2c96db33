#include "skeetrl/engagement.hpp"

#include <algorithm>
#include <numeric>

#include "skeetrl/text.hpp"

namespace skeetrl {

double composite_score(const EngagementCounts& c, const EngagementWeights& w) {
    return w.reposts * c.reposts + w.replies * c.replies + w.likes * c.likes;
}

double baseline(const UserHistory& history, int window) {
    if (history.scores.empty() || window <= 0) return 0.0;
    const std::size_t n = history.scores.size();
    const std::size_t take = std::min<std::size_t>(n, static_cast<std::size_t>(window));
    double sum = 0.0;
    for (std::size_t i = n - take; i < n; ++i) sum += history.scores[i];
    return sum / static_cast<double>(take);
}

double normalized_score(double raw_score, double baseline_score) {
    return raw_score - baseline_score;
}

bool is_substantive(std::string_view text) {
    return scalar_count(strip_urls(text)) > 16;
}

static bool has_link(std::string_view text) {
    return text.find("http://") != std::string_view::npos ||
           text.find("https://") != std::string_view::npos;
}

UserHistory build_history(const std::vector<PostRecord>& posts, std::string_view handle,
                          const EngagementWeights& w) {
    struct Entry {
        std::string ts;
        std::size_t file_pos;
        double score;
    };
    std::vector<Entry> entries;
    bool all_timestamped = true;
    for (std::size_t i = 0; i < posts.size(); ++i) {
        const PostRecord& p = posts[i];
        if (p.author != handle) continue;
        if (!has_link(p.text) || !is_substantive(p.text)) continue;
        if (p.created_at.empty()) all_timestamped = false;
        entries.push_back({p.created_at, i, composite_score(p.counts, w)});
    }
    if (all_timestamped && !entries.empty()) {
        // ISO-8601 timestamps sort lexicographically; file order breaks ties.
        std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return a.ts != b.ts ? a.ts < b.ts : a.file_pos < b.file_pos;
        });
    }
    UserHistory h;
    h.scores.reserve(entries.size());
    for (const Entry& e : entries) h.scores.push_back(e.score);
    return h;
}

}  // namespace skeetrl
