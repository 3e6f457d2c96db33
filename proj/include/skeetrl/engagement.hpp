#pragma once

#include <string_view>
#include <vector>

#include "skeetrl/records.hpp"

namespace skeetrl {

struct EngagementWeights {
    double reposts = 9.0;
    double replies = 4.0;
    double likes = 1.0;
};

// Weighted composite of the raw counts. Linear in each channel.
double composite_score(const EngagementCounts& counts, const EngagementWeights& w);

// Composite scores of a user's substantive link posts, most recent last.
struct UserHistory {
    std::vector<double> scores;
};

// Mean of the last `window` history entries; all of them when fewer exist;
// 0.0 for an empty history (new users compete against zero, not a prior).
double baseline(const UserHistory& history, int window = 5);

// Engagement relative to the author's own norm.
double normalized_score(double raw_score, double baseline_score);

// True when, after removing URLs, more than 16 Unicode scalars remain.
bool is_substantive(std::string_view text);

// Collects the handle's substantive link posts (text contains a URL) into a
// history. Posts are taken in file order; when every post of the handle has a
// timestamp, (timestamp, file order) sorts them instead. File order is the
// recency order fallback: most recent last.
UserHistory build_history(const std::vector<PostRecord>& posts, std::string_view handle,
                          const EngagementWeights& w);

}  // namespace skeetrl
