#include "skeetrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "skeetrl/rng.hpp"
#include "skeetrl/text.hpp"

namespace skeetrl {

std::string domain_of(std::string_view url) {
    std::string_view rest = url;
    if (rest.rfind("https://", 0) == 0) rest.remove_prefix(8);
    else if (rest.rfind("http://", 0) == 0) rest.remove_prefix(7);
    const std::size_t cut = rest.find_first_of("/?#");
    if (cut != std::string_view::npos) rest = rest.substr(0, cut);
    return std::string(rest);
}

// ------------------------ action templates ------------------------

const std::vector<ResponseTemplate>& action_templates() {
    static const std::vector<ResponseTemplate> templates = {
        {"headline_emoji", "{title} \xF0\x9F\x9A\x80 {url}"},
        {"question", "What does {title} mean for {domain}? {url}"},
        {"summary", "Quick take: {title}. The details are worth your time. {url}"},
        {"insight", "Key insight from {domain}: {title} {url}"},
        {"why_matters", "Why {title} matters right now: {url}"},
        {"thread_hook", "Read this before you form an opinion on {title}. {url}"},
        {"data_point", "The numbers behind {title} tell a bigger story. {url}"},
        {"contrarian", "Everyone seems wrong about {title}. Here is why. {url}"},
        {"explainer", "{title}, explained in one post. {url}"},
        {"curiosity", "I did not expect this from {domain}: {title} {url}"},
        {"takeaway", "One takeaway from {title}: follow the incentives. {url}"},
        {"bold_claim", "{title} changes more than you think. {url}"},
        {"practical", "How {title} affects your day to day: {url}"},
        {"historical", "{title} echoes a pattern we have seen before. {url}"},
        {"skeptic", "Healthy skepticism about {title} is warranted. {url}"},
        {"enthusiast", "Genuinely excited about {title}. {url}"},
        {"analyst", "Three forces driving {title}: cost, scale, trust. {url}"},
        {"observer", "Watching {domain} closely after {title}. {url}"},
        {"quote_style", "'{title}' is the most interesting thing I read today. {url}"},
        {"forecast", "Prediction: {title} will look obvious in five years. {url}"},
        {"minimal_link", "Worth a look today: {title} {url}"},
        {"domain_tag", "From {domain} this morning: {title} {url}"},
        // Degenerate tail: every gate and penalty gets a live target.
        {"echo_trap", "{prompt}"},
        {"ngram_trap",
         "use the power of {domain} to create the future use the power of {domain} to create "
         "the future {url}"},
        {"dash_trap", "-{domain} -{domain} -{domain} {url}"},
        {"run_trap", "{domain} {domain} {domain} {domain} never change {url}"},
        {"short_trap", "ok"},
        {"lowalpha_trap", "!!! ??? 111 222 333 $$$ ((( )))"},
        {"refusal_trap", "I'm sorry, I cannot write a post about this topic. {url}"},
        {"empty_trap", "   "},
        {"hashtag_trap", "#news #news #news #news {url}"},
        {"clickbait", "You will not believe what {title} reveals. {url}"},
    };
    return templates;
}

const std::vector<int>& trap_actions() {
    static const std::vector<int> traps = {22, 23, 24, 25, 26, 27, 28, 29, 30};
    return traps;
}

static void replace_all(std::string& s, std::string_view key, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
        s.replace(pos, key.size(), value);
        pos += value.size();
    }
}

std::string render_template(const ResponseTemplate& tpl, const ArticleContext& ctx,
                            std::string_view prompt, std::size_t max_scalars, bool* truncated) {
    std::string out = tpl.pattern;
    replace_all(out, "{title}", ctx.title);
    replace_all(out, "{url}", ctx.url);
    replace_all(out, "{domain}", ctx.domain);
    replace_all(out, "{prompt}", prompt);
    return truncate_words(out, max_scalars, truncated);
}

// ------------------------ prompts ------------------------

std::string base_prompt(const ArticleContext& ctx) {
    return "Write a skeet about this article: " + ctx.title + " (" + ctx.url + ")";
}

const std::vector<std::string>& prompt_variants() {
    static const std::vector<std::string> variants = {
        "",  // base prompt, unchanged
        "Be creative and engaging.",
        "Keep it concise and compelling.",
        "Make it catchy and shareable.",
        "Focus on the key insight.",
        "Add your unique perspective.",
        "Make it memorable.",
        "Be thoughtful and clear.",
    };
    return variants;
}

std::string prompt_for(const ArticleContext& ctx, int variant) {
    const auto& v = prompt_variants();
    const std::string& suffix = v[static_cast<std::size_t>(variant) % v.size()];
    std::string p = base_prompt(ctx);
    if (!suffix.empty()) {
        p += ' ';
        p += suffix;
    }
    return p;
}

// ------------------------ policy ------------------------

ToyPolicy ToyPolicy::zeros(int n_features, int n_actions) {
    ToyPolicy p;
    p.n_features = n_features;
    p.n_actions = n_actions;
    p.params.assign(static_cast<std::size_t>(n_features) * n_actions, 0.0);
    return p;
}

std::vector<double> logits_of(const ToyPolicy& p, const std::vector<double>& features) {
    if (features.size() != static_cast<std::size_t>(p.n_features)) {
        throw std::invalid_argument("logits_of: feature size mismatch");
    }
    std::vector<double> z(static_cast<std::size_t>(p.n_actions), 0.0);
    for (int f = 0; f < p.n_features; ++f) {
        const double x = features[static_cast<std::size_t>(f)];
        if (x == 0.0) continue;
        for (int a = 0; a < p.n_actions; ++a) z[static_cast<std::size_t>(a)] += p.at(f, a) * x;
    }
    return z;
}

static std::vector<double> softmax_scaled(const std::vector<double>& logits, double temperature) {
    const double t = temperature > 0.0 ? temperature : 1.0;
    std::vector<double> p(logits.size());
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp((logits[i] - zmax) / t);
        sum += p[i];
    }
    for (double& x : p) x /= sum;
    return p;
}

std::vector<double> action_distribution(const ToyPolicy& p, const std::vector<double>& features) {
    return softmax_scaled(logits_of(p, features), p.temperature);
}

std::vector<std::pair<int, double>> restricted_distribution(
    const ToyPolicy& p, const std::vector<double>& features, const SamplingConfig& sampling) {
    const std::vector<double> logits = logits_of(p, features);
    const std::size_t n = logits.size();

    // Greedy degenerations first: zero temperature or top_k == 1.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    if (sampling.temperature <= 0.0 || sampling.top_k == 1) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (logits[i] > logits[best]) best = i;
        }
        return {{static_cast<int>(best), 1.0}};
    }

    const std::vector<double> probs = softmax_scaled(logits, sampling.temperature);
    // Descending probability, index ascending on ties: deterministic order.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return probs[a] != probs[b] ? probs[a] > probs[b] : a < b;
    });

    std::size_t keep = n;
    if (sampling.top_k > 0) keep = std::min<std::size_t>(keep, static_cast<std::size_t>(sampling.top_k));

    // Nucleus cut: smallest prefix of the sorted list reaching top_p.
    if (sampling.top_p > 0.0 && sampling.top_p < 1.0) {
        double cum = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < keep; ++i) {
            cum += probs[order[i]];
            ++used;
            if (cum >= sampling.top_p) break;
        }
        keep = used;
    }

    double mass = 0.0;
    for (std::size_t i = 0; i < keep; ++i) mass += probs[order[i]];
    std::vector<std::pair<int, double>> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        out.emplace_back(static_cast<int>(order[i]), probs[order[i]] / mass);
    }
    return out;
}

Rollout sample_responses(const ToyPolicy& p, const std::vector<double>& features,
                         const ArticleContext& ctx, int task_id, int n,
                         const SamplingConfig& sampling, int prompt_variant,
                         std::mt19937_64& rng) {
    const auto restricted = restricted_distribution(p, features, sampling);
    const std::vector<double> full = action_distribution(p, features);
    const auto& templates = action_templates();

    Rollout r;
    r.task_id = task_id;
    r.prompt_variant = prompt_variant;
    r.prompt = prompt_for(ctx, prompt_variant);
    r.actions.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int action = restricted.back().first;
        const double u = uniform01(rng);
        double cum = 0.0;
        for (const auto& [a, prob] : restricted) {
            cum += prob;
            if (u < cum) {
                action = a;
                break;
            }
        }
        bool truncated = false;
        std::string text = render_template(templates[static_cast<std::size_t>(action)], ctx,
                                           r.prompt, static_cast<std::size_t>(sampling.max_tokens),
                                           &truncated);
        r.actions.push_back(action);
        r.responses.push_back(std::move(text));
        r.logprobs.push_back(std::log(full[static_cast<std::size_t>(action)]));
        r.truncated.push_back(truncated ? 1 : 0);
    }
    return r;
}

double exact_kl(const ToyPolicy& p, const ToyPolicy& q, const std::vector<double>& features) {
    const std::vector<double> pp = action_distribution(p, features);
    const std::vector<double> qq = action_distribution(q, features);
    if (pp.size() != qq.size()) throw std::invalid_argument("exact_kl: action space mismatch");
    double kl = 0.0;
    for (std::size_t a = 0; a < pp.size(); ++a) kl += pp[a] * std::log(pp[a] / qq[a]);
    return std::max(0.0, kl);  // exact formula can round to -1e-17 for p == q
}

// ------------------------ loss and gradient ------------------------

LossGrad loss_and_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                           const std::vector<double>& features, const std::vector<int>& actions,
                           const std::vector<double>& advantages, const GspoConfig& cfg) {
    if (actions.size() != advantages.size() || actions.empty()) {
        throw std::invalid_argument("loss_and_gradient: action/advantage length mismatch");
    }
    const std::vector<double> pp = action_distribution(policy, features);
    const std::vector<double> qq = action_distribution(reference, features);
    const double n = static_cast<double>(actions.size());
    const double t = policy.temperature > 0.0 ? policy.temperature : 1.0;

    double kl = 0.0;
    for (std::size_t a = 0; a < pp.size(); ++a) kl += pp[a] * std::log(pp[a] / qq[a]);
    kl = std::max(0.0, kl);

    double loss = 0.0;
    std::vector<double> logprobs(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
        logprobs[i] = std::log(pp[static_cast<std::size_t>(actions[i])]);
    }
    loss = policy_loss(advantages, logprobs, kl, cfg);

    // d loss / d scaled-logit s_a, with s = logits / temperature:
    //   policy term: (sum_i A_i) / n * p_a - (1/n) * sum_{i: a_i = a} A_i
    //   KL term (when over budget): kl_weight * p_a * (log(p_a/q_a) - KL)
    const std::size_t K = pp.size();
    std::vector<double> dL_ds(K, 0.0);
    double adv_sum = 0.0;
    for (double a : advantages) adv_sum += a;
    for (std::size_t a = 0; a < K; ++a) dL_ds[a] = (adv_sum / n) * pp[a];
    for (std::size_t i = 0; i < actions.size(); ++i) {
        dL_ds[static_cast<std::size_t>(actions[i])] -= advantages[i] / n;
    }
    if (kl > cfg.kl_target) {
        for (std::size_t a = 0; a < K; ++a) {
            dL_ds[a] += cfg.kl_weight * pp[a] * (std::log(pp[a] / qq[a]) - kl);
        }
    }

    LossGrad out;
    out.loss = loss;
    out.kl = kl;
    out.grad.assign(policy.params.size(), 0.0);
    for (int f = 0; f < policy.n_features; ++f) {
        const double x = features[static_cast<std::size_t>(f)];
        if (x == 0.0) continue;
        for (std::size_t a = 0; a < K; ++a) {
            out.grad[static_cast<std::size_t>(f) * K + a] = x * dL_ds[a] / t;
        }
    }
    return out;
}

// ------------------------ checkpoints ------------------------

void save_checkpoint(const std::string& path, const ToyPolicy& p, int step) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
    out << p.n_features << ' ' << p.n_actions << ' ' << step << '\n';
    char buf[64];
    for (int f = 0; f < p.n_features; ++f) {
        for (int a = 0; a < p.n_actions; ++a) {
            std::snprintf(buf, sizeof(buf), "%.17g", p.at(f, a));
            out << buf << (a + 1 == p.n_actions ? '\n' : ' ');
        }
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

ToyPolicy load_checkpoint(const std::string& path, int* step_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    int nf = 0, na = 0, step = 0;
    if (!(in >> nf >> na >> step) || nf <= 0 || na <= 0) {
        throw std::runtime_error("checkpoint: bad header in " + path);
    }
    ToyPolicy p = ToyPolicy::zeros(nf, na);
    for (double& v : p.params) {
        if (!(in >> v)) throw std::runtime_error("checkpoint: truncated matrix in " + path);
    }
    if (step_out) *step_out = step;
    return p;
}

}  // namespace skeetrl
