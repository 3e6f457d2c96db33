#include "skeetrl/ued.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skeetrl/rng.hpp"

namespace skeetrl {

double regret(const RegretInputs& in, const UedConfig& cfg) {
    const double raw = in.best - in.avg;
    const double group[3] = {in.best, in.avg, in.rho};
    const double mean = (group[0] + group[1] + group[2]) / 3.0;
    double sq = 0.0;
    for (double g : group) sq += (g - mean) * (g - mean);
    const double sd = std::sqrt(sq / 3.0);
    if (sd < cfg.variance_floor) return 0.0;
    const double z = (raw - mean) / (sd + cfg.epsilon);
    return std::clamp(z * cfg.regret_scale, -cfg.clip, cfg.clip);
}

double decayed_priority(double priority, int updated_step, int now_step, double decay_tau) {
    const double delta = std::max(0, now_step - updated_step);
    if (decay_tau <= 0.0) return priority;
    return priority * std::exp(-delta / decay_tau);
}

void TaskBuffer::insert(UedTask task, int now_step) {
    for (UedTask& t : tasks_) {
        if (t.id == task.id) {
            t = task;
            return;
        }
    }
    if (tasks_.size() >= cfg_.capacity && !tasks_.empty()) {
        std::size_t victim = 0;
        double lowest = decayed_priority(tasks_[0].priority, tasks_[0].updated_step, now_step,
                                         cfg_.decay_tau);
        for (std::size_t i = 1; i < tasks_.size(); ++i) {
            const double d = decayed_priority(tasks_[i].priority, tasks_[i].updated_step,
                                              now_step, cfg_.decay_tau);
            if (d < lowest) {
                lowest = d;
                victim = i;
            }
        }
        tasks_.erase(tasks_.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    tasks_.push_back(task);
}

void TaskBuffer::update_priority(int id, double regret_value, int now_step) {
    for (UedTask& t : tasks_) {
        if (t.id == id) {
            t.priority = std::max(0.0, regret_value);
            t.updated_step = now_step;
            return;
        }
    }
    throw std::invalid_argument("TaskBuffer: unknown task id");
}

const UedTask* TaskBuffer::find(int id) const {
    for (const UedTask& t : tasks_) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

const UedTask& TaskBuffer::sample(int now_step, std::mt19937_64& rng) const {
    if (tasks_.empty()) throw std::logic_error("TaskBuffer: sample from empty buffer");

    const double u = uniform01(rng);
    if (u < cfg_.easy_mix) {
        std::vector<std::size_t> easy;
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            if (tasks_[i].is_easy) easy.push_back(i);
        }
        if (!easy.empty()) return tasks_[easy[uniform_index(rng, easy.size())]];
        // No easy tasks flagged: fall through to the priority draw.
    }

    std::vector<double> w(tasks_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        w[i] = decayed_priority(tasks_[i].priority, tasks_[i].updated_step, now_step,
                                cfg_.decay_tau);
        total += w[i];
    }
    if (total <= 0.0) return tasks_[uniform_index(rng, tasks_.size())];

    const double v = uniform01(rng) * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        cum += w[i];
        if (v < cum) return tasks_[i];
    }
    return tasks_.back();
}

}  // namespace skeetrl
