#include "chex/explore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace chex {

bool ChannelMask::is_retained(std::size_t channel) const {
    return std::binary_search(retained.begin(), retained.end(), channel);
}

std::vector<std::size_t> ChannelMask::pruned() const {
    std::vector<std::size_t> out;
    out.reserve(total_channels - retained.size());
    std::size_t next = 0;
    for (std::size_t j = 0; j < total_channels; ++j) {
        if (next < retained.size() && retained[next] == j) {
            ++next;
        } else {
            out.push_back(j);
        }
    }
    return out;
}

void MruCache::put(int layer, std::size_t channel, ArchivedChannel record) {
    entries_[{layer, channel}] = std::move(record);
}

ArchivedChannel MruCache::take(int layer, std::size_t channel) {
    auto it = entries_.find({layer, channel});
    if (it == entries_.end()) {
        throw IntegrityError("MruCache: no archived record for requested channel");
    }
    ArchivedChannel out = std::move(it->second);
    entries_.erase(it);
    return out;
}

const ArchivedChannel& MruCache::peek(int layer, std::size_t channel) const {
    auto it = entries_.find({layer, channel});
    if (it == entries_.end()) {
        throw IntegrityError("MruCache: no archived record for requested channel");
    }
    return it->second;
}

bool MruCache::contains(int layer, std::size_t channel) const {
    return entries_.count({layer, channel}) > 0;
}

bool MruCache::consistent_with(const ChannelMask& mask) const {
    for (std::size_t j = 0; j < mask.total_channels; ++j) {
        const bool cached = contains(mask.layer_id, j);
        if (mask.is_retained(j) == cached) return false;
    }
    return true;
}

double delta_at(const RegrowSchedule& sched, std::uint64_t step) {
    const std::uint64_t n = sched.num_steps();
    if (n == 0) throw std::invalid_argument("delta_at: schedule has no steps (dt > t_max?)");
    if (step > n) return 0.0;
    switch (sched.kind) {
        case SchedulerKind::kCosine: {
            const double x = static_cast<double>(step) * 3.14159265358979323846 /
                             static_cast<double>(n);
            return 0.5 * (1.0 + std::cos(x)) * sched.delta0;
        }
        case SchedulerKind::kLinear:
            return sched.delta0 *
                   (1.0 - static_cast<double>(step) / static_cast<double>(n));
        case SchedulerKind::kConstant:
            return sched.delta0;
    }
    return 0.0;
}

SparsityAllocation allocate_layer_sparsity(const std::vector<std::vector<double>>& gammas,
                                           double target_sparsity) {
    if (target_sparsity < 0.0 || target_sparsity >= 1.0) {
        throw std::invalid_argument("allocate_layer_sparsity: S must lie in [0, 1)");
    }
    if (gammas.empty()) throw InvalidInput("allocate_layer_sparsity: no layers");
    std::size_t total = 0;
    for (const auto& layer : gammas) {
        if (layer.empty()) throw InvalidInput("allocate_layer_sparsity: empty layer");
        for (double g : layer) {
            if (!std::isfinite(g)) throw InvalidInput("allocate_layer_sparsity: non-finite gamma");
        }
        total += layer.size();
    }

    SparsityAllocation out;
    out.global_target = target_sparsity;
    out.per_layer.assign(gammas.size(), 0.0);
    out.retained_counts.resize(gammas.size());

    if (target_sparsity == 0.0) {
        out.threshold = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < gammas.size(); ++l) {
            out.retained_counts[l] = gammas[l].size();
        }
        return out;
    }

    struct Entry {
        double magnitude;
        std::size_t channel;
        std::size_t layer;
    };
    std::vector<Entry> entries;
    entries.reserve(total);
    for (std::size_t l = 0; l < gammas.size(); ++l) {
        for (std::size_t j = 0; j < gammas[l].size(); ++j) {
            entries.push_back({std::abs(gammas[l][j]), j, l});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.magnitude != b.magnitude) return a.magnitude < b.magnitude;
        if (a.channel != b.channel) return a.channel < b.channel;
        return a.layer < b.layer;
    });

    const auto prune_total = static_cast<std::size_t>(
        std::ceil(target_sparsity * static_cast<double>(total)));
    out.threshold = entries[prune_total - 1].magnitude;

    std::vector<std::size_t> prune_counts(gammas.size(), 0);
    for (std::size_t i = 0; i < prune_total; ++i) ++prune_counts[entries[i].layer];

    for (std::size_t l = 0; l < gammas.size(); ++l) {
        const std::size_t c = gammas[l].size();
        if (prune_counts[l] >= c) prune_counts[l] = c - 1;  // a layer keeps >= 1 channel
        out.per_layer[l] = static_cast<double>(prune_counts[l]) / static_cast<double>(c);
        out.retained_counts[l] = c - prune_counts[l];
    }
    return out;
}

PruneResult prune_layer_css_count(const Matrix& w, std::size_t retain_count) {
    PruneResult out;
    out.retained = css_select(w, retain_count);
    std::size_t next = 0;
    for (std::size_t j = 0; j < w.cols(); ++j) {
        if (next < out.retained.size() && out.retained[next] == j) {
            ++next;
        } else {
            out.pruned.push_back(j);
        }
    }
    return out;
}

PruneResult prune_layer_css(const Matrix& w, double kappa) {
    if (kappa < 0.0 || kappa >= 1.0) {
        throw std::invalid_argument("prune_layer_css: kappa must lie in [0, 1)");
    }
    // The 1e-9 snap absorbs binary-representation noise in kappa (e.g. 2/3
    // stored as 0.666...6) without changing genuinely fractional counts.
    const double exact = (1.0 - kappa) * static_cast<double>(w.cols());
    auto retain = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    retain = std::max<std::size_t>(1, std::min(retain, w.cols()));
    return prune_layer_css_count(w, retain);
}

std::vector<std::size_t> sample_without_replacement(std::vector<double> probs, std::size_t k,
                                                    RngStream& rng) {
    std::vector<std::size_t> picks;
    k = std::min(k, probs.size());
    picks.reserve(k);
    for (std::size_t draw = 0; draw < k; ++draw) {
        double total = 0.0;
        for (double p : probs) total += p;
        if (total <= 0.0) {
            // remaining mass exhausted; fall back to lowest un-picked index
            for (std::size_t i = 0; i < probs.size(); ++i) {
                if (probs[i] >= 0.0 &&
                    std::find(picks.begin(), picks.end(), i) == picks.end()) {
                    picks.push_back(i);
                    break;
                }
            }
            continue;
        }
        const double u = rng.u01() * total;
        double acc = 0.0;
        std::size_t chosen = probs.size() - 1;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc && probs[i] > 0.0) {
                chosen = i;
                break;
            }
        }
        picks.push_back(chosen);
        probs[chosen] = 0.0;
    }
    return picks;
}

std::vector<std::size_t> regrow_layer(ChannelMask& mask, const MruCache& cache,
                                      const Matrix& active_w, std::size_t k, SamplingMode mode,
                                      RngStream& rng, const std::vector<char>& in_row_mask) {
    const std::vector<std::size_t> candidates = mask.pruned();
    if (k == 0 || candidates.empty()) return {};
    k = std::min(k, candidates.size());

    if (in_row_mask.size() != active_w.rows()) {
        throw ShapeError("regrow_layer: in_row_mask length must equal the row count");
    }

    Matrix cand(active_w.rows(), candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const ArchivedChannel& rec = cache.peek(mask.layer_id, candidates[c]);
        if (rec.out_weights.size() != active_w.rows()) {
            throw IntegrityError("regrow_layer: archived column has wrong length");
        }
        for (std::size_t r = 0; r < active_w.rows(); ++r) {
            cand(r, c) = in_row_mask[r] ? rec.out_weights[r] : 0.0;
        }
    }

    const std::vector<double> eps = orthogonality_scores(active_w, cand);

    std::vector<std::size_t> picked_local;
    switch (mode) {
        case SamplingMode::kImportance:
            picked_local = sample_without_replacement(softmax(eps), k, rng);
            break;
        case SamplingMode::kUniform:
            picked_local =
                sample_without_replacement(std::vector<double>(candidates.size(), 1.0), k, rng);
            break;
        case SamplingMode::kDeterministic: {
            std::vector<std::size_t> order(candidates.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
            picked_local.assign(order.begin(), order.begin() + static_cast<long>(k));
            break;
        }
    }

    std::vector<std::size_t> grown;
    grown.reserve(picked_local.size());
    for (std::size_t local : picked_local) grown.push_back(candidates[local]);
    std::sort(grown.begin(), grown.end());

    std::vector<std::size_t> merged;
    merged.reserve(mask.retained.size() + grown.size());
    std::merge(mask.retained.begin(), mask.retained.end(), grown.begin(), grown.end(),
               std::back_inserter(merged));
    mask.retained = std::move(merged);
    return grown;
}

ArchivedChannel restore_weights(const MruCache& cache, int layer, std::size_t channel,
                                InitScheme scheme, RngStream& rng, std::size_t in_fan_in) {
    const ArchivedChannel& archived = cache.peek(layer, channel);
    for (double v : archived.out_weights) {
        if (!std::isfinite(v)) throw IntegrityError("restore_weights: corrupted archived column");
    }
    for (double v : archived.in_weights) {
        if (!std::isfinite(v)) throw IntegrityError("restore_weights: corrupted archived row");
    }
    if (!std::isfinite(archived.gamma) || !std::isfinite(archived.beta)) {
        throw IntegrityError("restore_weights: corrupted archived scaling factors");
    }

    ArchivedChannel out = archived;
    switch (scheme) {
        case InitScheme::kMru:
            break;
        case InitScheme::kEma:
            if (archived.ema_out_weights.size() != archived.out_weights.size()) {
                throw IntegrityError("restore_weights: EMA values missing from archive");
            }
            out.out_weights = archived.ema_out_weights;
            break;
        case InitScheme::kZero:
            std::fill(out.out_weights.begin(), out.out_weights.end(), 0.0);
            std::fill(out.in_weights.begin(), out.in_weights.end(), 0.0);
            out.gamma = 0.0;
            out.beta = 0.0;
            out.ema_out_weights = out.out_weights;
            break;
        case InitScheme::kRandom: {
            const double out_scale =
                std::sqrt(2.0 / static_cast<double>(std::max<std::size_t>(1, out.out_weights.size())));
            const double in_scale =
                std::sqrt(2.0 / static_cast<double>(std::max<std::size_t>(1, in_fan_in)));
            for (double& v : out.out_weights) v = out_scale * rng.normal();
            for (double& v : out.in_weights) v = in_scale * rng.normal();
            out.gamma = 1.0;
            out.beta = 0.0;
            out.ema_out_weights = out.out_weights;
            break;
        }
    }
    return out;
}

const char* to_string(SchedulerKind k) {
    switch (k) {
        case SchedulerKind::kCosine: return "cosine";
        case SchedulerKind::kLinear: return "linear";
        case SchedulerKind::kConstant: return "constant";
    }
    return "?";
}

const char* to_string(SamplingMode m) {
    switch (m) {
        case SamplingMode::kImportance: return "importance";
        case SamplingMode::kUniform: return "uniform";
        case SamplingMode::kDeterministic: return "deterministic";
    }
    return "?";
}

const char* to_string(InitScheme s) {
    switch (s) {
        case InitScheme::kMru: return "mru";
        case InitScheme::kEma: return "ema";
        case InitScheme::kZero: return "zero";
        case InitScheme::kRandom: return "random";
    }
    return "?";
}

std::optional<SchedulerKind> scheduler_from_string(const std::string& s) {
    if (s == "cosine") return SchedulerKind::kCosine;
    if (s == "linear") return SchedulerKind::kLinear;
    if (s == "constant") return SchedulerKind::kConstant;
    return std::nullopt;
}

std::optional<SamplingMode> sampling_from_string(const std::string& s) {
    if (s == "importance") return SamplingMode::kImportance;
    if (s == "uniform") return SamplingMode::kUniform;
    if (s == "deterministic") return SamplingMode::kDeterministic;
    return std::nullopt;
}

std::optional<InitScheme> init_from_string(const std::string& s) {
    if (s == "mru") return InitScheme::kMru;
    if (s == "ema") return InitScheme::kEma;
    if (s == "zero") return InitScheme::kZero;
    if (s == "random") return InitScheme::kRandom;
    return std::nullopt;
}

}  // namespace chex
