#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chex/linalg.hpp"
#include "chex/matrix.hpp"
#include "chex/rng.hpp"

namespace chex {

class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SchedulerKind { kCosine, kLinear, kConstant };
enum class SamplingMode { kImportance, kUniform, kDeterministic };
enum class InitScheme { kMru, kEma, kZero, kRandom };

// Retained-channel index set of one layer. Always holds at least one channel.
struct ChannelMask {
    int layer_id = 0;
    std::size_t total_channels = 0;
    std::vector<std::size_t> retained;  // sorted, unique

    bool is_retained(std::size_t channel) const;
    std::vector<std::size_t> pruned() const;
};

// Everything a pruned channel needs to come back: its outgoing column, the
// matching incoming row of the next layer (or head), its scaling pair, and
// the EMA shadow of the outgoing column.
struct ArchivedChannel {
    std::vector<double> out_weights;
    std::vector<double> in_weights;
    double gamma = 0.0;
    double beta = 0.0;
    std::vector<double> ema_out_weights;
    std::uint64_t step_archived = 0;
};

class MruCache {
public:
    using Key = std::pair<int, std::size_t>;  // (layer_id, channel)

    void put(int layer, std::size_t channel, ArchivedChannel record);
    ArchivedChannel take(int layer, std::size_t channel);  // removes the entry
    const ArchivedChannel& peek(int layer, std::size_t channel) const;
    bool contains(int layer, std::size_t channel) const;
    std::size_t size() const { return entries_.size(); }

    const std::map<Key, ArchivedChannel>& entries() const { return entries_; }
    std::map<Key, ArchivedChannel>& entries() { return entries_; }

    // Cache keys for one layer must be exactly that layer's pruned set.
    bool consistent_with(const ChannelMask& mask) const;

private:
    std::map<Key, ArchivedChannel> entries_;
};

struct RegrowSchedule {
    double delta0 = 0.3;
    std::uint64_t t_max = 0;  // total exploration iterations
    std::uint64_t dt = 1;     // iterations between steps
    SchedulerKind kind = SchedulerKind::kCosine;

    std::uint64_t num_steps() const { return dt == 0 ? 0 : t_max / dt; }
};

// Regrowing factor at the given step index; 0 beyond the final step.
double delta_at(const RegrowSchedule& sched, std::uint64_t step);

struct SparsityAllocation {
    double global_target = 0.0;                // S
    std::vector<double> per_layer;             // kappa^l
    double threshold = 0.0;                    // q(Gamma, S)
    std::vector<std::size_t> retained_counts;  // ceil((1 - kappa^l) C^l), post-clamp
};

// Global S-th percentile allocation over scaling-factor magnitudes. The
// pruned population is the first ceil(S*N) entries ordered by
// (magnitude, channel index, layer index); ties therefore spread across
// layers instead of wiping out whichever layer comes first. Each layer
// keeps at least one channel.
SparsityAllocation allocate_layer_sparsity(const std::vector<std::vector<double>>& gammas,
                                           double target_sparsity);

struct PruneResult {
    std::vector<std::size_t> retained;
    std::vector<std::size_t> pruned;
};

// Leverage-score CSS pruning: retains the ceil((1-kappa)*C) columns with
// the top leverage scores.
PruneResult prune_layer_css(const Matrix& w, double kappa);
PruneResult prune_layer_css_count(const Matrix& w, std::size_t retain_count);

// k draws without replacement from the categorical distribution given by
// probs, by iterated renormalized draws.
std::vector<std::size_t> sample_without_replacement(std::vector<double> probs, std::size_t k,
                                                    RngStream& rng);

// Picks min(k, #candidates) pruned channels to re-activate and adds them to
// the mask. Candidate scores are Eq-style orthogonality values of the cached
// MRU columns (rows of pruned input channels zeroed via in_row_mask) against
// the live active columns. Does not touch weights; the caller splices the
// restored records back into the network.
std::vector<std::size_t> regrow_layer(ChannelMask& mask, const MruCache& cache,
                                      const Matrix& active_w, std::size_t k, SamplingMode mode,
                                      RngStream& rng, const std::vector<char>& in_row_mask);

// The record to splice back for a regrown channel under the given scheme.
// Shapes always come from the cache entry; in_fan_in only matters for the
// random scheme (the incoming row lives in the next layer, whose fan-in is
// this layer's channel count).
ArchivedChannel restore_weights(const MruCache& cache, int layer, std::size_t channel,
                                InitScheme scheme, RngStream& rng, std::size_t in_fan_in);

const char* to_string(SchedulerKind k);
const char* to_string(SamplingMode m);
const char* to_string(InitScheme s);

std::optional<SchedulerKind> scheduler_from_string(const std::string& s);
std::optional<SamplingMode> sampling_from_string(const std::string& s);
std::optional<InitScheme> init_from_string(const std::string& s);

}  // namespace chex
