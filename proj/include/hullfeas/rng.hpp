#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hullfeas {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of child `index` of a parent seed. Distinct (parent, index) pairs give
/// statistically independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix64(parent ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
}

/// A deterministic random stream. Two streams built from the same seed produce
/// identical sequences for identical call sequences.
class RngStream {
public:
    using engine_type = std::mt19937_64;

    explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform double in [0, 1) built from the top 53 bits of one engine output.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    engine_type& engine() noexcept { return engine_; }

    RngStream child(std::uint64_t index) const { return RngStream(derive_seed(seed_, index)); }

private:
    std::uint64_t seed_;
    engine_type engine_;
};

/// Seed for trial `trial` under a master seed.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) noexcept;

/// Streams used by one policy run: one per action, one for the policy itself.
///
/// The per-action streams depend only on the trial seed and the action index,
/// so every policy run with the same trial seed observes the same sample
/// sequence from each action no matter in which order the actions are pulled.
struct TrialStreams {
    std::vector<RngStream> actions;
    RngStream policy;

    static TrialStreams make(std::uint64_t trial_seed, int k);
};

} // namespace hullfeas
