#include "hullfeas/rng.hpp"

namespace hullfeas {

namespace {
constexpr std::uint64_t kActionBranch = 0;
constexpr std::uint64_t kPolicyBranch = 1;
} // namespace

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) noexcept {
    return derive_seed(master, trial);
}

TrialStreams TrialStreams::make(std::uint64_t trial_seed, int k) {
    const std::uint64_t action_root = derive_seed(trial_seed, kActionBranch);
    TrialStreams streams{{}, RngStream(derive_seed(trial_seed, kPolicyBranch))};
    streams.actions.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        streams.actions.emplace_back(derive_seed(action_root, static_cast<std::uint64_t>(i)));
    }
    return streams;
}

} // namespace hullfeas
