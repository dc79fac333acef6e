#pragma once

#include <cstdint>
#include <string_view>

namespace hullfeas {

/// Which closed form the anytime confidence margin uses.
enum class MarginForm {
    /// sqrt(ln(n^2 * 5k / (3 delta)) / (2n)); the form used in the simulation study.
    standard,
    /// sqrt(ln(4 k n^2 / delta) / (2n)). Each Hoeffding term is delta / (2 k n^2),
    /// so the summed deviation probability stays below delta / k.
    conservative,
};

std::string_view to_string(MarginForm form);
MarginForm parse_margin_form(std::string_view name);

struct MarginSpec {
    double delta = 0.01;
    int k = 1;
    MarginForm form = MarginForm::standard;
};

/// Half-width B(n, delta) of an action's confidence region after n samples.
/// Throws std::domain_error for n == 0.
double margin(std::int64_t n, const MarginSpec& spec);

struct BudgetReport {
    double partial_sum; ///< sum_{n <= horizon} 2 exp(-2 n B(n)^2)
    double budget;      ///< delta / k
};

/// Sums the two-sided Hoeffding deviation bound over n = 1..horizon and
/// reports it next to the per-action budget delta / k.
///
/// The standard margin gives 6 delta / (5 k n^2) per term, so the sum tends to
/// (pi^2 / 5) delta / k, roughly twice the budget. The report exposes that
/// number rather than hiding it.
BudgetReport validate_budget(const MarginSpec& spec, std::int64_t horizon);

} // namespace hullfeas
