#include "hullfeas/confidence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hullfeas {

std::string_view to_string(MarginForm form) {
    switch (form) {
    case MarginForm::standard: return "standard";
    case MarginForm::conservative: return "conservative";
    }
    return "unknown";
}

MarginForm parse_margin_form(std::string_view name) {
    if (name == "standard") return MarginForm::standard;
    if (name == "conservative") return MarginForm::conservative;
    throw std::invalid_argument("unknown margin form '" + std::string(name) + "'");
}

double margin(std::int64_t n, const MarginSpec& spec) {
    if (n < 1) throw std::domain_error("confidence margin is undefined for n = 0");
    const double nn = static_cast<double>(n);
    double log_arg = 0.0;
    switch (spec.form) {
    case MarginForm::standard:
        log_arg = nn * nn * (5.0 * spec.k / (3.0 * spec.delta));
        break;
    case MarginForm::conservative:
        log_arg = 4.0 * spec.k * nn * nn / spec.delta;
        break;
    }
    return std::sqrt(std::log(log_arg) / (2.0 * nn));
}

BudgetReport validate_budget(const MarginSpec& spec, std::int64_t horizon) {
    if (horizon < 1) throw std::domain_error("horizon must be at least 1");
    double sum = 0.0;
    for (std::int64_t n = 1; n <= horizon; ++n) {
        const double b = margin(n, spec);
        sum += 2.0 * std::exp(-2.0 * static_cast<double>(n) * b * b);
    }
    return {sum, spec.delta / spec.k};
}

} // namespace hullfeas
