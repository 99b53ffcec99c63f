#include "labelgrid/log_odds.hpp"

#include <algorithm>

namespace labelgrid {

double logit(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("logit: probability must lie in (0, 1), got " +
                                std::to_string(p));
    // Evaluate on the upper half so logit(1 - p) == -logit(p) bit for bit.
    if (p < 0.5) {
        const double q = 1.0 - p;
        return -std::log(q / (1.0 - q));
    }
    return std::log(p / (1.0 - p));
}

double probability(double log_odds)
{
    if (!std::isfinite(log_odds))
        throw std::domain_error("probability: log-odds must be finite");
    return 1.0 - 1.0 / (1.0 + std::exp(log_odds));
}

double clamp_probability(double p, double p_min)
{
    return std::clamp(p, p_min, 1.0 - p_min);
}

} // namespace labelgrid
