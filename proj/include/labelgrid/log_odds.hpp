#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace labelgrid {

// log(p / (1 - p)). Throws std::domain_error unless 0 < p < 1.
double logit(double p);

// 1 - 1 / (1 + exp(l)). Throws std::domain_error for non-finite l.
double probability(double log_odds);

// Clamp a classifier output into [p_min, 1 - p_min] so logit stays finite.
double clamp_probability(double p, double p_min);

inline double clamp_log_odds(double l, double bound)
{
    if (l > bound) return bound;
    if (l < -bound) return -bound;
    return l;
}

} // namespace labelgrid
