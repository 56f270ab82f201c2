#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torwalk/intmat.hpp"

namespace torwalk {

// Finitely supported increment distribution on Z^d. Weights are exact
// rationals; float input is converted to its exact binary value and flagged.
struct IncrementMeasure {
    int d = 0;
    std::vector<std::vector<long long>> points;
    std::vector<Rational> weights;
    bool exact = true;

    size_t size() const { return points.size(); }

    // Throws DomainError unless weights are positive, points distinct, and
    // the total is exactly 1 (exact mode) or within 1e-12 of 1 (float mode).
    void validate() const;

    // Uniform measure on the given points.
    static IncrementMeasure uniform(std::vector<std::vector<long long>> pts);
};

// "p/q" or a plain integer.
Rational parse_rational(const std::string& s);

// Shannon entropy in nats; 0*log(0) = 0.
double shannon_entropy(const std::vector<double>& probs);
double shannon_entropy(const IncrementMeasure& mu);

} // namespace torwalk
