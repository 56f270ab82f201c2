#include "torwalk/measure.hpp"

#include <cmath>
#include <set>

#include "torwalk/errors.hpp"

namespace torwalk {

void IncrementMeasure::validate() const {
    if (d <= 0) throw DomainError("measure dimension must be positive");
    if (points.empty()) throw DomainError("measure has empty support");
    if (points.size() != weights.size()) throw DomainError("points/weights length mismatch");
    std::set<std::vector<long long>> seen;
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != d) throw DomainError("support point dimension mismatch");
        if (!seen.insert(p).second) throw DomainError("duplicate support point");
    }
    Rational total = 0;
    for (const auto& w : weights) {
        if (w <= 0) throw DomainError("weights must be positive");
        total += w;
    }
    if (exact) {
        if (total != 1) throw DomainError("weights must sum to exactly 1");
    } else {
        double err = std::abs(static_cast<double>(total) - 1.0);
        if (err > 1e-12) throw DomainError("weights must sum to 1 within 1e-12");
    }
}

IncrementMeasure IncrementMeasure::uniform(std::vector<std::vector<long long>> pts) {
    IncrementMeasure mu;
    if (pts.empty()) throw DomainError("empty support");
    mu.d = static_cast<int>(pts[0].size());
    mu.points = std::move(pts);
    Rational w(1, static_cast<long long>(mu.points.size()));
    mu.weights.assign(mu.points.size(), w);
    mu.validate();
    return mu;
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw ParseError("bad rational literal: " + s);
    }
}

double shannon_entropy(const std::vector<double>& probs) {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

double shannon_entropy(const IncrementMeasure& mu) {
    double h = 0.0;
    for (const auto& w : mu.weights) {
        double p = static_cast<double>(w);
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

} // namespace torwalk
