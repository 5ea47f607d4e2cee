#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "simwave/errors.hpp"

namespace simwave {

// Per-layer medium constants.  alpha/beta drive the first system, gamma/tau
// the second; all are constant per layer and strictly positive.
struct MediumCoefficients {
    std::vector<double> alpha, beta, gamma, tau;

    std::size_t layers() const { return alpha.size(); }

    void check_valid() const {
        if (alpha.empty() || beta.size() != alpha.size() ||
            gamma.size() != alpha.size() || tau.size() != alpha.size())
            throw ConfigError("coefficient lists must be non-empty and equally sized");
        for (std::size_t k = 0; k < alpha.size(); ++k) {
            if (!(alpha[k] > 0.0 && beta[k] > 0.0 && gamma[k] > 0.0 && tau[k] > 0.0))
                throw ConfigError("coefficients must be strictly positive");
        }
    }
};

struct HypothesisReport {
    bool monotone_ab = true;   // alpha^{k-1} <= alpha^k and beta^{k-1} <= beta^k
    bool monotone_gt = true;   // same for gamma, tau
    bool compatible = true;    // alpha.beta == gamma.tau and beta^{k-1}tau^k == beta^k tau^{k-1}
    double max_monotone_violation = 0.0;  // largest relative decrease across an interface
    double max_rel_residual = 0.0;        // largest relative residual of the identities
    std::vector<double> wave_speeds;      // sqrt(alpha_k beta_k) per layer
};

inline constexpr double kCoefficientTolerance = 1e-12;

inline HypothesisReport validate_monotonicity(const MediumCoefficients& c) {
    c.check_valid();
    HypothesisReport r;
    auto scan = [&](const std::vector<double>& v, bool& flag) {
        for (std::size_t k = 1; k < v.size(); ++k) {
            double drop = (v[k - 1] - v[k]) / v[k - 1];
            if (drop > kCoefficientTolerance) flag = false;
            r.max_monotone_violation = std::max(r.max_monotone_violation, drop);
        }
    };
    scan(c.alpha, r.monotone_ab);
    scan(c.beta, r.monotone_ab);
    scan(c.gamma, r.monotone_gt);
    scan(c.tau, r.monotone_gt);
    return r;
}

inline HypothesisReport validate_compatibility(const MediumCoefficients& c) {
    c.check_valid();
    HypothesisReport r;
    for (std::size_t k = 0; k < c.layers(); ++k) {
        double lhs = c.alpha[k] * c.beta[k];
        double rhs = c.gamma[k] * c.tau[k];
        double res = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
        r.max_rel_residual = std::max(r.max_rel_residual, res);
    }
    for (std::size_t k = 1; k < c.layers(); ++k) {
        double lhs = c.beta[k - 1] * c.tau[k];
        double rhs = c.beta[k] * c.tau[k - 1];
        double res = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
        r.max_rel_residual = std::max(r.max_rel_residual, res);
    }
    r.compatible = r.max_rel_residual <= kCoefficientTolerance;
    return r;
}

inline double wave_speed(const MediumCoefficients& c, std::size_t k) {
    return std::sqrt(c.alpha.at(k) * c.beta.at(k));
}

inline double wave_speed_b(const MediumCoefficients& c, std::size_t k) {
    return std::sqrt(c.gamma.at(k) * c.tau.at(k));
}

inline double max_wave_speed(const MediumCoefficients& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.layers(); ++k)
        s = std::max({s, wave_speed(c, k), wave_speed_b(c, k)});
    return s;
}

inline HypothesisReport validate_all(const MediumCoefficients& c) {
    HypothesisReport mono = validate_monotonicity(c);
    HypothesisReport comp = validate_compatibility(c);
    HypothesisReport r;
    r.monotone_ab = mono.monotone_ab;
    r.monotone_gt = mono.monotone_gt;
    r.max_monotone_violation = mono.max_monotone_violation;
    r.compatible = comp.compatible;
    r.max_rel_residual = comp.max_rel_residual;
    for (std::size_t k = 0; k < c.layers(); ++k) r.wave_speeds.push_back(wave_speed(c, k));
    return r;
}

} // namespace simwave
