#pragma once

#include "wowbench/registry.hpp"

namespace wowbench {

/// Desirability score s = 100 * f(prescale(x)). Open interval (0,100) for
/// LogitT/TanhKappa; Gamma attains the closed endpoints 0 and 100. At double
/// precision LogitT saturates to the interval ends for extreme temperatures
/// (logit(1-eps)/T beyond ~36).
struct DesirabilityScore {
    double value = 0.0;
    std::string metric_id;
};

/// min(max(u, a), b). Throws std::invalid_argument when a > b.
double clip(double u, double a, double b);

/// Anchored pre-scale to [0,1]. HIB: (clip(x;L,U)-L)/(U-L); LIB: 1 - that.
double prescale(double x, const MetricSpec& spec);

/// The three single-parameter monotone mappings on [0,1]:
///   Gamma:     x^theta
///   LogitT:    sigma(logit(x)/theta), x clamped to [eps, 1-eps] inside logit
///   TanhKappa: (tanh(theta*(2x-1)) + 1) / 2
/// Throws std::invalid_argument on nonpositive theta.
double apply_family(double xhat, Family family, double theta, double epsilon);

DesirabilityScore desirability(double x, const MetricSpec& spec, double epsilon);

}  // namespace wowbench
