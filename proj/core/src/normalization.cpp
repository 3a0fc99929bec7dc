#include "wowbench/normalization.hpp"

#include <cmath>
#include <stdexcept>

namespace wowbench {

double clip(double u, double a, double b) {
    if (a > b) throw std::invalid_argument("clip: lower bound exceeds upper bound");
    return std::min(std::max(u, a), b);
}

double prescale(double x, const MetricSpec& spec) {
    const double clipped = clip(x, spec.anchor_low, spec.anchor_high);
    const double scaled = (clipped - spec.anchor_low) / (spec.anchor_high - spec.anchor_low);
    return spec.direction == Direction::HIB ? scaled : 1.0 - scaled;
}

namespace {

double sigmoid(double t) {
    return 1.0 / (1.0 + std::exp(-t));
}

}  // namespace

double apply_family(double xhat, Family family, double theta, double epsilon) {
    if (!(theta > 0.0)) throw std::invalid_argument("apply_family: theta must be positive");
    switch (family) {
        case Family::Gamma:
            return std::pow(xhat, theta);
        case Family::LogitT: {
            // epsilon clamp applies only inside logit; the input is otherwise
            // untouched.
            const double c = clip(xhat, epsilon, 1.0 - epsilon);
            const double logit = std::log(c / (1.0 - c));
            return sigmoid(logit / theta);
        }
        case Family::TanhKappa:
            return 0.5 * (std::tanh(theta * (2.0 * xhat - 1.0)) + 1.0);
    }
    throw std::invalid_argument("apply_family: unknown family");
}

DesirabilityScore desirability(double x, const MetricSpec& spec, double epsilon) {
    DesirabilityScore score;
    score.metric_id = spec.metric_id;
    score.value = 100.0 * apply_family(prescale(x, spec), spec.family, spec.theta, epsilon);
    return score;
}

}  // namespace wowbench
