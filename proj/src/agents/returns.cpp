#include "adaptswarm/agents/returns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::agents {

nn::Vector discounted_returns(const nn::Vector& rewards, double gamma) {
    if (rewards.empty()) throw PreconditionError("discounted_returns needs at least one reward");
    nn::Vector g(rewards.size());
    double running = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        running = rewards[i] + gamma * running;
        g[i] = running;
    }
    return g;
}

std::vector<nn::Vector> normalize_returns(const std::vector<nn::Vector>& returns) {
    std::size_t n = 0;
    double sum = 0.0;
    for (const nn::Vector& ep : returns) {
        n += ep.size();
        for (double g : ep) sum += g;
    }
    if (n < 2) throw PreconditionError("normalize_returns needs at least two steps");
    std::vector<nn::Vector> out = returns;
    const double mean = sum / static_cast<double>(n);
    // Rounding in the mean would otherwise leak through the floored std.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const nn::Vector& ep : returns) {
        for (double g : ep) {
            lo = std::min(lo, g);
            hi = std::max(hi, g);
        }
    }
    if (lo == hi) {
        for (nn::Vector& ep : out) std::fill(ep.begin(), ep.end(), 0.0);
        return out;
    }
    double sq = 0.0;
    for (const nn::Vector& ep : returns) {
        for (double g : ep) sq += (g - mean) * (g - mean);
    }
    const double sd = std::max(std::sqrt(sq / static_cast<double>(n)), kReturnStdFloor);
    for (nn::Vector& ep : out) {
        for (double& g : ep) g = (g - mean) / sd;
    }
    return out;
}

}  // namespace adaptswarm::agents
