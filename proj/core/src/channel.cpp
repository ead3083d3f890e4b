#include "remest/channel.hpp"

#include <sstream>

namespace remest {

ChannelParams ChannelParams::make(double alpha, double n0w,
                                  std::optional<FadingParams> fading) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        std::ostringstream os;
        os << "channel alpha must lie in (0, 1], got " << alpha;
        throw ConfigError(os.str());
    }
    if (!(n0w > 0.0)) {
        std::ostringstream os;
        os << "channel n0w must be positive, got " << n0w;
        throw ConfigError(os.str());
    }
    if (fading && !(fading->mean_gain > 0.0)) {
        throw ConfigError("fading mean_gain must be positive");
    }
    ChannelParams p;
    p.alpha = alpha;
    p.n0w = n0w;
    p.fading = fading;
    return p;
}

double drop_probability(double power, double gain, const ChannelParams& params) {
    if (power < 0.0) {
        std::ostringstream os;
        os << "transmission power must be nonnegative, got " << power;
        throw NegativePower(os.str());
    }
    if (!(gain > 0.0)) {
        std::ostringstream os;
        os << "channel gain must be positive, got " << gain;
        throw ConfigError(os.str());
    }
    return std::exp(-params.alpha * gain * power / params.n0w);
}

int transmit(double power, double gain, const ChannelParams& params,
             RandomSource& rng) {
    const double p_drop = drop_probability(power, gain, params);
    return rng.uniform01() < p_drop ? 0 : 1;
}

double sample_fading_gain(const ChannelParams& params, RandomSource& rng) {
    if (!params.fading) {
        throw FadingNotConfigured("channel has no fading statistics configured");
    }
    return rng.exponential(params.fading->mean_gain);
}

}  // namespace remest
