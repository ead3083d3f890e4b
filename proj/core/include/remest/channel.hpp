#ifndef REMEST_CHANNEL_HPP
#define REMEST_CHANNEL_HPP

#include <cmath>
#include <optional>

#include "remest/errors.hpp"
#include "remest/random.hpp"

namespace remest {

/// Rayleigh block fading: the channel power gain is exponential with the
/// given mean, drawn i.i.d. per slot.
struct FadingParams {
    double mean_gain = 1.0;
};

/// AWGN/QAM packet-drop channel with power-dependent success probability.
/// A packet sent with power w and slot gain h is dropped with probability
/// exp(-alpha h w / (N0 W)); with unit gain this is q^w for
/// q = exp(-alpha / (N0 W)).
struct ChannelParams {
    double alpha = 1.0;  // modulation constant, in (0, 1]
    double n0w = 1.0;    // noise spectral density times bandwidth, > 0
    std::optional<FadingParams> fading;

    double q() const { return std::exp(-alpha / n0w); }

    /// N0 W / alpha, the budget scale that separates the optimizer branches.
    double power_scale() const { return n0w / alpha; }

    static ChannelParams make(double alpha, double n0w,
                              std::optional<FadingParams> fading = std::nullopt);
};

/// Pr(gamma = 0 | power, gain). Strictly decreasing in power, 1 at power 0.
double drop_probability(double power, double gain, const ChannelParams& params);

/// Bernoulli channel draw; returns gamma in {0, 1}.
int transmit(double power, double gain, const ChannelParams& params,
             RandomSource& rng);

/// Slot gain draw under Rayleigh fading. Throws FadingNotConfigured.
double sample_fading_gain(const ChannelParams& params, RandomSource& rng);

}  // namespace remest

#endif  // REMEST_CHANNEL_HPP
