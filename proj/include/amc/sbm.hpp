#pragma once

#include "amc/random_stream.hpp"

namespace amc {

/// Scaled Brownian motion of one entity: MSD(t) = 2 D t^alpha.
/// Units are micrometres and seconds throughout.
struct DiffusionSpec {
    double alpha = 1.0;
    double D = 0.0;

    void validate() const;
};

/// PaperIID draws every step with variance 2 D dt^alpha. ExactTimeChange
/// uses 2 D ((t+dt)^alpha - t^alpha) so the accumulated variance is exactly
/// 2 D t^alpha at every step end.
enum class IncrementScheme { PaperIID, ExactTimeChange };

double msd(const DiffusionSpec& spec, double t);

/// alpha t^(alpha-1) D.
double instantaneous_diffusion(const DiffusionSpec& spec, double t);

double increment_variance(const DiffusionSpec& spec, double t, double dt, IncrementScheme scheme);

double sample_step(const DiffusionSpec& spec, double t, double dt, IncrementScheme scheme,
                   RandomStream& rng);

struct PositionLaw {
    double mean;
    double variance;
};

/// Law of the position after k sampling intervals of length T_s.
PositionLaw position_law(const DiffusionSpec& spec, double z0, int k, double T_s);

} // namespace amc
