#include "amc/sbm.hpp"

#include <cmath>
#include <stdexcept>

namespace amc {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream RandomStream::substream(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(splitmix64(splitmix64(seed) ^ splitmix64(~index)));
}

void DiffusionSpec::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        throw std::invalid_argument("anomalous exponent alpha must lie in (0, 2]");
    }
    if (!(D >= 0.0) || !std::isfinite(D)) {
        throw std::invalid_argument("diffusion coefficient must be finite and non-negative");
    }
}

double msd(const DiffusionSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("msd: t must be non-negative");
    return 2.0 * spec.D * std::pow(t, spec.alpha);
}

double instantaneous_diffusion(const DiffusionSpec& spec, double t) {
    spec.validate();
    if (!(t > 0.0)) throw std::invalid_argument("instantaneous_diffusion: t must be positive");
    if (spec.alpha == 1.0) return spec.D;
    return spec.alpha * std::pow(t, spec.alpha - 1.0) * spec.D;
}

double increment_variance(const DiffusionSpec& spec, double t, double dt, IncrementScheme scheme) {
    spec.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("increment_variance: t must be non-negative");
    if (!(dt > 0.0)) throw std::invalid_argument("increment_variance: dt must be positive");
    if (scheme == IncrementScheme::PaperIID || spec.alpha == 1.0) {
        return 2.0 * spec.D * std::pow(dt, spec.alpha);
    }
    return 2.0 * spec.D * (std::pow(t + dt, spec.alpha) - std::pow(t, spec.alpha));
}

double sample_step(const DiffusionSpec& spec, double t, double dt, IncrementScheme scheme,
                   RandomStream& rng) {
    const double var = increment_variance(spec, t, dt, scheme);
    if (var == 0.0) return 0.0;
    return std::sqrt(var) * rng.gaussian();
}

PositionLaw position_law(const DiffusionSpec& spec, double z0, int k, double T_s) {
    spec.validate();
    if (k < 0) throw std::invalid_argument("position_law: k must be non-negative");
    if (!(T_s > 0.0)) throw std::invalid_argument("position_law: T_s must be positive");
    return {z0, 2.0 * k * spec.D * std::pow(T_s, spec.alpha)};
}

} // namespace amc
