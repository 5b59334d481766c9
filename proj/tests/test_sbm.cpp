#include "amc/quadrature.hpp"
#include "amc/sbm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

using namespace amc;

namespace {
constexpr auto Paper = IncrementScheme::PaperIID;
constexpr auto Exact = IncrementScheme::ExactTimeChange;
} // namespace

TEST(Msd, Examples) {
    EXPECT_DOUBLE_EQ(msd({1.0, 5.0}, 1.0), 10.0);
    EXPECT_DOUBLE_EQ(msd({0.5, 5.0}, 4.0), 20.0);
    EXPECT_EQ(msd({0.7, 3.0}, 0.0), 0.0);
    EXPECT_THROW(msd({1.0, 5.0}, -1.0), std::invalid_argument);
}

TEST(DiffusionSpec, RejectsOutOfRange) {
    EXPECT_THROW((DiffusionSpec{0.0, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((DiffusionSpec{2.5, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((DiffusionSpec{1.0, -1.0}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((DiffusionSpec{2.0, 0.0}.validate()));
}

TEST(InstantaneousDiffusion, Examples) {
    EXPECT_DOUBLE_EQ(instantaneous_diffusion({1.0, 5.0}, 17.0), 5.0);
    EXPECT_DOUBLE_EQ(instantaneous_diffusion({0.5, 5.0}, 4.0), 1.25);
    EXPECT_DOUBLE_EQ(instantaneous_diffusion({2.0, 1.0}, 3.0), 6.0);
    EXPECT_THROW(instantaneous_diffusion({0.5, 5.0}, 0.0), std::invalid_argument);
}

TEST(InstantaneousDiffusion, IntegratesBackToMsd) {
    for (const double alpha : {0.5, 0.8, 1.0, 1.5, 2.0}) {
        const DiffusionSpec spec{alpha, 3.0};
        // u = s^(alpha/2) removes the s^(alpha-1) endpoint singularity.
        const double p = 2.0 / alpha;
        const auto g = [&](double u) {
            if (u <= 0.0) return 0.0;
            const double s = std::pow(u, p);
            return 2.0 * instantaneous_diffusion(spec, s) * p * s / u;
        };
        const double t = 7.0;
        const double value = adaptive_quad(g, 0.0, std::pow(t, alpha / 2.0)).value;
        EXPECT_NEAR(value / msd(spec, t), 1.0, 1e-8) << "alpha=" << alpha;
    }
}

TEST(IncrementVariance, Examples) {
    EXPECT_DOUBLE_EQ(increment_variance({1.0, 5.0}, 3.3, 0.5, Paper), 5.0);
    EXPECT_DOUBLE_EQ(increment_variance({1.0, 5.0}, 3.3, 0.5, Exact), 5.0);
    EXPECT_DOUBLE_EQ(increment_variance({0.5, 5.0}, 0.0, 1.0, Paper), 10.0);
    // 10 (sqrt 2 - 1)
    EXPECT_NEAR(increment_variance({0.5, 5.0}, 1.0, 1.0, Exact), 4.142135623730951, 1e-14);
    EXPECT_THROW(increment_variance({1.0, 5.0}, 0.0, 0.0, Paper), std::invalid_argument);
    EXPECT_THROW(increment_variance({1.0, 5.0}, -1.0, 1.0, Exact), std::invalid_argument);
}

TEST(IncrementVariance, ExactSchemeTelescopesToMsd) {
    for (const double alpha : {0.3, 0.8, 1.1, 1.7}) {
        const DiffusionSpec spec{alpha, 5.0};
        double sum = 0.0;
        const double dt = 0.013;
        int n = 0;
        for (; n < 1000; ++n) sum += increment_variance(spec, n * dt, dt, Exact);
        EXPECT_NEAR(sum / msd(spec, n * dt), 1.0, 1e-12);
    }
}

TEST(IncrementVariance, PaperSchemeMatchesPositionLawOnlyAtSamplingStep) {
    const DiffusionSpec spec{0.6, 5.0};
    const int k = 4;
    const double T_s = 1.5;
    const double law = position_law(spec, 0.0, k, T_s).variance;
    double at_Ts = 0.0;
    for (int n = 0; n < k; ++n) at_Ts += increment_variance(spec, n * T_s, T_s, Paper);
    EXPECT_NEAR(at_Ts, law, 1e-12);
    double fine = 0.0;
    for (int n = 0; n < 2 * k; ++n) fine += increment_variance(spec, n * T_s / 2, T_s / 2, Paper);
    EXPECT_NEAR(fine, 2.0 * spec.D * 2 * k * std::pow(T_s / 2, spec.alpha), 1e-12);
    EXPECT_GT(std::abs(fine - law), 1.0);
}

TEST(SampleStep, ZeroDiffusionIsExactlyZero) {
    RandomStream rng(7);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_step({1.3, 0.0}, i, 0.5, Exact, rng), 0.0);
}

TEST(SampleStep, MomentsOfAMillionDraws) {
    RandomStream rng(2024);
    const DiffusionSpec spec{1.0, 5.0};
    const int n = 1000000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_step(spec, 0.0, 0.5, Paper, rng);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    const double sigma = std::sqrt(5.0);
    EXPECT_LT(std::abs(mean), 4.0 * sigma / 1000.0);
    EXPECT_NEAR(var, 5.0, 0.02 * 5.0);
    // Three standard errors of the sample variance: sqrt(2/n) * 5.
    EXPECT_NEAR(var, 5.0, 3.0 * std::sqrt(2.0 / n) * 5.0);
}

TEST(SampleStep, ReproducibleFromStreamState) {
    RandomStream a = RandomStream::substream(99, 12);
    RandomStream b = RandomStream::substream(99, 12);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(sample_step({0.8, 2.0}, i * 0.5, 0.5, Exact, a),
                  sample_step({0.8, 2.0}, i * 0.5, 0.5, Exact, b));
    }
}

TEST(RandomStream, SubstreamsDiffer) {
    RandomStream a = RandomStream::substream(1, 0);
    RandomStream b = RandomStream::substream(1, 1);
    RandomStream c = RandomStream::substream(2, 0);
    const double x = a.gaussian();
    EXPECT_NE(x, b.gaussian());
    EXPECT_NE(x, c.gaussian());
}

TEST(PositionLaw, Examples) {
    const auto a = position_law({1.0, 5.0}, 0.0, 4, 1.0);
    EXPECT_DOUBLE_EQ(a.mean, 0.0);
    EXPECT_DOUBLE_EQ(a.variance, 40.0);
    const auto b = position_law({0.7, 5.0}, 2.5, 0, 1.0);
    EXPECT_DOUBLE_EQ(b.mean, 2.5);
    EXPECT_EQ(b.variance, 0.0);
    const auto c = position_law({0.5, 5.0}, 3.0, 2, 4.0);
    EXPECT_DOUBLE_EQ(c.mean, 3.0);
    EXPECT_DOUBLE_EQ(c.variance, 40.0);
    EXPECT_THROW(position_law({1.0, 5.0}, 0.0, 1, 0.0), std::invalid_argument);
    EXPECT_THROW(position_law({1.0, 5.0}, 0.0, -1, 1.0), std::invalid_argument);
}
