#include "amc/spbs.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace amc;

namespace {

SimConfig static_config() {
    SimConfig c;
    c.params.D_m = 5.0;
    c.params.r0 = 10.0;
    c.dt = 0.01;
    c.release_time = 0.0;
    return c;
}

} // namespace

TEST(ApplyDeviceProposal, CrossingRevertsBoth) {
    WorldState s;
    s.z_tx = 0.0;
    s.z_rx = 2.0;
    EXPECT_TRUE(apply_device_proposal(s, 3.0, 1.0));
    EXPECT_EQ(s.z_tx, 0.0);
    EXPECT_EQ(s.z_rx, 2.0);
    EXPECT_EQ(s.collision_reverts, 1u);
    EXPECT_TRUE(s.last_step_reverted);
}

TEST(ApplyDeviceProposal, CoincidenceReverts) {
    WorldState s;
    s.z_tx = 0.0;
    s.z_rx = 2.0;
    EXPECT_TRUE(apply_device_proposal(s, 1.5, 1.5));
    EXPECT_EQ(s.z_tx, 0.0);
}

TEST(ApplyDeviceProposal, OrderedProposalAccepted) {
    WorldState s;
    s.z_tx = 0.0;
    s.z_rx = 2.0;
    EXPECT_FALSE(apply_device_proposal(s, 1.0, 5.0));
    EXPECT_EQ(s.z_tx, 1.0);
    EXPECT_EQ(s.z_rx, 5.0);
    EXPECT_EQ(s.prev_z_tx, 0.0);
    EXPECT_EQ(s.prev_z_rx, 2.0);
    EXPECT_EQ(s.collision_reverts, 0u);
}

TEST(SpbsEngine, StaticDevicesNeverMove) {
    SimConfig c = static_config();
    const SpbsEngine engine(c);
    WorldState s = WorldState::initial(c.params);
    RandomStream rng(3);
    for (int i = 0; i < 100; ++i) engine.step_devices(s, rng);
    EXPECT_EQ(s.z_tx, 0.0);
    EXPECT_EQ(s.z_rx, 10.0);
    EXPECT_EQ(s.step, 100);
}

TEST(SpbsEngine, DevicesStayOrdered) {
    SimConfig c = static_config();
    c.params.D_tx = 50.0;
    c.params.D_rx = 50.0;
    c.params.r0 = 1.0;
    c.dt = 0.5;
    const SpbsEngine engine(c);
    WorldState s = WorldState::initial(c.params);
    RandomStream rng(8);
    for (int i = 0; i < 5000; ++i) {
        engine.step_devices(s, rng);
        ASSERT_LT(s.z_tx, s.z_rx);
    }
    EXPECT_GT(s.collision_reverts, 0u);
}

TEST(SpbsEngine, ReleaseFromStaticTx) {
    SimConfig c = static_config();
    c.release_time.reset(); // k T_s = 1 s
    const SpbsEngine engine(c);
    WorldState s = WorldState::initial(c.params);
    RandomStream rng(1);
    EXPECT_THROW(engine.release_molecule(s), std::logic_error);
    while (s.step < c.release_step()) engine.step_devices(s, rng);
    engine.release_molecule(s);
    EXPECT_EQ(s.z_m, 0.0);
    EXPECT_TRUE(s.molecule_released);
    EXPECT_THROW(engine.release_molecule(s), std::logic_error);
}

TEST(SpbsEngine, ReleaseAtTimeZero) {
    const SimConfig c = static_config();
    const SpbsEngine engine(c);
    WorldState s = WorldState::initial(c.params);
    engine.release_molecule(s);
    EXPECT_EQ(s.z_m, 0.0);
    EXPECT_EQ(s.release_step, 0);
}

TEST(SpbsEngine, ReleaseAfterRevertUsesRestoredPosition) {
    SimConfig c = static_config();
    c.params.D_tx = 5.0;
    c.dt = 1.0;
    c.release_time = 1.0;
    const SpbsEngine engine(c);
    WorldState s = WorldState::initial(c.params);
    s.z_tx = 1.0;
    s.z_rx = 1.5;
    apply_device_proposal(s, 2.0, 1.5);
    s.step = 1;
    engine.release_molecule(s);
    EXPECT_EQ(s.z_m, 1.0);
}

TEST(SpbsEngine, MoleculeOnReceiverIsAHit) {
    SimConfig c = static_config();
    c.params.D_m = 0.0;
    const SpbsEngine engine(c);
    WorldState s = WorldState::initial(c.params);
    engine.release_molecule(s);
    s.z_m = s.z_rx;
    RandomStream rng(1);
    const auto hit = engine.step_molecule_and_detect(s, rng);
    ASSERT_TRUE(hit.has_value());
    EXPECT_DOUBLE_EQ(*hit, 0.01);
}

TEST(SpbsEngine, SignChangeIsAHitAndApproachIsNot) {
    // Choose D_m so the first molecule draw of the stream is exactly +1.5 um
    // (z_m - z_rx: -1 -> +0.5) or +0.8 um (-1 -> -0.2).
    RandomStream probe(42);
    double g = probe.gaussian();
    std::uint64_t seed = 42;
    while (g <= 0.0) {
        probe = RandomStream(++seed);
        g = probe.gaussian();
    }
    for (const auto& [move, expect_hit] : {std::pair{1.5, true}, std::pair{0.8, false}}) {
        SimConfig c = static_config();
        c.dt = 1.0;
        const double sd = move / g;
        c.params.D_m = sd * sd / (2.0 * c.dt);
        const SpbsEngine engine(c);
        WorldState s = WorldState::initial(c.params);
        engine.release_molecule(s);
        s.z_m = s.z_rx - 1.0;
        RandomStream rng(seed);
        const auto hit = engine.step_molecule_and_detect(s, rng);
        EXPECT_NEAR(s.z_m - s.z_rx, move - 1.0, 1e-12);
        EXPECT_EQ(hit.has_value(), expect_hit);
    }
}

TEST(SimConfig, Validation) {
    SimConfig c = static_config();
    c.n_particles = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = static_config();
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = static_config();
    c.horizon = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = static_config();
    c.release_time = 0.015;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = static_config();
    c.params.alpha = 0.8;
    c.bridge_correction = true;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(SimulateFhtd, StaticErfcOneWithBridge) {
    // Hit times up to 5 s do not depend on the horizon, so a 6 s horizon
    // gives the same F(5) as a long run.
    SimConfig c = static_config();
    c.n_particles = 200000;
    c.horizon = 6.0;
    c.bridge_correction = true;
    const SimOutcome out = simulate_fhtd(c);
    EXPECT_NEAR(empirical_cdf(out, 5.0), 0.157299, 0.005);
}

TEST(SimulateFhtd, DiscretizationBiasHalvesWithStep) {
    // Plain step-end detection misses crossings inside a step; the deficit
    // scales like sqrt(dt).
    SimConfig c = static_config();
    c.n_particles = 100000;
    c.horizon = 5.0;
    c.dt = 0.04;
    const double coarse = 0.157299 - empirical_cdf(simulate_fhtd(c), 5.0);
    c.dt = 0.01;
    const double fine = 0.157299 - empirical_cdf(simulate_fhtd(c), 5.0);
    EXPECT_GT(coarse, 0.0);
    EXPECT_GT(fine, 0.0);
    EXPECT_NEAR(fine / coarse, 0.5, 0.2);
}

TEST(SimulateFhtd, SingleParticleIsReproducible) {
    SimConfig c = static_config();
    c.n_particles = 1;
    c.horizon = 1000.0;
    c.dt = 0.1;
    c.seed = 77;
    const SimOutcome a = simulate_fhtd(c);
    const SimOutcome b = simulate_fhtd(c);
    EXPECT_EQ(a.hit_times, b.hit_times);
    EXPECT_EQ(a.n_censored, b.n_censored);
}

TEST(SimulateFhtd, FrozenMoleculeIsAlwaysCensored) {
    SimConfig c = static_config();
    c.params.D_m = 0.0;
    c.n_particles = 50;
    c.horizon = 5.0;
    const SimOutcome out = simulate_fhtd(c);
    EXPECT_TRUE(out.hit_times.empty());
    EXPECT_EQ(out.n_censored, 50u);
}

TEST(SimulateFhtd, OutcomeInvariants) {
    SimConfig c = static_config();
    c.params.D_tx = 5.0;
    c.params.D_rx = 5.0;
    c.release_time.reset();
    c.dt = 0.1;
    c.horizon = 30.0;
    c.n_particles = 3000;
    const SimOutcome out = simulate_fhtd(c);
    EXPECT_EQ(out.hit_times.size() + out.n_censored, out.n_particles);
    for (const double t : out.hit_times) {
        EXPECT_GT(t, 0.0);
        EXPECT_LE(t, c.horizon - c.effective_release_time() + 1e-9);
    }
}

TEST(SimulateFhtd, IdenticalAcrossThreadCounts) {
    SimConfig c = static_config();
    c.params.D_tx = 2.0;
    c.params.D_rx = 3.0;
    c.release_time.reset();
    c.dt = 0.1;
    c.horizon = 20.0;
    c.n_particles = 2000;
    c.bridge_correction = true;
    const SimOutcome one = simulate_fhtd(c);
    for (const unsigned threads : {2u, 3u, 8u}) {
        c.threads = threads;
        const SimOutcome many = simulate_fhtd(c);
        EXPECT_EQ(one.hit_times, many.hit_times);
        EXPECT_EQ(one.n_collision_reverts, many.n_collision_reverts);
    }
}

TEST(EmpiricalCdf, Boundaries) {
    SimConfig c = static_config();
    c.n_particles = 2000;
    c.dt = 0.1;
    c.horizon = 10.0;
    const SimOutcome out = simulate_fhtd(c);
    EXPECT_EQ(empirical_cdf(out, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(empirical_cdf(out, c.horizon),
                     1.0 - static_cast<double>(out.n_censored) / static_cast<double>(out.n_particles));
    EXPECT_THROW(empirical_cdf(out, -1.0), std::invalid_argument);
}

TEST(EmpiricalCdf, MonotoneAndMatchesHistogram) {
    SimConfig c = static_config();
    c.n_particles = 3000;
    c.dt = 0.1;
    c.horizon = 15.0;
    const SimOutcome out = simulate_fhtd(c);
    std::vector<double> grid;
    for (int i = 0; i <= 150; ++i) grid.push_back(0.1 * i);
    const auto cdf = empirical_cdf(out, grid);
    double running = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        EXPECT_GE(cdf[i], cdf[i - 1]);
        const auto in_bin = std::count_if(out.hit_times.begin(), out.hit_times.end(), [&](double t) {
            return t > grid[i - 1] + 1e-9 && t <= grid[i] + 1e-9;
        });
        running += static_cast<double>(in_bin) / static_cast<double>(out.n_particles);
        EXPECT_NEAR(cdf[i], running, 1.0 / static_cast<double>(out.n_particles));
    }
}

TEST(ReleaseDistance, CollisionFreeLawMatchesFoldedNormal) {
    SimConfig c;
    c.params.D_tx = 1.0;
    c.params.D_rx = 1.0;
    c.scheme = IncrementScheme::PaperIID;
    c.dt = c.params.T_s;
    c.horizon = 2.0;
    c.n_particles = 20000;
    std::vector<double> d = simulate_release_distance(c);
    std::sort(d.begin(), d.end());
    double ks = 0.0;
    const double n = static_cast<double>(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double F = 1.0 - distance_tail(d[i], c.params);
        ks = std::max({ks, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
    }
    EXPECT_LT(ks, 1.63 / std::sqrt(n));
}
