#include <gtest/gtest.h>

#include <nbstsmc/stsmc_controller.hpp>

using namespace nbstsmc;

namespace {

ControllerState with_v(double v) {
    ControllerState st;
    st.v = v;
    return st;
}

}  // namespace

TEST(SignedPower, Values) {
    EXPECT_EQ(signed_power(-4.0, 0.5), -2.0);
    EXPECT_EQ(signed_power(3.7, 0.0), 1.0);
    EXPECT_EQ(signed_power(0.0, 0.0), 0.0);
    EXPECT_EQ(signed_power(-0.0, 0.5), 0.0);
    EXPECT_EQ(signed_power(-2.0, 0.0), -1.0);
}

TEST(Control, Values) {
    EXPECT_NEAR(control(0.05, with_v(-1.0), 4.472136, 0.5), -2.0, 1e-6);
    EXPECT_EQ(control(0.0, with_v(0.3), 123.0, 0.5), 0.3);
}

TEST(Control, Antisymmetric) {
    const double u = control(0.02, with_v(0.5), 3.0, 0.5);
    EXPECT_EQ(control(-0.02, with_v(-0.5), 3.0, 0.5), -u);
}

TEST(Integrator, Values) {
    EXPECT_NEAR(step_integrator(with_v(1.0), 0.5, 10.0, 1e-3).v, 0.99, 1e-15);
    EXPECT_EQ(step_integrator(with_v(1.0), 0.0, 10.0, 1e-3).v, 1.0);
    EXPECT_NEAR(step_integrator(with_v(0.0), -2.0, 5.0, 0.01).v, 0.05, 1e-15);
}

TEST(Tick, OrderAndOutputs) {
    ControllerConfig cfg;
    auto st = initial_controller_state(cfg);
    st.v = 0.25;
    const auto out = tick(st, 0.05, cfg);
    EXPECT_EQ(out.gains.mode, Mode::barrier(2));
    const auto [k1, k2] = barrier_k(0.05, 0.1, 0.5);
    EXPECT_EQ(out.gains.k1, k1);
    EXPECT_EQ(out.u, -k1 * signed_power(0.05, 0.5) + 0.25);
    EXPECT_EQ(out.v, 0.25);
    EXPECT_EQ(out.next.v, 0.25 - cfg.dt * k2);
    ASSERT_TRUE(out.next.scheduler.prev_s);
    EXPECT_EQ(*out.next.scheduler.prev_s, 0.05);
}

TEST(Tick, SaturationBound) {
    ControllerConfig cfg;
    cfg.u_max = 5.0;
    const auto out = tick(initial_controller_state(cfg), 10.0, cfg);
    EXPECT_EQ(out.u, -5.0);
}
