#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <nbstsmc/config_io.hpp>
#include <nbstsmc/plant_sim.hpp>

using namespace nbstsmc;

TEST(PlantStep, Euler) {
    EXPECT_NEAR(plant_step(0.0, 1.0, 2.0, 1e-3), 0.003, 1e-18);
    EXPECT_EQ(plant_step(0.5, -7.0, 7.0, 0.01), 0.5);
    EXPECT_NEAR(plant_step(1.0, -3.0, 1.0, 0.1), 0.8, 1e-15);
}

TEST(RunSimulation, RowCount) {
    ControllerConfig cfg;
    cfg.horizon = 0.5;
    const auto traj = run_simulation(cfg, StepTrain{});
    EXPECT_EQ(traj.records.size(), static_cast<std::size_t>(std::llround(0.5 / cfg.dt)) + 1);
    EXPECT_EQ(traj.records.front().t, 0.0);
    EXPECT_EQ(traj.records.front().s, cfg.s0);
}

TEST(RunSimulation, OriginIsEquilibrium) {
    ControllerConfig cfg;
    cfg.s0 = 0.0;
    cfg.v0 = 0.0;
    cfg.horizon = 2.0;
    const auto traj = run_simulation(cfg, Table{});
    for (const auto& r : traj.records) {
        ASSERT_EQ(r.s, 0.0);
        ASSERT_EQ(r.u, 0.0);
        ASSERT_EQ(r.v, 0.0);
    }
}

TEST(RunSimulation, InvalidInputsRejected) {
    ControllerConfig cfg;
    cfg.layers = {1e-1, 1e-4};
    EXPECT_THROW((void)run_simulation(cfg, StepTrain{}), std::invalid_argument);
    EXPECT_THROW((void)run_simulation(ControllerConfig{}, StepTrain{1.0, -1.0, 0.5}), std::invalid_argument);
}

TEST(RunSimulation, ClosedLoopIncrementsMatchControlLaw) {
    for (const PerturbationSpec& spec : {PerturbationSpec{StepTrain{}}, PerturbationSpec{SinusoidSchedule{}}}) {
        ControllerConfig cfg;
        cfg.horizon = 1.5;
        cfg.s0 = 1.0;
        const auto traj = run_simulation(cfg, spec);
        const auto& r = traj.records;
        for (std::size_t k = 0; k + 1 < r.size(); ++k) {
            const double lhs = (r[k + 1].s - r[k].s) / cfg.dt;
            const double phi = r[k].v + r[k].d;
            const double rhs = -r[k].k1 * signed_power(r[k].s, cfg.alpha) + phi;
            const double ulp = std::nextafter(std::max(std::abs(r[k].s), std::abs(r[k + 1].s)),
                                              std::numeric_limits<double>::infinity()) -
                               std::max(std::abs(r[k].s), std::abs(r[k + 1].s));
            const double terms = std::abs(r[k].k1 * signed_power(r[k].s, cfg.alpha)) + std::abs(r[k].v) +
                                 std::abs(r[k].d);
            const double tol = 1e-12 * terms + 2.0 * ulp / cfg.dt;
            ASSERT_LE(std::abs(lhs - rhs), tol) << "k=" << k;
        }
    }
}

TEST(RunSimulation, AppliedGainsMatchMode) {
    ControllerConfig cfg;
    cfg.horizon = 2.0;
    const auto traj = run_simulation(cfg, StepTrain{});
    for (const auto& r : traj.records) {
        if (r.mode == 0) {
            ASSERT_TRUE(r.v_out);
        } else {
            ASSERT_FALSE(r.v_out);
            ASSERT_LT(std::abs(r.s), cfg.threshold(static_cast<std::size_t>(r.mode)));
            ASSERT_EQ(r.k2, r.k1 * r.k1);
        }
    }
}

TEST(RunSimulation, Deterministic) {
    ControllerConfig cfg;
    cfg.horizon = 1.0;
    const auto a = run_simulation(cfg, SinusoidSchedule{});
    const auto b = run_simulation(cfg, SinusoidSchedule{});
    EXPECT_EQ(trajectory_csv(a), trajectory_csv(b));
}

TEST(RunSimulation, ConfigEchoRoundTrip) {
    ControllerConfig cfg;
    cfg.horizon = 1.0;
    cfg.s0 = -0.3;
    cfg.alpha = 0.7;
    const auto a = run_simulation(cfg, StepTrain{50.0, 0.8, 0.25});
    const auto echo = setup_from_json(json::parse(setup_to_json(a.config, a.perturbation).dump()));
    const auto b = run_simulation(echo.config, echo.perturbation);
    EXPECT_EQ(trajectory_csv(a), trajectory_csv(b));
}

namespace {

// Independent single-barrier two-mode loop, written without the scheduler.
std::vector<TrajectoryRecord> single_layer_reference(const ControllerConfig& cfg, const PerturbationSpec& spec) {
    const double eps = cfg.layers.at(0);
    const double T = cfg.dt;
    double s = cfg.s0;
    double v = cfg.v0;
    double k1d = cfg.k1d_init;
    double k2d = cfg.k2d_init;
    bool first = true;
    bool was_a0 = false;
    double prev_s = 0.0;
    std::vector<TrajectoryRecord> out;
    for (std::size_t k = 0; k <= cfg.sample_count(); ++k) {
        const double t = static_cast<double>(k) * T;
        const double d = perturbation(spec, t).d;
        const double x = std::abs(s);
        bool a0;
        if (x >= eps) {
            a0 = true;
        } else if (first) {
            a0 = false;
        } else if (was_a0) {
            a0 = !(x <= cfg.entry_fraction * eps);
        } else {
            a0 = false;
        }
        double k1;
        double k2;
        if (a0) {
            const double sdot = first ? cfg.sdot_floor : std::max(std::abs(s - prev_s) / T, cfg.sdot_floor);
            const double r1 = k1d / sdot;
            const double r2 = k2d / (2.0 * std::pow(std::max(x, eps), 1.0 - cfg.alpha));
            k1d += T * r1;
            k2d += T * r2;
            if (k2d > 1.0 && std::abs(k1d - k2d / (k2d - 1.0)) < cfg.nu) k1d += cfg.nu;
            k1 = k1d;
            k2 = k2d;
        } else {
            k1d = std::max(k1d * (1.0 - T), cfg.gain_floor);
            k2d = std::max(k2d * (1.0 - T), cfg.gain_floor);
            k1 = x / std::pow(eps - x, cfg.alpha + 1.0);
            k2 = k1 * k1;
        }
        const double sgn = s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
        const double u = -k1 * (sgn == 0.0 ? 0.0 : sgn * std::pow(x, cfg.alpha)) + v;
        TrajectoryRecord rec;
        rec.t = t;
        rec.s = s;
        rec.u = u;
        rec.v = v;
        rec.k1 = k1;
        rec.k2 = k2;
        rec.mode = a0 ? 0 : 1;
        rec.d = d;
        out.push_back(rec);
        v -= T * k2 * sgn;
        prev_s = s;
        first = false;
        was_a0 = a0;
        s = s + T * (u + d);
    }
    return out;
}

}  // namespace

TEST(RunSimulation, SingleLayerMatchesReferenceLoop) {
    ControllerConfig cfg;
    cfg.layers = {1e-2};
    cfg.horizon = 3.0;
    cfg.s0 = 0.5;
    for (const PerturbationSpec& spec : {PerturbationSpec{StepTrain{5.0, 1.0, 0.5}}, PerturbationSpec{SinusoidSchedule{}}}) {
        const auto traj = run_simulation(cfg, spec);
        const auto ref = single_layer_reference(cfg, spec);
        ASSERT_EQ(traj.records.size(), ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k) {
            ASSERT_EQ(traj.records[k].s, ref[k].s) << "k=" << k;
            ASSERT_EQ(traj.records[k].u, ref[k].u) << "k=" << k;
            ASSERT_EQ(traj.records[k].v, ref[k].v) << "k=" << k;
            ASSERT_EQ(traj.records[k].k1, ref[k].k1) << "k=" << k;
            ASSERT_EQ(traj.records[k].k2, ref[k].k2) << "k=" << k;
            ASSERT_EQ(traj.records[k].mode, ref[k].mode) << "k=" << k;
        }
    }
}

TEST(RunSimulation, OverflowRaisesSimulationError) {
    ControllerConfig cfg;
    cfg.horizon = 1.0;
    cfg.s0 = 0.0;
    cfg.v0 = 1.7e308;
    try {
        (void)run_simulation(cfg, Table{{{0.0, 1.7e308}}});
        FAIL() << "expected SimulationError";
    } catch (const SimulationError& e) {
        EXPECT_EQ(e.variable(), "s");
        EXPECT_EQ(e.sample(), 1u);
        EXPECT_NE(std::string(e.what()).find("sample"), std::string::npos);
    }
}
