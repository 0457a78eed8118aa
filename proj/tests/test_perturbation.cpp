#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <nbstsmc/perturbation.hpp>

using namespace nbstsmc;

TEST(StepTrain, LevelsAndRates) {
    const PerturbationSpec spec = StepTrain{100.0, 2.0, 0.5};
    const auto mid = perturbation(spec, 0.5);
    EXPECT_EQ(mid.d, 100.0);
    ASSERT_TRUE(mid.delta);
    EXPECT_EQ(*mid.delta, 0.0);
    EXPECT_EQ(perturbation(spec, 1.5).d, 0.0);
    EXPECT_EQ(perturbation(spec, 2.5).d, 100.0);
}

TEST(StepTrain, EdgesHaveNoRate) {
    const PerturbationSpec spec = StepTrain{100.0, 2.0, 0.5};
    EXPECT_FALSE(perturbation(spec, 0.0).delta);
    EXPECT_FALSE(perturbation(spec, 1.0).delta);
    EXPECT_FALSE(perturbation(spec, 2.0).delta);
    EXPECT_FALSE(perturbation(spec, 30000 * 1e-4).delta);
    EXPECT_TRUE(perturbation(spec, 1.0 + 1e-5).delta);
    EXPECT_TRUE(std::isinf(rate_bound(spec)));
}

TEST(Sinusoid, PeakRateInLastSegment) {
    const PerturbationSpec spec = SinusoidSchedule{};
    double peak = 0.0;
    for (int k = 0; k <= 300000; ++k) {
        const double t = 7.0 + k * 1e-5;
        peak = std::max(peak, std::abs(*perturbation(spec, t).delta));
    }
    EXPECT_NEAR(peak, 2.0 * std::numbers::pi * 10.0, 1e-6);
    EXPECT_NEAR(rate_bound(spec), 62.83185307179586, 1e-12);
}

TEST(Sinusoid, PhaseContinuousAtBoundaries) {
    const SinusoidSchedule sched;
    const PerturbationSpec spec = sched;
    for (const auto& seg : sched.schedule) {
        if (seg.t_start == 0.0) continue;
        const double before = perturbation(spec, std::nextafter(seg.t_start, 0.0)).d;
        const double after = perturbation(spec, seg.t_start).d;
        EXPECT_LE(std::abs(after - before), 1e-9 * sched.amplitude) << "t=" << seg.t_start;
    }
}

TEST(Sinusoid, FirstSegmentFrequencyFromZero) {
    const PerturbationSpec spec = SinusoidSchedule{1.0, {{0.0, 1.0}, {2.0, 1.0}, {5.0, 5.0}, {7.0, 10.0}}};
    EXPECT_NEAR(perturbation(spec, 0.25).d, 1.0, 1e-15);
    EXPECT_NEAR(perturbation(spec, 2.25).d, 1.0, 1e-12);
}

TEST(Table, ConstantZero) {
    const PerturbationSpec spec = Table{};
    for (double t : {0.0, 0.3, 7.0, 1e6}) {
        const auto p = perturbation(spec, t);
        EXPECT_EQ(p.d, 0.0);
        EXPECT_EQ(*p.delta, 0.0);
    }
    EXPECT_EQ(rate_bound(spec), 0.0);
}

TEST(Table, LinearInterpolationAndHold) {
    const PerturbationSpec spec = Table{{{1.0, 0.0}, {2.0, 10.0}, {4.0, -10.0}}};
    EXPECT_EQ(perturbation(spec, 0.0).d, 0.0);
    EXPECT_NEAR(perturbation(spec, 1.5).d, 5.0, 1e-15);
    EXPECT_NEAR(*perturbation(spec, 1.5).delta, 10.0, 1e-15);
    EXPECT_NEAR(perturbation(spec, 3.0).d, 0.0, 1e-15);
    EXPECT_NEAR(*perturbation(spec, 3.0).delta, -10.0, 1e-15);
    EXPECT_EQ(perturbation(spec, 9.0).d, -10.0);
    EXPECT_EQ(rate_bound(spec), 10.0);
}

TEST(Perturbation, NegativeTimeRejected) {
    EXPECT_THROW((void)perturbation(Table{}, -1e-9), std::invalid_argument);
}

TEST(Perturbation, Validation) {
    EXPECT_TRUE(validate_perturbation(StepTrain{}).ok());
    EXPECT_EQ(validate_perturbation(StepTrain{1.0, 0.0, 0.5}).errors.front().key, "scenario.period");
    EXPECT_EQ(validate_perturbation(StepTrain{1.0, 1.0, 1.0}).errors.front().key, "scenario.duty");
    EXPECT_EQ(validate_perturbation(SinusoidSchedule{1.0, {}}).errors.front().key, "scenario.schedule");
    EXPECT_EQ(validate_perturbation(SinusoidSchedule{1.0, {{0.0, 1.0}, {0.0, 2.0}}}).errors.front().key,
              "scenario.schedule");
    EXPECT_EQ(validate_perturbation(Table{{{1.0, 0.0}, {0.5, 1.0}}}).errors.front().key, "scenario.table");
}
