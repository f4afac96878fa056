#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bilat/analysis.hpp"

using namespace bilat;

TEST_CASE("sine fit recovers amplitude and phase") {
    std::vector<double> x;
    const double fs = 1000.0, f = 1.5, amp = 0.42, ph = 0.6;
    for (int k = 0; k < 10000; ++k)
        x.push_back(amp * std::sin(2.0 * M_PI * f * k / fs + ph) + 0.1);
    const SineFit fit = fit_sine(x, f, fs, 1.0);
    CHECK(fit.amplitude == doctest::Approx(amp).epsilon(1e-3));
    CHECK(fit.phase_deg == doctest::Approx(ph * 180.0 / M_PI).epsilon(1e-2));
}

TEST_CASE("coverage thresholds decide success") {
    Episode e;
    e.meta = EpisodeMeta{1.22, 0.056, 1, 15.0};
    for (int k = 0; k < 15000; ++k) {
        const double t = k * 1e-3;
        JointVector th{{0.08 * std::sin(2.0 * M_PI * 1.22 * t), -0.5, 0.9}};
        e.push_tick(th, JointVector{}, JointVector{}, th, JointVector{}, JointVector{},
                    0.4, 0.0);
    }
    e.coverage.back() = 0.95;
    CHECK(score_outcome(e, 2.0).success);
    e.coverage.back() = 0.89;
    CHECK_FALSE(score_outcome(e, 2.0).success);
    CHECK(std::fabs(score_outcome(e, 2.0).fft_peak_hz - 1.22) < 0.08);

    Episode empty;
    empty.meta = e.meta;
    CHECK_FALSE(score_outcome(empty, 2.0).success);
    CHECK(score_outcome(empty, 2.0).coverage == 0.0);
}

TEST_CASE("gain crossing interpolates between sweep points") {
    std::vector<BodePoint> pts{{1.0, 0.0, 0.0}, {2.0, -2.0, 0.0}, {4.0, -6.0, 0.0}};
    const auto c = gain_crossing_hz(pts, -3.0);
    REQUIRE(c.has_value());
    CHECK(*c == doctest::Approx(2.5));

    std::vector<BodePoint> flat{{1.0, 0.0, 0.0}, {2.0, -1.0, 0.0}};
    CHECK_FALSE(gain_crossing_hz(flat, -3.0).has_value());
}

TEST_CASE("idealized sweep matches the analytic response below 20 rad/s") {
    PlantParams p;
    ControllerGains g;
    const std::vector<double> freqs{0.3, 0.6, 1.0, 1.6, 2.4, 3.0};
    const auto pts = bode_sweep(p, g, freqs, 0.15, BodeMode::idealized);
    for (const BodePoint& bp : pts) {
        const double want = ideal_gain_db(g, bp.freq_hz);
        INFO("f=" << bp.freq_hz << " got " << bp.gain_db << " want " << want);
        CHECK(std::fabs(bp.gain_db - want) < 0.3);
    }
}

TEST_CASE("realistic sweep tracks slow commands at unity gain") {
    PlantParams p;
    ControllerGains g;
    const auto pts = bode_sweep(p, g, {0.2}, 0.15, BodeMode::realistic);
    REQUIRE(pts.size() == 1);
    CHECK(std::fabs(pts[0].gain_db) < 0.5);
}

TEST_CASE("log spacing covers the requested band") {
    const auto f = log_spaced(0.2, 8.0, 24);
    REQUIRE(f.size() == 24);
    CHECK(f.front() == doctest::Approx(0.2));
    CHECK(f.back() == doctest::Approx(8.0));
    for (size_t i = 1; i < f.size(); ++i) CHECK(f[i] > f[i - 1]);
}
