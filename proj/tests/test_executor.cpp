#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bilat/analysis.hpp"
#include "bilat/dataset.hpp"
#include "bilat/executor.hpp"

using namespace bilat;

namespace {

// model whose predictions always equal the posture stored in the normalizer
// minimum: zero weights map everything to normalized 0
ModelParams hold_model(const TeleopConfig& cfg) {
    ModelParams p = zero_model_params(16, 64);
    const JointVector q0 = neutral_posture(cfg);
    for (int i = 0; i < 19; ++i) {
        p.norm.mins[i] = -1.0;
        p.norm.maxs[i] = 1.0;
    }
    for (int i = 0; i < 3; ++i) {
        p.norm.mins[10 + i] = q0[i];
        p.norm.maxs[10 + i] = q0[i] + 1.0;
        p.norm.mins[13 + i] = 0.0;
        p.norm.maxs[13 + i] = 1.0;
        p.norm.mins[16 + i] = 0.0;
        p.norm.maxs[16 + i] = 1.0;
    }
    return p;
}

Episode constant_posture_episode(const TeleopConfig& cfg, size_t n) {
    Episode e;
    const JointVector q0 = neutral_posture(cfg);
    e.meta = EpisodeMeta{0.0, 0.056, 1, static_cast<double>(n) * 1e-3};
    for (size_t k = 0; k < n; ++k)
        e.push_tick(q0, JointVector{}, JointVector{}, q0, JointVector{}, JointVector{},
                    0.0, 0.0);
    return e;
}

}  // namespace

TEST_CASE("piecewise-constant schedule lookup") {
    FreqSchedule s{{0.0, 1.0}, {5.0, 2.0}, {10.0, 0.5}};
    CHECK(schedule_at(s, 0.0) == 1.0);
    CHECK(schedule_at(s, 4.999) == 1.0);
    CHECK(schedule_at(s, 5.0) == 2.0);
    CHECK(schedule_at(s, 11.0) == 0.5);
}

TEST_CASE("rescaling to the same frequency is the identity") {
    std::vector<double> x;
    for (int k = 0; k < 500; ++k) x.push_back(std::sin(0.01 * k));
    const auto y = rescale_time_series(x, 1.22, 1.22);
    REQUIRE(y.size() == x.size());
    for (size_t k = 0; k < x.size(); ++k) CHECK(y[k] == doctest::Approx(x[k]).epsilon(1e-12));
}

TEST_CASE("rescaling halves or doubles the length as commanded") {
    std::vector<double> x(15000);
    const double f_src = 1.22;
    for (size_t k = 0; k < x.size(); ++k)
        x[k] = std::sin(2.0 * M_PI * f_src * static_cast<double>(k) * 1e-3);

    const auto slower = rescale_time_series(x, f_src, 0.61);
    CHECK(slower.size() == static_cast<size_t>(std::floor(15000.0 * 1.22 / 0.61)));
    const double peak_slow = fft_peak(slower, 1000.0);
    CHECK(std::fabs(peak_slow - 0.61) < 0.05);

    const auto faster = rescale_time_series(x, f_src, 1.83);
    CHECK(faster.size() == static_cast<size_t>(std::floor(15000.0 * 1.22 / 1.83)));

    // the rescaled sinusoid matches the analytic target to interpolation error
    double err = 0.0;
    for (size_t k = 0; k < faster.size(); ++k) {
        const double want = std::sin(2.0 * M_PI * 1.83 * static_cast<double>(k) * 1e-3);
        err += (faster[k] - want) * (faster[k] - want);
    }
    err = std::sqrt(err / static_cast<double>(faster.size()));
    CHECK(err < 1e-3);
}

TEST_CASE("autonomous command updates happen exactly every 20 ms") {
    TeleopConfig cfg;
    const ModelParams model = hold_model(cfg);

    RunConfig rc;
    rc.schedule = {{0.0, 1.22}};
    rc.height_m = -1.0;  // free motion, nothing to touch
    rc.duration_s = 1.0;
    rc.seed = 3;

    const RunResult rr = autonomous_run(model, cfg, rc);
    CHECK(rr.prediction_updates == 50);
    CHECK(rr.episode.size() == 1000);
}

TEST_CASE("autonomous runs are deterministic per seed") {
    TeleopConfig cfg;
    const ModelParams model = hold_model(cfg);
    RunConfig rc;
    rc.schedule = {{0.0, 1.0}};
    rc.height_m = 0.056;
    rc.duration_s = 2.0;
    rc.seed = 9;

    const RunResult a = autonomous_run(model, cfg, rc);
    const RunResult b = autonomous_run(model, cfg, rc);
    REQUIRE(a.episode.size() == b.episode.size());
    for (size_t k = 0; k < a.episode.size(); ++k)
        CHECK(a.episode.th_s[k][0] == b.episode.th_s[k][0]);
    CHECK(a.outcome.coverage == b.outcome.coverage);
}

TEST_CASE("mid-run frequency changes feed through the schedule") {
    TeleopConfig cfg;
    const ModelParams model = hold_model(cfg);
    RunConfig rc;
    rc.schedule = {{0.0, 0.8}, {1.0, 1.6}};
    rc.height_m = -1.0;
    rc.duration_s = 2.0;
    rc.seed = 12;

    const RunResult rr = autonomous_run(model, cfg, rc);
    CHECK(rr.prediction_updates == 100);
    CHECK(rr.episode.meta.f_target == 1.6);  // metadata records the final command
}

TEST_CASE("a zero-frequency command degenerates to a quiet hold") {
    TeleopConfig cfg;
    const ModelParams model = hold_model(cfg);
    RunConfig rc;
    rc.schedule = {{0.0, 0.0}};
    rc.height_m = 0.056;
    rc.duration_s = 3.0;
    rc.seed = 5;

    const RunResult rr = autonomous_run(model, cfg, rc);
    CHECK_FALSE(rr.outcome.success);
    CHECK(rr.outcome.coverage < 0.05);
}

TEST_CASE("replaying a constant-posture source tracks equally on both sides") {
    TeleopConfig cfg;
    const Episode src = constant_posture_episode(cfg, 4000);

    RunConfig rc;
    rc.schedule = {{0.0, 0.0}};
    rc.height_m = -1.0;
    rc.duration_s = 4.0;
    rc.seed = 17;

    const RunResult rm = replay_run(src, ReplaySide::master, cfg, rc);
    const RunResult rs = replay_run(src, ReplaySide::slave, cfg, rc);

    const double err_m = tracking_rms(rm.episode.slave_theta1(), src.slave_theta1(), 1000);
    const double err_s = tracking_rms(rs.episode.slave_theta1(), src.slave_theta1(), 1000);
    CHECK(err_m < 1e-3);
    CHECK(err_s < 1e-3);
    CHECK(std::fabs(err_m - err_s) < 1e-4);
}

TEST_CASE("copy runs stop when a faster command exhausts the source") {
    TeleopConfig cfg;
    Episode src = constant_posture_episode(cfg, 15000);
    // give the source a measurable rhythm so the label is defined
    for (size_t k = 0; k < src.size(); ++k) {
        const double t = static_cast<double>(k) * 1e-3;
        src.th_m[k][0] += 0.05 * std::sin(2.0 * M_PI * 1.22 * t);
        src.th_s[k][0] += 0.05 * std::sin(2.0 * M_PI * 1.22 * t);
        src.w_m[k][0] = 0.05 * 2.0 * M_PI * 1.22 * std::cos(2.0 * M_PI * 1.22 * t);
    }

    RunConfig rc;
    rc.schedule = {{0.0, 1.83}};
    rc.height_m = -1.0;
    rc.duration_s = 15.0;
    rc.seed = 23;

    const RunResult rr = motion_copy_run(src, 1.83, cfg, rc);
    const double f_src = label_episode(src);
    const size_t expect = static_cast<size_t>(std::floor(15000.0 * f_src / 1.83));
    CHECK(rr.episode.size() == expect);

    // frequency exactness of the baseline
    CHECK(std::fabs(rr.outcome.fft_peak_hz - 1.83) < 1.0 / 8.0);
}
