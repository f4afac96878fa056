#include "bilat/executor.hpp"

#include <algorithm>
#include <cmath>

#include "bilat/dataset.hpp"

namespace bilat {

double schedule_at(const FreqSchedule& s, double t) {
    double f = s.empty() ? 0.0 : s.front().second;
    for (const auto& [t0, val] : s)
        if (t >= t0) f = val;
    return f;
}

namespace {

TaskOutcome score_run(const Episode& ep, const ContactEnv& env, double settle_s,
                      double f_cmd) {
    TaskOutcome oc;
    oc.f_cmd = f_cmd;
    oc.height_m = ep.meta.height_m;
    oc.coverage = env.coverage();
    oc.success = oc.coverage >= 0.90;

    const size_t k0 = std::min(ep.size(), static_cast<size_t>(settle_s * 1000.0));
    std::vector<double> th1;
    th1.reserve(ep.size() - k0);
    for (size_t k = k0; k < ep.size(); ++k) th1.push_back(ep.th_s[k][0]);
    oc.fft_peak_hz = th1.size() >= 64 ? fft_peak(th1, 1000.0) : 0.0;
    return oc;
}

// common slave-only loop; `commander` fills the slave command channels per tick
template <typename Commander>
RunResult run_slave(const TeleopConfig& cfg, const RunConfig& rc, double duration_s,
                    Commander&& commander) {
    ContactEnv env = cfg.env;
    env.h = rc.height_m;
    env.reset_dose();
    env.dose_enabled = false;

    SimRobot slave;
    slave.init_posture(neutral_posture(cfg), cfg.plant);

    Rng rng(Rng::mix(rc.seed, 0x51a7eULL));

    RunResult rr;
    rr.episode.meta = EpisodeMeta{schedule_at(rc.schedule, rc.duration_s), rc.height_m,
                                  rc.seed, duration_s};
    const auto n_ticks = static_cast<size_t>(std::llround(duration_s / cfg.dt));
    rr.episode.reserve(n_ticks);

    JointVector cmd_th = slave.plant.theta, cmd_w{}, cmd_tau{};

    for (size_t k = 0; k < n_ticks; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        env.dose_enabled = t >= rc.settle_s;

        robot_observe(slave, cfg.plant, cfg.gains, cfg.dt, cfg.noise_sigma, rng);
        commander(k, t, slave, cmd_th, cmd_w, cmd_tau, rr);

        slave.frame.theta_cmd = cmd_th;
        slave.frame.omega_cmd = cmd_w;
        slave.frame.tau_cmd = cmd_tau;

        robot_act(slave, cfg.plant, cfg.gains, JointVector{}, &env, cfg.dt);

        rr.episode.push_tick(cmd_th, cmd_w, -1.0 * cmd_tau, slave.frame.theta_res,
                             slave.frame.omega_res, slave.frame.tau_res, slave.ee.fn,
                             env.coverage());
    }

    rr.outcome = score_run(rr.episode, env, rc.settle_s, schedule_at(rc.schedule, duration_s));
    return rr;
}

}  // namespace

RunResult autonomous_run(const ModelParams& model, const TeleopConfig& cfg,
                         const RunConfig& rc) {
    HiddenState hs(model.hidden);
    Sample9 pending{};
    bool have_pending = false;

    // The network looks one 20 ms step ahead precisely so that a prediction
    // computed from the slave state at boundary k can be commanded over the
    // following interval: it lands when its target time arrives.
    return run_slave(cfg, rc, rc.duration_s,
                     [&](size_t k, double t, SimRobot& slave, JointVector& cmd_th,
                         JointVector& cmd_w, JointVector& cmd_tau, RunResult& rr) {
                         if (k % 20 != 0) return;
                         if (have_pending) {
                             for (int i = 0; i < 3; ++i) {
                                 cmd_th[i] = pending[i];
                                 cmd_w[i] = pending[3 + i];
                                 cmd_tau[i] = -pending[6 + i];
                             }
                         }
                         const double f_cmd = schedule_at(rc.schedule, t);
                         Sample9 slave_now;
                         for (int i = 0; i < 3; ++i) {
                             slave_now[i] = slave.frame.theta_res[i];
                             slave_now[3 + i] = slave.frame.omega_res[i];
                             slave_now[6 + i] = slave.frame.tau_res[i];
                         }
                         pending = predict_step(model, hs, slave_now, f_cmd);
                         have_pending = true;
                         ++rr.prediction_updates;
                     });
}

std::vector<double> rescale_time_series(const std::vector<double>& src, double f_src,
                                        double f_dst) {
    if (src.empty()) return {};
    const double ratio = f_dst / f_src;
    const auto out_len = static_cast<size_t>(
        std::floor(static_cast<double>(src.size()) * f_src / f_dst));
    std::vector<double> out(out_len);
    const double last = src.back();
    for (size_t k = 0; k < out_len; ++k) {
        const double pos = static_cast<double>(k) * ratio;
        const auto i0 = static_cast<size_t>(std::floor(pos));
        if (i0 + 1 >= src.size()) {
            out[k] = last;
            continue;
        }
        const double a = pos - static_cast<double>(i0);
        out[k] = (1.0 - a) * src[i0] + a * src[i0 + 1];
    }
    return out;
}

namespace {

// rescale all nine channels of one robot side
std::vector<Sample9> rescale_side(const Episode& e, bool master, double f_src,
                                  double f_dst) {
    std::vector<double> ch[9];
    for (size_t k = 0; k < e.size(); ++k) {
        const JointVector& th = master ? e.th_m[k] : e.th_s[k];
        const JointVector& w = master ? e.w_m[k] : e.w_s[k];
        const JointVector& tau = master ? e.tau_m[k] : e.tau_s[k];
        for (int i = 0; i < 3; ++i) {
            ch[i].push_back(th[i]);
            ch[3 + i].push_back(w[i]);
            ch[6 + i].push_back(tau[i]);
        }
    }
    std::vector<double> rs[9];
    for (int i = 0; i < 9; ++i) rs[i] = rescale_time_series(ch[i], f_src, f_dst);

    std::vector<Sample9> out(rs[0].size());
    for (size_t k = 0; k < out.size(); ++k)
        for (int i = 0; i < 9; ++i) out[k][i] = rs[i][k];
    return out;
}

}  // namespace

RunResult motion_copy_run(const Episode& source, double f_dst, const TeleopConfig& cfg,
                          const RunConfig& rc) {
    const double f_src = label_episode(source);
    const double ratio = f_dst / f_src;
    std::vector<Sample9> cmds = rescale_side(source, true, f_src, f_dst);

    const double duration =
        std::min(rc.duration_s, static_cast<double>(cmds.size()) * cfg.dt);

    RunConfig rc_copy = rc;
    rc_copy.schedule = {{0.0, f_dst}};

    return run_slave(cfg, rc_copy, duration,
                     [&](size_t k, double, SimRobot&, JointVector& cmd_th,
                         JointVector& cmd_w, JointVector& cmd_tau, RunResult&) {
                         const Sample9& s = cmds[std::min(k, cmds.size() - 1)];
                         for (int i = 0; i < 3; ++i) {
                             cmd_th[i] = s[i];
                             cmd_w[i] = s[3 + i] * ratio;
                             cmd_tau[i] = -s[6 + i];
                         }
                     });
}

RunResult replay_run(const Episode& source, ReplaySide side, const TeleopConfig& cfg,
                     const RunConfig& rc) {
    const bool master = side == ReplaySide::master;
    const double duration =
        std::min(rc.duration_s, static_cast<double>(source.size()) * cfg.dt);

    return run_slave(cfg, rc, duration,
                     [&](size_t k, double, SimRobot&, JointVector& cmd_th,
                         JointVector& cmd_w, JointVector& cmd_tau, RunResult&) {
                         const size_t i0 = std::min(k, source.size() - 1);
                         const JointVector& th = master ? source.th_m[i0] : source.th_s[i0];
                         const JointVector& w = master ? source.w_m[i0] : source.w_s[i0];
                         const JointVector& tau =
                             master ? source.tau_m[i0] : source.tau_s[i0];
                         cmd_th = th;
                         cmd_w = w;
                         cmd_tau = master ? -tau : tau;
                     });
}

}  // namespace bilat
