#include "bilat/bilateral.hpp"

#include <cmath>

namespace bilat {

void couple_commands(RobotFrame& master, RobotFrame& slave) {
    slave.theta_cmd = master.theta_res;
    slave.omega_cmd = master.omega_res;
    slave.tau_cmd = -master.tau_res;

    master.theta_cmd = slave.theta_res;
    master.omega_cmd = slave.omega_res;
    master.tau_cmd = -slave.tau_res;
}

namespace {

// solve J^T f = tau for the Cartesian force felt through the master
bool solve_jt(const std::array<double, 9>& Jm, const JointVector& tau,
              std::array<double, 3>& f) {
    // rows of A are columns of J
    const double a[9] = {Jm[0], Jm[3], Jm[6], Jm[1], Jm[4], Jm[7], Jm[2], Jm[5], Jm[8]};
    const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) -
                       a[1] * (a[3] * a[8] - a[5] * a[6]) +
                       a[2] * (a[3] * a[7] - a[4] * a[6]);
    if (std::fabs(det) < 1e-9) return false;
    const double inv = 1.0 / det;
    f[0] = inv * ((a[4] * a[8] - a[5] * a[7]) * tau[0] -
                  (a[1] * a[8] - a[2] * a[7]) * tau[1] +
                  (a[1] * a[5] - a[2] * a[4]) * tau[2]);
    f[1] = inv * (-(a[3] * a[8] - a[5] * a[6]) * tau[0] +
                  (a[0] * a[8] - a[2] * a[6]) * tau[1] -
                  (a[0] * a[5] - a[2] * a[3]) * tau[2]);
    f[2] = inv * ((a[3] * a[7] - a[4] * a[6]) * tau[0] -
                  (a[0] * a[7] - a[1] * a[6]) * tau[1] +
                  (a[0] * a[4] - a[1] * a[3]) * tau[2]);
    return true;
}

}  // namespace

JointVector operator_force(const DemonstratorParams& dp, DemonstratorState& ds,
                           const SimRobot& master, const PlantParams& p,
                           const ContactEnv& env, double t, double dt, Rng& rng) {
    const double r_d = 0.5 * (env.r_in + env.r_out);
    const double w = 2.0 * M_PI * ds.f;
    const double ramp = dp.ramp_time > 0.0 ? std::min(1.0, t / dp.ramp_time) : 1.0;
    const double dramp = (dp.ramp_time > 0.0 && t < dp.ramp_time) ? 1.0 / dp.ramp_time : 0.0;

    // Ornstein-Uhlenbeck tremor; the stationary deviation equals the
    // configured sigma irrespective of dt.
    const double a = std::exp(-dt / dp.tremor_tau);
    const double kick = std::sqrt(std::max(0.0, 1.0 - a * a));
    for (int i = 0; i < 3; ++i)
        ds.wander[i] = a * ds.wander[i] + kick * dp.tremor_pos * rng.normal();
    ds.f_wander = a * ds.f_wander + kick * dp.tremor_force * rng.normal();

    const double phi = dp.A * ramp * std::sin(w * t);
    const double dphi = dp.A * (ramp * w * std::cos(w * t) + dramp * std::sin(w * t));

    // pressing force felt through the coupling, from the master reaction torque
    const auto Jm = jacobian(master.plant.theta, p);
    std::array<double, 3> felt{0, 0, 0};
    double fn_hat = 0.0;
    if (solve_jt(Jm, master.frame.tau_res, felt)) fn_hat = std::max(0.0, felt[2]);

    double f_d = dp.F_d;
    if (ds.f > 0.0 && dp.press_slow_gain != 0.0)
        f_d = std::max(0.6 * dp.F_d,
                       dp.F_d * (1.0 + dp.press_slow_gain * (dp.f_ref / ds.f - 1.0)));
    f_d = std::max(0.1, f_d + ds.f_wander);

    switch (ds.phase) {
        case 0:  // sink toward the paper
            ds.z_ref -= dp.v_approach * dt;
            if (ds.z_ref <= env.h + dp.hover_dz) {
                ds.phase = 1;
                ds.t_phase = 0.0;
            }
            break;
        case 1:  // hover just above before committing to contact
            ds.t_phase += dt;
            if (ds.t_phase >= dp.hover_time) ds.phase = 2;
            break;
        default:  // regulate the felt pressing force
            ds.z_ref += -dp.k_press * (f_d - fn_hat) * dt;
            break;
    }
    ds.z_ref = std::min(std::max(ds.z_ref, env.h - 0.005), env.h + 0.03);

    const double xr = r_d * std::cos(phi) + ds.wander[0];
    const double yr = r_d * std::sin(phi) + ds.wander[1];
    const double vxr = -r_d * std::sin(phi) * dphi, vyr = r_d * std::cos(phi) * dphi;

    std::array<double, 3> f_hand;
    f_hand[0] = dp.K_h * (xr - master.ee.pos[0]) + dp.D_h * (vxr - master.ee.vel[0]);
    f_hand[1] = dp.K_h * (yr - master.ee.pos[1]) + dp.D_h * (vyr - master.ee.vel[1]);
    f_hand[2] = dp.K_h * (ds.z_ref - master.ee.pos[2]) + dp.D_h * (0.0 - master.ee.vel[2]);

    JointVector tau;
    for (int j = 0; j < 3; ++j)
        tau[j] = Jm[0 + j] * f_hand[0] + Jm[3 + j] * f_hand[1] + Jm[6 + j] * f_hand[2];
    return tau;
}

JointVector neutral_posture(const TeleopConfig& cfg) {
    const double r_d = 0.5 * (cfg.env.r_in + cfg.env.r_out);
    const auto q = ik_planar(r_d, cfg.neutral_z, cfg.plant);
    return JointVector{{0.0, q[0], q[1]}};
}

Episode collect_demonstration(const TeleopConfig& cfg, double f_hz, double height_m,
                              double duration_s, uint64_t seed) {
    ContactEnv env = cfg.env;
    env.h = height_m;
    env.reset_dose();
    env.dose_enabled = false;

    SimRobot master, slave;
    const JointVector q0 = neutral_posture(cfg);
    master.init_posture(q0, cfg.plant);
    slave.init_posture(q0, cfg.plant);

    DemonstratorState ds;
    ds.f = f_hz;
    ds.z_ref = std::min(height_m + cfg.demo.z_start, height_m + 0.03);

    Rng rng(Rng::mix(seed, 0xb17a7e5aULL));

    Episode ep;
    ep.meta = EpisodeMeta{f_hz, height_m, seed, duration_s};
    const auto n_ticks = static_cast<size_t>(std::llround(duration_s / cfg.dt));
    ep.reserve(n_ticks);

    for (size_t k = 0; k < n_ticks; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        env.dose_enabled = t >= cfg.settle_s;

        robot_observe(master, cfg.plant, cfg.gains, cfg.dt, cfg.noise_sigma, rng);
        robot_observe(slave, cfg.plant, cfg.gains, cfg.dt, cfg.noise_sigma, rng);
        couple_commands(master.frame, slave.frame);

        const JointVector tau_op =
            operator_force(cfg.demo, ds, master, cfg.plant, env, t, cfg.dt, rng);

        robot_act(master, cfg.plant, cfg.gains, tau_op, nullptr, cfg.dt);
        robot_act(slave, cfg.plant, cfg.gains, JointVector{}, &env, cfg.dt);

        ep.push_tick(master.frame.theta_res, master.frame.omega_res, master.frame.tau_res,
                     slave.frame.theta_res, slave.frame.omega_res, slave.frame.tau_res,
                     slave.ee.fn, env.coverage());
    }
    return ep;
}

}  // namespace bilat
