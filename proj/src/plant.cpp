#include "bilat/plant.hpp"

#include <algorithm>
#include <cmath>

#include "bilat/errors.hpp"

namespace bilat {

namespace {
constexpr double kOmegaGuard = 200.0;       // [rad/s]
constexpr double kContactMargin = 2e-3;     // substep when closer than this [m]
constexpr int kSubsteps = 10;
constexpr double kStickVel = 5e-3;          // Karnopp stick band [rad/s]
}  // namespace

double ContactEnv::coverage() const {
    if (dose.empty()) return 0.0;
    size_t erased = 0;
    for (double d : dose)
        if (d >= dose_min) ++erased;
    return static_cast<double>(erased) / static_cast<double>(dose.size());
}

JointVector gravity_torque(const JointVector& theta, const PlantParams& p) {
    JointVector g;
    g[0] = 0.0;  // vertical first axis carries no gravity load
    g[1] = p.G[1] * std::cos(theta[1]);
    g[2] = p.G[2] * std::cos(theta[1] + theta[2]);
    return g;
}

EeState forward_kinematics(const JointVector& theta, const JointVector& omega,
                           const PlantParams& p) {
    const double c1 = std::cos(theta[0]), s1 = std::sin(theta[0]);
    const double c2 = std::cos(theta[1]), s2 = std::sin(theta[1]);
    const double c23 = std::cos(theta[1] + theta[2]);
    const double s23 = std::sin(theta[1] + theta[2]);
    const double r = p.L2 * c2 + p.L3 * c23;

    EeState ee;
    ee.pos = {r * c1, r * s1, p.z_base + p.L2 * s2 + p.L3 * s23};

    const double dr2 = -p.L2 * s2 - p.L3 * s23;  // dr/dtheta2
    const double dr3 = -p.L3 * s23;              // dr/dtheta3
    const double dz2 = r;                        // dz/dtheta2
    const double dz3 = p.L3 * c23;               // dz/dtheta3

    ee.vel[0] = -r * s1 * omega[0] + c1 * (dr2 * omega[1] + dr3 * omega[2]);
    ee.vel[1] = r * c1 * omega[0] + s1 * (dr2 * omega[1] + dr3 * omega[2]);
    ee.vel[2] = dz2 * omega[1] + dz3 * omega[2];
    return ee;
}

std::array<double, 9> jacobian(const JointVector& theta, const PlantParams& p) {
    const double c1 = std::cos(theta[0]), s1 = std::sin(theta[0]);
    const double c2 = std::cos(theta[1]), s2 = std::sin(theta[1]);
    const double c23 = std::cos(theta[1] + theta[2]);
    const double s23 = std::sin(theta[1] + theta[2]);
    const double r = p.L2 * c2 + p.L3 * c23;
    const double dr2 = -p.L2 * s2 - p.L3 * s23;
    const double dr3 = -p.L3 * s23;

    return {-r * s1, c1 * dr2,      c1 * dr3,
            r * c1,  s1 * dr2,      s1 * dr3,
            0.0,     r,             p.L3 * c23};
}

namespace {

JointVector map_force_to_joints(const std::array<double, 3>& f, const JointVector& theta,
                                const PlantParams& p) {
    const auto Jm = jacobian(theta, p);
    JointVector tau;
    for (int j = 0; j < 3; ++j)
        tau[j] = Jm[0 * 3 + j] * f[0] + Jm[1 * 3 + j] * f[1] + Jm[2 * 3 + j] * f[2];
    return tau;
}

}  // namespace

ContactWrench contact_wrench(const EeState& ee, const ContactEnv& env,
                             const JointVector& theta, const PlantParams& p) {
    ContactWrench w;
    const double z = ee.pos[2];
    if (z >= env.h) return w;  // complementarity: force only while penetrating

    const double delta = env.h - z;
    const double fn = std::max(0.0, env.K_e * delta - env.D_e * ee.vel[2]);
    if (fn <= 0.0) return w;

    const double vx = ee.vel[0], vy = ee.vel[1];
    const double vt = std::hypot(vx, vy);
    const double stribeck =
        env.mu_c + (env.mu_s - env.mu_c) * std::exp(-(vt / env.v_s) * (vt / env.v_s));
    const double ft_mag = stribeck * fn + env.k_v * vt;

    w.force[2] = fn;
    if (vt > 1e-9) {
        w.force[0] = -ft_mag * vx / vt;
        w.force[1] = -ft_mag * vy / vt;
    }
    w.tau = map_force_to_joints(w.force, theta, p);
    return w;
}

namespace {

void accumulate_dose(ContactEnv& env, const EeState& ee, double fn, double dt) {
    if (!env.dose_enabled || fn < env.F_min) return;
    if (env.dose.empty()) env.reset_dose();

    const double vt = std::hypot(ee.vel[0], ee.vel[1]);
    const double inc = fn * vt * dt;
    if (inc <= 0.0) return;

    const double x = ee.pos[0], y = ee.pos[1];
    const double dr = (env.r_out - env.r_in) / env.n_r;
    const double dphi = (env.phi_max - env.phi_min) / env.n_phi;
    const double r_ee = std::hypot(x, y);
    const double phi_ee = std::atan2(y, x);

    // only cells within footprint reach of the current position
    const double phi_halo = (env.r_e + dphi * r_ee) / std::max(r_ee, 1e-6);
    const int j_lo = std::max(0, static_cast<int>((phi_ee - phi_halo - env.phi_min) / dphi) - 1);
    const int j_hi = std::min(env.n_phi - 1,
                              static_cast<int>((phi_ee + phi_halo - env.phi_min) / dphi) + 1);
    const double r2 = env.r_e * env.r_e;

    for (int i = 0; i < env.n_r; ++i) {
        const double rc = env.r_in + (i + 0.5) * dr;
        if (std::fabs(rc - r_ee) > env.r_e + dr) continue;
        for (int j = j_lo; j <= j_hi; ++j) {
            const double pc = env.phi_min + (j + 0.5) * dphi;
            const double cx = rc * std::cos(pc), cy = rc * std::sin(pc);
            const double dx = cx - x, dy = cy - y;
            if (dx * dx + dy * dy <= r2)
                env.dose[static_cast<size_t>(i * env.n_phi + j)] += inc;
        }
    }
}

}  // namespace

StepResult plant_step(const PlantState& state, const JointVector& tau_motor,
                      const JointVector& tau_operator, ContactEnv* env,
                      const PlantParams& p, double dt) {
    PlantState s = state;

    EeState ee = forward_kinematics(s.theta, s.omega, p);
    const bool near_contact = env != nullptr && (ee.pos[2] - env->h) < kContactMargin;
    const int n_sub = near_contact ? kSubsteps : 1;
    const double h = dt / n_sub;

    JointVector tau_ext_sum;
    for (int k = 0; k < n_sub; ++k) {
        ee = forward_kinematics(s.theta, s.omega, p);
        JointVector tau_ext = tau_operator;
        if (env != nullptr) {
            const ContactWrench w = contact_wrench(ee, *env, s.theta, p);
            ee.fn = w.force[2];
            ee.ft = {w.force[0], w.force[1]};
            tau_ext += w.tau;
            accumulate_dose(*env, ee, ee.fn, h);
        }
        tau_ext_sum += tau_ext;

        const JointVector g = gravity_torque(s.theta, p);
        for (int i = 0; i < 3; ++i) {
            const double tau_net =
                tau_motor[i] - p.D_visc[i] * s.omega[i] - g[i] + tau_ext[i];
            const double tc = p.tau_coul[i];
            if (std::fabs(s.omega[i]) < kStickVel && std::fabs(tau_net) <= tc) {
                s.omega[i] = 0.0;  // stiction holds the joint
            } else {
                const double sgn = std::fabs(s.omega[i]) < kStickVel
                                       ? (tau_net > 0.0 ? 1.0 : -1.0)
                                       : (s.omega[i] > 0.0 ? 1.0 : -1.0);
                s.omega[i] += h * (tau_net - tc * sgn) / p.J[i];
            }
            s.theta[i] += h * s.omega[i];
        }
    }

    if (!s.theta.all_finite() || !s.omega.all_finite() || s.omega.max_abs() > kOmegaGuard)
        throw BlowUpError("joint velocity guard exceeded");

    StepResult out;
    out.state = s;
    out.tau_ext_true = tau_ext_sum * (1.0 / n_sub);
    out.ee = forward_kinematics(s.theta, s.omega, p);
    if (env != nullptr) {
        const ContactWrench w = contact_wrench(out.ee, *env, s.theta, p);
        out.ee.fn = w.force[2];
        out.ee.ft = {w.force[0], w.force[1]};
    }
    return out;
}

}  // namespace bilat
