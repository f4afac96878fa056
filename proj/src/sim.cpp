#include "bilat/sim.hpp"

#include <cmath>
#include <stdexcept>

namespace bilat {

void SimRobot::init_posture(const JointVector& theta, const PlantParams& p) {
    plant.theta = theta;
    plant.omega = JointVector{};
    filt = FilterState{};
    filt.pd_x_prev = theta;  // avoid a derivative spike on the first sample
    frame = RobotFrame{};
    frame.theta_res = theta;
    frame.theta_cmd = theta;
    tau_dis = JointVector{};
    tau_ext_true = JointVector{};
    ee = forward_kinematics(theta, plant.omega, p);
}

void robot_observe(SimRobot& r, const PlantParams& p, const ControllerGains& g,
                   double dt, double noise_sigma, Rng& rng) {
    JointVector th_meas = r.plant.theta;
    if (noise_sigma > 0.0)
        for (int i = 0; i < 3; ++i) th_meas[i] += noise_sigma * rng.normal();

    r.frame.theta_res = th_meas;
    r.frame.omega_res = pseudo_diff(r.filt, th_meas, dt, g.g_pd);
    r.tau_dis = dob_step(r.filt, r.filt.tau_app_prev, r.frame.omega_res, p, dt, g.g_dob);
    r.frame.tau_res =
        rfob_step(r.filt, r.filt.tau_app_prev, r.frame.omega_res, th_meas, p, dt, g.g_rfob);
}

void robot_act(SimRobot& r, const PlantParams& p, const ControllerGains& g,
               const JointVector& tau_operator, ContactEnv* env, double dt,
               const PlantParams* p_plant) {
    r.frame.tau_ref = hybrid_control(g, p, r.frame);
    const JointVector tau_app = r.frame.tau_ref + r.tau_dis;

    const StepResult res =
        plant_step(r.plant, tau_app, tau_operator, env, p_plant ? *p_plant : p, dt);
    r.plant = res.state;
    r.tau_ext_true = res.tau_ext_true;
    r.ee = res.ee;
    r.filt.tau_app_prev = tau_app;
}

std::array<double, 2> ik_planar(double r, double z, const PlantParams& p) {
    if (std::fabs(p.L2 - p.L3) > 1e-12)
        throw std::runtime_error("ik_planar expects equal link lengths");
    const double L = p.L2;
    const double C = r / L;
    const double S = (z - p.z_base) / L;
    const double rho = std::hypot(C, S);
    if (rho < 1e-9 || rho > 2.0)
        throw std::runtime_error("ik_planar: target out of reach");
    const double psi = std::atan2(S, C);
    const double delta = std::acos(std::min(1.0, rho / 2.0));
    return {psi - delta, 2.0 * delta};
}

}  // namespace bilat
