#include "bilat/control.hpp"

namespace bilat {

JointVector pseudo_diff(FilterState& fs, const JointVector& theta_sample, double dt,
                        double g) {
    JointVector y;
    for (int i = 0; i < 3; ++i) {
        y[i] = (fs.pd_y[i] + g * (theta_sample[i] - fs.pd_x_prev[i])) / (1.0 + g * dt);
        fs.pd_x_prev[i] = theta_sample[i];
        fs.pd_y[i] = y[i];
    }
    return y;
}

double lowpass_step(double y_prev, double u, double dt, double g) {
    return (y_prev + g * dt * u) / (1.0 + g * dt);
}

JointVector dob_step(FilterState& fs, const JointVector& tau_applied,
                     const JointVector& omega_meas, const PlantParams& p, double dt,
                     double g) {
    JointVector tau_dis;
    for (int i = 0; i < 3; ++i) {
        const double gJw = g * p.J[i] * omega_meas[i];
        fs.dob_lp[i] = lowpass_step(fs.dob_lp[i], tau_applied[i] + gJw, dt, g);
        tau_dis[i] = fs.dob_lp[i] - gJw;
    }
    return tau_dis;
}

JointVector rfob_step(FilterState& fs, const JointVector& tau_applied,
                      const JointVector& omega_meas, const JointVector& theta_meas,
                      const PlantParams& p, double dt, double g) {
    const JointVector grav = gravity_torque(theta_meas, p);
    JointVector tau_res;
    for (int i = 0; i < 3; ++i) {
        const double gJw = g * p.J[i] * omega_meas[i];
        fs.rfob_lp[i] = lowpass_step(fs.rfob_lp[i], tau_applied[i] + gJw, dt, g);
        tau_res[i] = fs.rfob_lp[i] - gJw - p.D_visc[i] * omega_meas[i] - grav[i];
    }
    return tau_res;
}

JointVector hybrid_control(const ControllerGains& gains, const PlantParams& p,
                           const RobotFrame& frame) {
    JointVector tau_ref;
    for (int i = 0; i < 3; ++i) {
        const double e_th = frame.theta_cmd[i] - frame.theta_res[i];
        const double e_w = frame.omega_cmd[i] - frame.omega_res[i];
        tau_ref[i] = p.J[i] * (gains.Kp * e_th + gains.Kd * e_w) +
                     gains.Kf * (frame.tau_cmd[i] - frame.tau_res[i]);
    }
    return tau_ref;
}

}  // namespace bilat
