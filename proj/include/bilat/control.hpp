#pragma once

#include "bilat/joint_vector.hpp"
#include "bilat/plant.hpp"

namespace bilat {

// Shared gain set of both robots. Kd = 2*sqrt(Kp) gives critical damping of
// the nominal position loop; the three cutoffs parameterize the first-order
// filters of the velocity estimate, disturbance observer and reaction torque
// observer.
struct ControllerGains {
    double Kp = 121.0;
    double Kd = 22.0;
    double Kf = 1.00;
    double g_pd = 40.0;    // pseudo-differentiation cutoff [rad/s]
    double g_dob = 40.0;   // disturbance observer cutoff [rad/s]
    double g_rfob = 40.0;  // reaction torque observer cutoff [rad/s]
};

// First-order filter states of one robot's observers, zero-initialized.
struct FilterState {
    JointVector pd_x_prev;      // previous angle sample
    JointVector pd_y;           // pseudo-diff output
    JointVector dob_lp;         // DOB low-pass state
    JointVector rfob_lp;        // RFOB low-pass state
    JointVector tau_app_prev;   // motor torque sent to the plant last tick
};

// Command/response/reference triple of one robot at one tick. tau_res holds
// the reaction torque observer output (the torque the robot exerts on its
// environment), never the raw motor torque.
struct RobotFrame {
    JointVector theta_cmd, theta_res;
    JointVector omega_cmd, omega_res;
    JointVector tau_cmd, tau_res;
    JointVector tau_ref;
};

// y_k = (y_{k-1} + g*(x_k - x_{k-1})) / (1 + g*dt), backward Euler g*s/(s+g)
JointVector pseudo_diff(FilterState& fs, const JointVector& theta_sample, double dt,
                        double g);

// first-order low-pass y_k = (y_{k-1} + g*dt*u_k) / (1 + g*dt), per joint
double lowpass_step(double y_prev, double u, double dt, double g);

// Disturbance estimate LP[tau_applied + g*J*w] - g*J*w. The caller adds the
// result to the next tick's torque reference.
JointVector dob_step(FilterState& fs, const JointVector& tau_applied,
                     const JointVector& omega_meas, const PlantParams& p, double dt,
                     double g);

// Reaction torque estimate LP[tau_applied + g*J*w] - g*J*w - D*w - g(theta).
// Positive means the robot pushes its environment in the positive joint
// direction; at rest under an external load it settles to minus that load.
JointVector rfob_step(FilterState& fs, const JointVector& tau_applied,
                      const JointVector& omega_meas, const JointVector& theta_meas,
                      const PlantParams& p, double dt, double g);

// tau_ref_i = J_i*(Kp*e_th + Kd*e_w) + Kf*(tau_cmd - tau_res)
JointVector hybrid_control(const ControllerGains& gains, const PlantParams& p,
                           const RobotFrame& frame);

}  // namespace bilat
