#pragma once

#include <array>
#include <vector>

#include "bilat/joint_vector.hpp"

namespace bilat {

// Rigid-body parameters of one manipulator. The three axes are decoupled
// single-DOF systems; joint 1 rotates about the vertical axis, joints 2 and 3
// form a planar two-link chain in the vertical plane.
struct PlantParams {
    JointVector J{{3.49e-3, 3.36e-3, 1.06e-3}};        // inertia [kg m^2]
    JointVector D_visc{{12.1e-3, 12.1e-3, 12.1e-3}};   // viscous friction [Nm s/rad]
    JointVector G{{124e-3, 51.6e-3, 81.6e-3}};         // gravity coefficients [Nm]
    double L2 = 0.135;      // upper link length [m]
    double L3 = 0.135;      // forearm link length [m]
    double z_base = 0.06;   // shoulder height above the desk [m]

    // Joint Coulomb friction [Nm], zero by default. The observers' friction
    // model only covers the viscous part, so anything set here acts as an
    // unmodeled disturbance for robustness experiments.
    JointVector tau_coul{{0.0, 0.0, 0.0}};
};

struct PlantState {
    JointVector theta;  // [rad]
    JointVector omega;  // [rad/s]
};

// End-effector state in desk coordinates. fn is the contact normal force
// (zero out of contact), ft the horizontal friction force on the robot.
struct EeState {
    std::array<double, 3> pos{0, 0, 0};
    std::array<double, 3> vel{0, 0, 0};
    double fn = 0.0;
    std::array<double, 2> ft{0, 0};
};

// Paper plane with a penalty contact model, Stribeck+viscous friction and an
// arc-shaped erase grid that accumulates rub dose per cell.
struct ContactEnv {
    double h = 0.056;    // paper height above desk [m]
    double K_e = 400.0;  // normal stiffness [N/m]
    double D_e = 5.0;    // normal damping [Ns/m]
    double mu_c = 0.07;  // Coulomb friction coefficient
    double mu_s = 0.45;  // static friction coefficient
    double v_s = 0.008;  // Stribeck velocity [m/s]
    double k_v = 1.45;   // viscous friction [Ns/m]

    // working area (arc band in polar desk coordinates)
    double r_in = 0.228;
    double r_out = 0.252;
    double phi_min = -0.10;
    double phi_max = 0.10;
    int n_r = 8;
    int n_phi = 60;

    double r_e = 0.012;      // eraser footprint radius [m]
    double F_min = 0.2;      // minimum erasing normal force [N]
    double dose_min = 0.02;  // required rub dose per cell [Nm]

    bool dose_enabled = true;
    std::vector<double> dose;  // n_r * n_phi accumulators, row-major over r

    void reset_dose() { dose.assign(static_cast<size_t>(n_r * n_phi), 0.0); }
    double coverage() const;
};

struct ContactWrench {
    std::array<double, 3> force{0, 0, 0};  // force on the end effector [N]
    JointVector tau;                       // same force mapped to joint torques
};

struct StepResult {
    PlantState state;
    JointVector tau_ext_true;  // external torque applied to the robot this tick
    EeState ee;
};

JointVector gravity_torque(const JointVector& theta, const PlantParams& p);

EeState forward_kinematics(const JointVector& theta, const JointVector& omega,
                           const PlantParams& p);

// position Jacobian d(pos)/d(theta), row-major 3x3
std::array<double, 9> jacobian(const JointVector& theta, const PlantParams& p);

// contact force for a given end-effector state plus its Jacobian-transpose
// torque map; does not touch the dose grid
ContactWrench contact_wrench(const EeState& ee, const ContactEnv& env,
                             const JointVector& theta, const PlantParams& p);

// One 1 kHz tick of J*domega = tau_motor - D*omega - g(theta) + tau_ext,
// semi-implicit Euler with 10x substepping near contact. tau_operator is an
// extra external torque (the demonstrator hand on the master side).
// env may be null for a free robot. Throws BlowUpError past the velocity guard.
StepResult plant_step(const PlantState& state, const JointVector& tau_motor,
                      const JointVector& tau_operator, ContactEnv* env,
                      const PlantParams& p, double dt);

}  // namespace bilat
