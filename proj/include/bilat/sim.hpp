#pragma once

#include "bilat/control.hpp"
#include "bilat/plant.hpp"
#include "bilat/rng.hpp"

namespace bilat {

// One simulated robot: plant state, observer filters and the current
// command/response frame. Shared by the bilateral rig, the replay/autonomous
// runners and the frequency-response sweeps.
struct SimRobot {
    PlantState plant;
    FilterState filt;
    RobotFrame frame;
    EeState ee;
    JointVector tau_dis;       // DOB output for the current tick
    JointVector tau_ext_true;  // plant-truth external torque of the last step

    void init_posture(const JointVector& theta, const PlantParams& p);
};

// Sample the encoders (optionally with Gaussian noise), run pseudo-diff and
// both observers. Observers see the motor torque sent last tick.
void robot_observe(SimRobot& r, const PlantParams& p, const ControllerGains& g,
                   double dt, double noise_sigma, Rng& rng);

// Hybrid control from the populated frame, add the disturbance compensation,
// and advance the plant one tick. tau_operator is an extra external torque.
// p_plant lets tests run a deliberately mismatched plant under the nominal
// controller/observer parameters; null means no mismatch.
void robot_act(SimRobot& r, const PlantParams& p, const ControllerGains& g,
               const JointVector& tau_operator, ContactEnv* env, double dt,
               const PlantParams* p_plant = nullptr);

// planar 2-link inverse kinematics for radius r and height z (desk frame);
// returns {theta2, theta3}, elbow folded upward
std::array<double, 2> ik_planar(double r, double z, const PlantParams& p);

}  // namespace bilat
