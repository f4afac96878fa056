#pragma once

#include <cstdint>

#include "bilat/episode.hpp"
#include "bilat/sim.hpp"

namespace bilat {

// Scripted stand-in for the human operator: an impedance hand that sweeps the
// master along the working arc at a metronome frequency while a slow force
// servo regulates the felt pressing force.
struct DemonstratorParams {
    double A = 0.07;           // sweep amplitude on joint 1 [rad]
    double F_d = 0.4;          // desired pressing force at f_ref [N]
    double k_press = 0.008;    // force servo gain [m/(N s)]
    double K_h = 300.0;        // hand stiffness [N/m]
    double D_h = 15.0;         // hand damping [Ns/m]
    double ramp_time = 0.5;    // sweep amplitude ramp-in [s]

    // Slow strokes press harder, fast strokes ride the inertia:
    // F_d_eff = F_d * (1 + press_slow_gain * (f_ref/f - 1)), floored at 0.6*F_d.
    double press_slow_gain = 0.3;
    double f_ref = 1.22;

    // Approach profile: sink at v_approach until hover_dz above the paper,
    // then hand over to the (slower) force servo. The descent never pauses in
    // free air, so "no force yet" always reads as "keep going down".
    double z_start = 0.02;      // initial hover above the paper [m]
    double v_approach = 0.008;  // descent rate while far from contact [m/s]
    double hover_dz = 0.004;    // servo handover height above the paper [m]
    double hover_time = 0.0;    // optional pause before pressing [s]

    // Hand tremor: slow Ornstein-Uhlenbeck wander of the hand reference and
    // of the pressing effort. Gives the demonstrations the width a human
    // operator has naturally; the predictor then learns to steer back to the
    // cycle instead of memorizing a zero-width trajectory.
    double tremor_pos = 0.002;    // stationary position sigma [m]
    double tremor_force = 0.06;   // stationary force sigma [N]
    double tremor_tau = 0.3;      // wander time constant [s]
};

struct DemonstratorState {
    double z_ref = 0.0;   // vertical hand reference
    double f = 1.0;       // sweep frequency of this episode [Hz]
    int phase = 0;        // 0 approach, 1 hover, 2 press
    double t_phase = 0.0; // time in the current phase [s]
    std::array<double, 3> wander{0, 0, 0};  // tremor offsets x/y/z [m]
    double f_wander = 0.0;                  // tremor offset on the press [N]
};

// Four-channel cross-assignment: each side's commands are the other side's
// responses, with the torque channel negated.
void couple_commands(RobotFrame& master, RobotFrame& slave);

// Hand wrench on the master for the current tick, mapped to joint torques.
// Advances the force servo and tremor states; rng drives the tremor.
JointVector operator_force(const DemonstratorParams& dp, DemonstratorState& ds,
                           const SimRobot& master, const PlantParams& p,
                           const ContactEnv& env, double t, double dt, Rng& rng);

struct TeleopConfig {
    PlantParams plant;
    ControllerGains gains;
    ContactEnv env;           // h is overridden per episode
    DemonstratorParams demo;
    double noise_sigma = 1e-4;
    double dt = 1e-3;
    double settle_s = 2.0;    // dose accumulation starts after this
    double neutral_z = 0.09;  // hover posture height at episode start [m]
};

// Run the full bilateral loop for `duration` seconds and log both robots.
Episode collect_demonstration(const TeleopConfig& cfg, double f_hz, double height_m,
                              double duration_s, uint64_t seed);

// neutral start posture used by every runner: arc center at neutral_z
JointVector neutral_posture(const TeleopConfig& cfg);

}  // namespace bilat
