#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bilat/executor.hpp"

namespace bilat {

struct BodePoint {
    double freq_hz = 0.0;
    double gain_db = 0.0;
    double phase_deg = 0.0;
};

// realistic:     full observer stack, friction, only the angle command driven
// realistic_ff:  as above plus a pseudo-differentiated velocity command
// idealized:     frictionless plant, exact velocity measurement and feedforward,
//                ideal acceleration tracking
enum class BodeMode { realistic, realistic_ff, idealized };

const char* bode_mode_name(BodeMode m);

// Joint-1 closed-loop frequency response theta_res/theta_cmd in free motion
// with zero torque commands. Drives >= 10 periods (at least 2 s) per point and
// correlates over the second half.
std::vector<BodePoint> bode_sweep(const PlantParams& p, const ControllerGains& g,
                                  const std::vector<double>& freqs_hz, double amplitude,
                                  BodeMode mode);

// analytic (Kp + jw*Kd) / (Kp - w^2 + jw*Kd) magnitude in dB
double ideal_gain_db(const ControllerGains& g, double freq_hz);

// first gain crossing of `level_db`, linearly interpolated; nullopt if none
std::optional<double> gain_crossing_hz(const std::vector<BodePoint>& pts,
                                       double level_db);

// default log-spaced sweep grid
std::vector<double> log_spaced(double lo_hz, double hi_hz, int n);

TaskOutcome score_outcome(const Episode& e, double settle_s);

// ---- episode metrics ----------------------------------------------------

// RMS over time and joints of theta_m - theta_s
double rms_sync_error(const Episode& e, double settle_s);
// RMS over time and joints of tau_m + tau_s
double rms_tau_sum(const Episode& e, double settle_s);
// time-mean of tau_m1 + tau_s1
double mean_tau_sum_j1(const Episode& e, double settle_s);
double peak_to_peak_theta_s1(const Episode& e, double settle_s);
double peak_abs_tau_s1(const Episode& e, double settle_s);

// amplitude and phase [deg] of channel x at frequency f via correlation
struct SineFit {
    double amplitude = 0.0;
    double phase_deg = 0.0;
};
SineFit fit_sine(const std::vector<double>& x, double f_hz, double fs_hz,
                 double t_start_s);

double tracking_rms(const std::vector<double>& a, const std::vector<double>& b,
                    size_t k_start);

// ---- evaluation grid -----------------------------------------------------

struct GridCell {
    std::string method;  // "proposed" | "copy"
    double f_cmd = 0.0;
    double height_m = 0.0;
    int trials = 0;
    int successes = 0;
    double mean_coverage = 0.0;
    double mean_fft_peak = 0.0;
};

struct FreqReproRow {
    std::string method;
    double f_cmd = 0.0;
    double height_m = 0.0;
    int trial = 0;
    double fft_peak_hz = 0.0;
    bool success = false;
};

struct GridSpec {
    std::vector<double> freqs_hz;
    std::vector<double> heights_m;
    int trials = 3;
    std::vector<double> extrap_freqs_hz;
    double extrap_height_m = 0.056;
    uint64_t seed = 1;
    double duration_s = 15.0;
    double settle_s = 2.0;
    int jobs = 0;  // 0 = hardware concurrency
};

struct GridResult {
    std::vector<GridCell> cells;       // per (f, h, method), fixed order
    std::vector<FreqReproRow> repro;   // per trial
};

// Runs the proposed network and the motion-copy baseline over the full grid
// plus the extrapolation probes. Cells execute in parallel, results reduce in
// fixed cell order.
GridResult evaluate_grid(const ModelParams& model, const Episode& copy_source,
                         const TeleopConfig& cfg, const GridSpec& spec);

}  // namespace bilat
