#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bilat/bilateral.hpp"
#include "bilat/episode.hpp"
#include "bilat/model.hpp"

namespace bilat {

// piecewise-constant frequency command: (start time [s], command [Hz])
using FreqSchedule = std::vector<std::pair<double, double>>;

double schedule_at(const FreqSchedule& s, double t);

struct RunConfig {
    FreqSchedule schedule{{0.0, 1.22}};
    double height_m = 0.056;
    double duration_s = 15.0;
    uint64_t seed = 1;
    double settle_s = 2.0;  // excluded from scoring and dose accumulation
};

struct TaskOutcome {
    bool success = false;
    double coverage = 0.0;
    double fft_peak_hz = 0.0;
    double f_cmd = 0.0;
    double height_m = 0.0;
};

struct RunResult {
    Episode episode;
    TaskOutcome outcome;
    size_t prediction_updates = 0;  // sanity counter: one per 20 ms boundary
};

// Slave under network control: every 20 ms the model predicts the master
// responses one step ahead from the current slave responses and the frequency
// command; predictions are held as slave commands between updates while the
// 1 kHz controllers keep running.
RunResult autonomous_run(const ModelParams& model, const TeleopConfig& cfg,
                         const RunConfig& rc);

// Sample k of the output reads the source at time k*f_dst/f_src with linear
// interpolation, holding the final value beyond the end. Output length is
// floor(len*f_src/f_dst).
std::vector<double> rescale_time_series(const std::vector<double>& src, double f_src,
                                        double f_dst);

// Replay the source episode's master responses rescaled to f_dst as slave
// commands. Velocity commands are scaled by f_dst/f_src to stay consistent
// with the compressed time axis; torque commands are replayed as stored.
RunResult motion_copy_run(const Episode& source, double f_dst, const TeleopConfig& cfg,
                          const RunConfig& rc);

enum class ReplaySide { master, slave };

// Replay one side of a recorded episode as slave commands, without rescaling.
RunResult replay_run(const Episode& source, ReplaySide side, const TeleopConfig& cfg,
                     const RunConfig& rc);

}  // namespace bilat
