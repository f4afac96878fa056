#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bilat/analysis.hpp"
#include "bilat/bilateral.hpp"
#include "bilat/model.hpp"

namespace bilat {

struct CollectConfig {
    std::vector<double> freqs_hz{0.61, 0.85, 1.10, 1.22, 1.47, 1.59, 1.83};
    std::vector<double> heights_m{0.035, 0.056, 0.066};
    double duration_s = 15.0;
    double replay_freq_hz = 2.17;
    double replay_height_m = 0.056;
    double copy_source_freq_hz = 1.22;
    double copy_source_height_m = 0.056;
};

struct EvalConfig {
    std::vector<double> freqs_hz{0.49, 0.61, 0.73, 0.85, 0.98, 1.10, 1.16, 1.22,
                                 1.34, 1.47, 1.53, 1.59, 1.71, 1.83, 1.95};
    std::vector<double> heights_m{0.035, 0.047, 0.056, 0.069, 0.076};
    int trials = 3;
    std::vector<double> extrap_freqs_hz{2.2, 2.45, 2.69};
    double duration_s = 15.0;
    int jobs = 0;
};

struct BodeConfig {
    double lo_hz = 0.2;
    double hi_hz = 8.0;
    int points = 24;
    double amplitude = 0.15;
};

struct Config {
    uint64_t seed = 1;
    std::string out_dir = "out";
    TeleopConfig teleop;   // plant, gains, env, demonstrator, noise, settle
    CollectConfig collect;
    TrainConfig train;
    EvalConfig eval;
    BodeConfig bode;
};

Config default_config();
Config load_config(const std::string& path);  // defaults overridden by file keys
void save_config(const Config& c, const std::string& path);
std::string config_json(const Config& c);     // canonical dump for hashing

}  // namespace bilat
