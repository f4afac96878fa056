#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bilat/joint_vector.hpp"

namespace bilat {

struct EpisodeMeta {
    double f_target = 0.0;   // commanded sweep frequency [Hz]
    double height_m = 0.0;   // paper height [m]
    uint64_t seed = 0;
    double duration_s = 0.0;
};

// 1 kHz log of both robots' measured responses plus the contact channel.
// In autonomous runs the master columns hold the network predictions.
struct Episode {
    EpisodeMeta meta;
    std::vector<JointVector> th_m, w_m, tau_m;
    std::vector<JointVector> th_s, w_s, tau_s;
    std::vector<double> fn;
    std::vector<double> coverage;

    size_t size() const { return th_s.size(); }

    void reserve(size_t n);
    void push_tick(const JointVector& thm, const JointVector& wm, const JointVector& taum,
                   const JointVector& ths, const JointVector& ws, const JointVector& taus,
                   double fn_val, double cov);

    // column of one scalar channel, e.g. slave joint-1 angle
    std::vector<double> slave_theta1() const;
};

void write_episode_csv(const Episode& e, const std::string& path);
Episode read_episode_csv(const std::string& path);

void write_episode_meta(const EpisodeMeta& m, const std::string& path);
EpisodeMeta read_episode_meta(const std::string& path);

}  // namespace bilat
