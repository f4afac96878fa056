#pragma once

#include <array>
#include <string>
#include <vector>

#include "bilat/episode.hpp"

namespace bilat {

using Sample9 = std::array<double, 9>;    // theta x3, omega x3, tau x3
using Input10 = std::array<double, 10>;   // slave sample + frequency command

// One 50 Hz view of an episode: every 20th tick starting at `offset`.
struct Series50 {
    std::vector<Sample9> slave;
    std::vector<Sample9> master;
    int offset = 0;
    int episode_id = 0;
};

// Per-dimension min/max over the training pairs: dims 0-8 slave responses,
// dim 9 the frequency command, dims 10-18 the master targets.
struct Normalizer {
    std::array<double, 19> mins{};
    std::array<double, 19> maxs{};

    double apply_dim(int d, double x) const { return (x - mins[d]) / (maxs[d] - mins[d]); }
    double invert_dim(int d, double y) const { return mins[d] + y * (maxs[d] - mins[d]); }

    Input10 apply_input(const Input10& x) const;
    Input10 invert_input(const Input10& y) const;
    Sample9 apply_target(const Sample9& x) const;
    Sample9 invert_target(const Sample9& y) const;
};

// Normalized one-step-ahead pairs of one 50 Hz series: inputs[k] pairs with
// targets[k] = master sample at k+1. length = series length - 1.
struct SeriesPairs {
    std::vector<Input10> inputs;
    std::vector<Sample9> targets;
};

struct Dataset {
    std::vector<SeriesPairs> series;
    Normalizer norm;
    size_t total_pairs = 0;
};

// 20 offset series at 50 Hz; a tail that does not fill a 20 ms stride is
// dropped with a warning on stderr.
std::vector<Series50> downsample_augment(const Episode& e, int episode_id);

// Dominant non-DC frequency: mean removal, Hann window, zero-pad to the next
// power of two. Returns 0 when no component rises above the noise floor.
// Throws TooShortError below 64 samples.
double fft_peak(const std::vector<double>& x, double fs_hz);

// frequency label of an episode: FFT peak of the slave joint-1 angle
double label_episode(const Episode& e, double fs_hz = 1000.0);

// Assemble normalized pairs from all series; labels are per-episode constants
// indexed by Series50::episode_id. The normalizer is fitted over all pairs.
Dataset build_dataset(const std::vector<Series50>& series,
                      const std::vector<double>& episode_labels);

void write_dataset(const Dataset& d, const std::string& pairs_path,
                   const std::string& normalizer_path);
Dataset read_dataset(const std::string& pairs_path, const std::string& normalizer_path);

void write_normalizer(const Normalizer& n, const std::string& path);
Normalizer read_normalizer(const std::string& path);

}  // namespace bilat
