#include "bilat/dataset.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "bilat/errors.hpp"
#include "bilat/fft.hpp"

namespace bilat {

Input10 Normalizer::apply_input(const Input10& x) const {
    Input10 y;
    for (int d = 0; d < 10; ++d) y[d] = apply_dim(d, x[d]);
    return y;
}

Input10 Normalizer::invert_input(const Input10& y) const {
    Input10 x;
    for (int d = 0; d < 10; ++d) x[d] = invert_dim(d, y[d]);
    return x;
}

Sample9 Normalizer::apply_target(const Sample9& x) const {
    Sample9 y;
    for (int d = 0; d < 9; ++d) y[d] = apply_dim(10 + d, x[d]);
    return y;
}

Sample9 Normalizer::invert_target(const Sample9& y) const {
    Sample9 x;
    for (int d = 0; d < 9; ++d) x[d] = invert_dim(10 + d, y[d]);
    return x;
}

namespace {

Sample9 sample_at(const Episode& e, size_t k, bool master) {
    const JointVector& th = master ? e.th_m[k] : e.th_s[k];
    const JointVector& w = master ? e.w_m[k] : e.w_s[k];
    const JointVector& tau = master ? e.tau_m[k] : e.tau_s[k];
    return {th[0], th[1], th[2], w[0], w[1], w[2], tau[0], tau[1], tau[2]};
}

}  // namespace

std::vector<Series50> downsample_augment(const Episode& e, int episode_id) {
    const size_t n = e.size();
    const size_t steps = n / 20;
    if (n % 20 != 0)
        std::cerr << "downsample_augment: dropping " << n % 20
                  << " trailing ticks (episode not a multiple of 20 ms)\n";

    std::vector<Series50> out(20);
    for (int o = 0; o < 20; ++o) {
        Series50& s = out[static_cast<size_t>(o)];
        s.offset = o;
        s.episode_id = episode_id;
        s.slave.reserve(steps);
        s.master.reserve(steps);
        for (size_t k = 0; k < steps; ++k) {
            const size_t idx = static_cast<size_t>(o) + 20 * k;
            s.slave.push_back(sample_at(e, idx, false));
            s.master.push_back(sample_at(e, idx, true));
        }
    }
    return out;
}

double fft_peak(const std::vector<double>& x, double fs_hz) {
    const size_t n = x.size();
    if (n < 64) throw TooShortError("fft_peak needs at least 64 samples");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    const size_t m = next_pow2(n);
    std::vector<std::complex<double>> buf(m, {0.0, 0.0});
    double rms = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double w =
            0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(k) / (n - 1)));
        const double v = (x[k] - mean) * w;
        buf[k] = {v, 0.0};
        rms += v * v;
    }
    rms = std::sqrt(rms / static_cast<double>(n));

    fft_radix2(buf);

    size_t best = 0;
    double best_mag = 0.0;
    for (size_t k = 1; k <= m / 2; ++k) {
        const double mag = std::abs(buf[k]);
        if (mag > best_mag) {
            best_mag = mag;
            best = k;
        }
    }
    // constant input: nothing above the numerical noise floor
    if (best == 0 || best_mag < 1e-9 * static_cast<double>(n) * std::max(rms, 1e-30) ||
        rms < 1e-15)
        return 0.0;
    return fs_hz * static_cast<double>(best) / static_cast<double>(m);
}

double label_episode(const Episode& e, double fs_hz) {
    return fft_peak(e.slave_theta1(), fs_hz);
}

Dataset build_dataset(const std::vector<Series50>& series,
                      const std::vector<double>& episode_labels) {
    Dataset d;
    d.series.reserve(series.size());

    constexpr double inf = std::numeric_limits<double>::infinity();
    d.norm.mins.fill(inf);
    d.norm.maxs.fill(-inf);

    // raw pairs first, then fit min/max, then normalize in place
    for (const Series50& s : series) {
        const double label = episode_labels.at(static_cast<size_t>(s.episode_id));
        SeriesPairs sp;
        if (s.slave.size() >= 2) {
            const size_t np = s.slave.size() - 1;
            sp.inputs.reserve(np);
            sp.targets.reserve(np);
            for (size_t k = 0; k < np; ++k) {
                Input10 in;
                for (int j = 0; j < 9; ++j) in[j] = s.slave[k][j];
                in[9] = label;
                sp.inputs.push_back(in);
                sp.targets.push_back(s.master[k + 1]);
                for (int j = 0; j < 10; ++j) {
                    d.norm.mins[j] = std::min(d.norm.mins[j], in[j]);
                    d.norm.maxs[j] = std::max(d.norm.maxs[j], in[j]);
                }
                for (int j = 0; j < 9; ++j) {
                    d.norm.mins[10 + j] = std::min(d.norm.mins[10 + j], sp.targets.back()[j]);
                    d.norm.maxs[10 + j] = std::max(d.norm.maxs[10 + j], sp.targets.back()[j]);
                }
            }
        }
        d.total_pairs += sp.inputs.size();
        d.series.push_back(std::move(sp));
    }

    // keep max > min even for a frozen channel
    for (int j = 0; j < 19; ++j) {
        if (!(d.norm.maxs[j] - d.norm.mins[j] > 1e-12)) {
            const double c = std::isfinite(d.norm.mins[j]) ? d.norm.mins[j] : 0.0;
            d.norm.mins[j] = c - 0.5;
            d.norm.maxs[j] = c + 0.5;
        }
    }

    for (SeriesPairs& sp : d.series) {
        for (auto& in : sp.inputs) in = d.norm.apply_input(in);
        for (auto& tg : sp.targets) tg = d.norm.apply_target(tg);
    }
    return d;
}

void write_normalizer(const Normalizer& n, const std::string& path) {
    nlohmann::json j;
    j["mins"] = n.mins;
    j["maxs"] = n.maxs;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

Normalizer read_normalizer(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    f >> j;
    Normalizer n;
    for (int i = 0; i < 19; ++i) {
        n.mins[i] = j.at("mins").at(i).get<double>();
        n.maxs[i] = j.at("maxs").at(i).get<double>();
    }
    return n;
}

namespace {
constexpr char kMagic[8] = {'B', 'P', 'A', 'I', 'R', 'S', '0', '1'};
}

void write_dataset(const Dataset& d, const std::string& pairs_path,
                   const std::string& normalizer_path) {
    std::ofstream f(pairs_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + pairs_path);
    f.write(kMagic, 8);
    const uint64_t ns = d.series.size();
    f.write(reinterpret_cast<const char*>(&ns), 8);
    for (const SeriesPairs& sp : d.series) {
        const uint64_t n = sp.inputs.size();
        f.write(reinterpret_cast<const char*>(&n), 8);
        for (const auto& in : sp.inputs)
            f.write(reinterpret_cast<const char*>(in.data()), 10 * sizeof(double));
        for (const auto& tg : sp.targets)
            f.write(reinterpret_cast<const char*>(tg.data()), 9 * sizeof(double));
    }
    write_normalizer(d.norm, normalizer_path);
}

Dataset read_dataset(const std::string& pairs_path, const std::string& normalizer_path) {
    std::ifstream f(pairs_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + pairs_path);
    char magic[8];
    f.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("bad dataset file " + pairs_path);
    uint64_t ns = 0;
    f.read(reinterpret_cast<char*>(&ns), 8);
    Dataset d;
    d.series.resize(ns);
    for (SeriesPairs& sp : d.series) {
        uint64_t n = 0;
        f.read(reinterpret_cast<char*>(&n), 8);
        sp.inputs.resize(n);
        sp.targets.resize(n);
        for (auto& in : sp.inputs)
            f.read(reinterpret_cast<char*>(in.data()), 10 * sizeof(double));
        for (auto& tg : sp.targets)
            f.read(reinterpret_cast<char*>(tg.data()), 9 * sizeof(double));
        d.total_pairs += n;
    }
    if (!f) throw std::runtime_error("truncated dataset file " + pairs_path);
    d.norm = read_normalizer(normalizer_path);
    return d;
}

}  // namespace bilat
