#include "bilat/episode.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bilat {

namespace {

// shortest round-trip representation so CSV persistence is bit-exact
void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

void Episode::reserve(size_t n) {
    th_m.reserve(n); w_m.reserve(n); tau_m.reserve(n);
    th_s.reserve(n); w_s.reserve(n); tau_s.reserve(n);
    fn.reserve(n); coverage.reserve(n);
}

void Episode::push_tick(const JointVector& thm, const JointVector& wm,
                        const JointVector& taum, const JointVector& ths,
                        const JointVector& ws, const JointVector& taus, double fn_val,
                        double cov) {
    th_m.push_back(thm); w_m.push_back(wm); tau_m.push_back(taum);
    th_s.push_back(ths); w_s.push_back(ws); tau_s.push_back(taus);
    fn.push_back(fn_val); coverage.push_back(cov);
}

std::vector<double> Episode::slave_theta1() const {
    std::vector<double> out(size());
    for (size_t k = 0; k < size(); ++k) out[k] = th_s[k][0];
    return out;
}

void write_episode_csv(const Episode& e, const std::string& path) {
    std::string out;
    out.reserve(e.size() * 200 + 256);
    out += "t,th_m1,th_m2,th_m3,w_m1,w_m2,w_m3,tau_m1,tau_m2,tau_m3,"
           "th_s1,th_s2,th_s3,w_s1,w_s2,w_s3,tau_s1,tau_s2,tau_s3,Fn,coverage\n";
    for (size_t k = 0; k < e.size(); ++k) {
        append_double(out, static_cast<double>(k) * 1e-3);
        const JointVector* vecs[6] = {&e.th_m[k], &e.w_m[k],  &e.tau_m[k],
                                      &e.th_s[k], &e.w_s[k], &e.tau_s[k]};
        for (const auto* jv : vecs)
            for (int i = 0; i < 3; ++i) {
                out += ',';
                append_double(out, (*jv)[i]);
            }
        out += ',';
        append_double(out, e.fn[k]);
        out += ',';
        append_double(out, e.coverage[k]);
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << out;
}

Episode read_episode_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    Episode e;
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        double vals[21];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i < 21; ++i) {
            auto res = std::from_chars(p, end, vals[i]);
            if (res.ec != std::errc()) throw std::runtime_error("bad csv row in " + path);
            p = res.ptr;
            if (p < end && *p == ',') ++p;
        }
        JointVector thm{{vals[1], vals[2], vals[3]}}, wm{{vals[4], vals[5], vals[6]}},
            taum{{vals[7], vals[8], vals[9]}}, ths{{vals[10], vals[11], vals[12]}},
            ws{{vals[13], vals[14], vals[15]}}, taus{{vals[16], vals[17], vals[18]}};
        e.push_tick(thm, wm, taum, ths, ws, taus, vals[19], vals[20]);
    }
    return e;
}

void write_episode_meta(const EpisodeMeta& m, const std::string& path) {
    nlohmann::json j;
    j["f_target"] = m.f_target;
    j["height_m"] = m.height_m;
    j["seed"] = m.seed;
    j["duration_s"] = m.duration_s;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

EpisodeMeta read_episode_meta(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    f >> j;
    EpisodeMeta m;
    m.f_target = j.at("f_target").get<double>();
    m.height_m = j.at("height_m").get<double>();
    m.seed = j.at("seed").get<uint64_t>();
    m.duration_s = j.at("duration_s").get<double>();
    return m;
}

}  // namespace bilat
