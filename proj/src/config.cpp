#include "bilat/config.hpp"

#include <fstream>

#include <json.hpp>

namespace bilat {

using nlohmann::json;

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void get_jv(const json& j, const char* key, JointVector& out) {
    if (j.contains(key))
        for (int i = 0; i < 3; ++i) out[i] = j.at(key).at(i).get<double>();
}

json to_json(const JointVector& v) { return json{v[0], v[1], v[2]}; }

}  // namespace

Config default_config() { return Config{}; }

std::string config_json(const Config& c) {
    json j;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;

    json& p = j["plant"];
    p["J"] = to_json(c.teleop.plant.J);
    p["D_visc"] = to_json(c.teleop.plant.D_visc);
    p["G"] = to_json(c.teleop.plant.G);
    p["L2"] = c.teleop.plant.L2;
    p["L3"] = c.teleop.plant.L3;
    p["z_base"] = c.teleop.plant.z_base;

    json& g = j["gains"];
    g["Kp"] = c.teleop.gains.Kp;
    g["Kd"] = c.teleop.gains.Kd;
    g["Kf"] = c.teleop.gains.Kf;
    g["g_pd"] = c.teleop.gains.g_pd;
    g["g_dob"] = c.teleop.gains.g_dob;
    g["g_rfob"] = c.teleop.gains.g_rfob;

    json& e = j["env"];
    e["K_e"] = c.teleop.env.K_e;
    e["D_e"] = c.teleop.env.D_e;
    e["mu_c"] = c.teleop.env.mu_c;
    e["mu_s"] = c.teleop.env.mu_s;
    e["v_s"] = c.teleop.env.v_s;
    e["k_v"] = c.teleop.env.k_v;
    e["r_in"] = c.teleop.env.r_in;
    e["r_out"] = c.teleop.env.r_out;
    e["phi_min"] = c.teleop.env.phi_min;
    e["phi_max"] = c.teleop.env.phi_max;
    e["n_r"] = c.teleop.env.n_r;
    e["n_phi"] = c.teleop.env.n_phi;
    e["r_e"] = c.teleop.env.r_e;
    e["F_min"] = c.teleop.env.F_min;
    e["dose_min"] = c.teleop.env.dose_min;

    json& d = j["demonstrator"];
    d["A"] = c.teleop.demo.A;
    d["F_d"] = c.teleop.demo.F_d;
    d["k_press"] = c.teleop.demo.k_press;
    d["K_h"] = c.teleop.demo.K_h;
    d["D_h"] = c.teleop.demo.D_h;
    d["ramp_time"] = c.teleop.demo.ramp_time;
    d["press_slow_gain"] = c.teleop.demo.press_slow_gain;
    d["f_ref"] = c.teleop.demo.f_ref;
    d["z_start"] = c.teleop.demo.z_start;
    d["v_approach"] = c.teleop.demo.v_approach;
    d["hover_dz"] = c.teleop.demo.hover_dz;
    d["hover_time"] = c.teleop.demo.hover_time;

    json& s = j["sim"];
    s["noise_sigma"] = c.teleop.noise_sigma;
    s["dt"] = c.teleop.dt;
    s["settle_s"] = c.teleop.settle_s;
    s["neutral_z"] = c.teleop.neutral_z;

    json& cl = j["collect"];
    cl["freqs_hz"] = c.collect.freqs_hz;
    cl["heights_m"] = c.collect.heights_m;
    cl["duration_s"] = c.collect.duration_s;
    cl["replay_freq_hz"] = c.collect.replay_freq_hz;
    cl["replay_height_m"] = c.collect.replay_height_m;
    cl["copy_source_freq_hz"] = c.collect.copy_source_freq_hz;
    cl["copy_source_height_m"] = c.collect.copy_source_height_m;

    json& t = j["train"];
    t["batch"] = c.train.batch;
    t["window"] = c.train.window;
    t["epochs"] = c.train.epochs;
    t["lr"] = c.train.lr;
    t["seed"] = c.train.seed;
    t["conv_channels"] = c.train.conv_channels;

    json& ev = j["eval"];
    ev["freqs_hz"] = c.eval.freqs_hz;
    ev["heights_m"] = c.eval.heights_m;
    ev["trials"] = c.eval.trials;
    ev["extrap_freqs_hz"] = c.eval.extrap_freqs_hz;
    ev["duration_s"] = c.eval.duration_s;
    ev["jobs"] = c.eval.jobs;

    json& b = j["bode"];
    b["lo_hz"] = c.bode.lo_hz;
    b["hi_hz"] = c.bode.hi_hz;
    b["points"] = c.bode.points;
    b["amplitude"] = c.bode.amplitude;

    return j.dump(2);
}

void save_config(const Config& c, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << config_json(c) << "\n";
}

Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config " + path);
    json j;
    f >> j;

    Config c = default_config();
    get_if(j, "seed", c.seed);
    get_if(j, "out_dir", c.out_dir);

    if (j.contains("plant")) {
        const json& p = j["plant"];
        get_jv(p, "J", c.teleop.plant.J);
        get_jv(p, "D_visc", c.teleop.plant.D_visc);
        get_jv(p, "G", c.teleop.plant.G);
        get_if(p, "L2", c.teleop.plant.L2);
        get_if(p, "L3", c.teleop.plant.L3);
        get_if(p, "z_base", c.teleop.plant.z_base);
    }
    if (j.contains("gains")) {
        const json& g = j["gains"];
        get_if(g, "Kp", c.teleop.gains.Kp);
        get_if(g, "Kd", c.teleop.gains.Kd);
        get_if(g, "Kf", c.teleop.gains.Kf);
        get_if(g, "g_pd", c.teleop.gains.g_pd);
        get_if(g, "g_dob", c.teleop.gains.g_dob);
        get_if(g, "g_rfob", c.teleop.gains.g_rfob);
    }
    if (j.contains("env")) {
        const json& e = j["env"];
        get_if(e, "K_e", c.teleop.env.K_e);
        get_if(e, "D_e", c.teleop.env.D_e);
        get_if(e, "mu_c", c.teleop.env.mu_c);
        get_if(e, "mu_s", c.teleop.env.mu_s);
        get_if(e, "v_s", c.teleop.env.v_s);
        get_if(e, "k_v", c.teleop.env.k_v);
        get_if(e, "r_in", c.teleop.env.r_in);
        get_if(e, "r_out", c.teleop.env.r_out);
        get_if(e, "phi_min", c.teleop.env.phi_min);
        get_if(e, "phi_max", c.teleop.env.phi_max);
        get_if(e, "n_r", c.teleop.env.n_r);
        get_if(e, "n_phi", c.teleop.env.n_phi);
        get_if(e, "r_e", c.teleop.env.r_e);
        get_if(e, "F_min", c.teleop.env.F_min);
        get_if(e, "dose_min", c.teleop.env.dose_min);
    }
    if (j.contains("demonstrator")) {
        const json& d = j["demonstrator"];
        get_if(d, "A", c.teleop.demo.A);
        get_if(d, "F_d", c.teleop.demo.F_d);
        get_if(d, "k_press", c.teleop.demo.k_press);
        get_if(d, "K_h", c.teleop.demo.K_h);
        get_if(d, "D_h", c.teleop.demo.D_h);
        get_if(d, "ramp_time", c.teleop.demo.ramp_time);
        get_if(d, "press_slow_gain", c.teleop.demo.press_slow_gain);
        get_if(d, "f_ref", c.teleop.demo.f_ref);
        get_if(d, "z_start", c.teleop.demo.z_start);
        get_if(d, "v_approach", c.teleop.demo.v_approach);
        get_if(d, "hover_dz", c.teleop.demo.hover_dz);
        get_if(d, "hover_time", c.teleop.demo.hover_time);
    }
    if (j.contains("sim")) {
        const json& s = j["sim"];
        get_if(s, "noise_sigma", c.teleop.noise_sigma);
        get_if(s, "dt", c.teleop.dt);
        get_if(s, "settle_s", c.teleop.settle_s);
        get_if(s, "neutral_z", c.teleop.neutral_z);
    }
    if (j.contains("collect")) {
        const json& cl = j["collect"];
        get_if(cl, "freqs_hz", c.collect.freqs_hz);
        get_if(cl, "heights_m", c.collect.heights_m);
        get_if(cl, "duration_s", c.collect.duration_s);
        get_if(cl, "replay_freq_hz", c.collect.replay_freq_hz);
        get_if(cl, "replay_height_m", c.collect.replay_height_m);
        get_if(cl, "copy_source_freq_hz", c.collect.copy_source_freq_hz);
        get_if(cl, "copy_source_height_m", c.collect.copy_source_height_m);
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        get_if(t, "batch", c.train.batch);
        get_if(t, "window", c.train.window);
        get_if(t, "epochs", c.train.epochs);
        get_if(t, "lr", c.train.lr);
        get_if(t, "seed", c.train.seed);
        get_if(t, "conv_channels", c.train.conv_channels);
    }
    if (j.contains("eval")) {
        const json& ev = j["eval"];
        get_if(ev, "freqs_hz", c.eval.freqs_hz);
        get_if(ev, "heights_m", c.eval.heights_m);
        get_if(ev, "trials", c.eval.trials);
        get_if(ev, "extrap_freqs_hz", c.eval.extrap_freqs_hz);
        get_if(ev, "duration_s", c.eval.duration_s);
        get_if(ev, "jobs", c.eval.jobs);
    }
    if (j.contains("bode")) {
        const json& b = j["bode"];
        get_if(b, "lo_hz", c.bode.lo_hz);
        get_if(b, "hi_hz", c.bode.hi_hz);
        get_if(b, "points", c.bode.points);
        get_if(b, "amplitude", c.bode.amplitude);
    }
    return c;
}

}  // namespace bilat
