#include "bilat/analysis.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "bilat/dataset.hpp"

namespace bilat {

const char* bode_mode_name(BodeMode m) {
    switch (m) {
        case BodeMode::realistic: return "realistic";
        case BodeMode::realistic_ff: return "realistic_ff";
        case BodeMode::idealized: return "idealized";
    }
    return "?";
}

std::vector<double> log_spaced(double lo_hz, double hi_hz, int n) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n));
    const double la = std::log(lo_hz), lb = std::log(hi_hz);
    for (int i = 0; i < n; ++i)
        out.push_back(std::exp(la + (lb - la) * static_cast<double>(i) / (n - 1)));
    return out;
}

namespace {

BodePoint measure_point_realistic(const PlantParams& p, const ControllerGains& g,
                                  double f, double amplitude, bool feedforward) {
    const double dt = 1e-3;
    const double period = 1.0 / f;
    const int periods = std::max(10, static_cast<int>(std::ceil(2.0 / period)));
    const auto n_ticks = static_cast<size_t>(std::llround(periods * period / dt));
    const auto n_skip = static_cast<size_t>(std::llround((periods / 2) * period / dt));

    SimRobot r;
    r.init_posture(JointVector{}, p);
    FilterState cmd_filt;  // the command channel gets the same measurement chain
    Rng rng(1);

    double si = 0.0, sq = 0.0;
    size_t n_used = 0;

    for (size_t k = 0; k < n_ticks; ++k) {
        const double t = static_cast<double>(k) * dt;
        robot_observe(r, p, g, dt, 0.0, rng);

        const double th_c = amplitude * std::sin(2.0 * M_PI * f * t);
        r.frame.theta_cmd = JointVector{{th_c, 0.0, 0.0}};
        if (feedforward) {
            const JointVector wc =
                pseudo_diff(cmd_filt, JointVector{{th_c, 0.0, 0.0}}, dt, g.g_pd);
            r.frame.omega_cmd = wc;
        } else {
            r.frame.omega_cmd = JointVector{};
        }
        r.frame.tau_cmd = JointVector{};

        robot_act(r, p, g, JointVector{}, nullptr, dt);

        if (k >= n_skip) {
            const double ph = 2.0 * M_PI * f * t;
            si += r.plant.theta[0] * std::sin(ph);
            sq += r.plant.theta[0] * std::cos(ph);
            ++n_used;
        }
    }

    const double scale = 2.0 / static_cast<double>(n_used);
    const double amp = std::hypot(si * scale, sq * scale);
    BodePoint bp;
    bp.freq_hz = f;
    bp.gain_db = 20.0 * std::log10(amp / amplitude);
    bp.phase_deg = std::atan2(sq, si) * 180.0 / M_PI;
    return bp;
}

BodePoint measure_point_idealized(const ControllerGains& g, double f, double amplitude) {
    const double dt = 1e-3;
    const double period = 1.0 / f;
    const int periods = std::max(10, static_cast<int>(std::ceil(2.0 / period)));
    const auto n_ticks = static_cast<size_t>(std::llround(periods * period / dt));
    const auto n_skip = static_cast<size_t>(std::llround((periods / 2) * period / dt));

    double th = 0.0, w = 0.0;
    double si = 0.0, sq = 0.0;
    size_t n_used = 0;

    for (size_t k = 0; k < n_ticks; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double th_c = amplitude * std::sin(2.0 * M_PI * f * t);
        const double w_c = amplitude * 2.0 * M_PI * f * std::cos(2.0 * M_PI * f * t);
        const double acc = g.Kp * (th_c - th) + g.Kd * (w_c - w);
        w += dt * acc;
        th += dt * w;
        if (k >= n_skip) {
            const double ph = 2.0 * M_PI * f * t;
            si += th * std::sin(ph);
            sq += th * std::cos(ph);
            ++n_used;
        }
    }
    const double scale = 2.0 / static_cast<double>(n_used);
    const double amp = std::hypot(si * scale, sq * scale);
    BodePoint bp;
    bp.freq_hz = f;
    bp.gain_db = 20.0 * std::log10(amp / amplitude);
    bp.phase_deg = std::atan2(sq, si) * 180.0 / M_PI;
    return bp;
}

}  // namespace

std::vector<BodePoint> bode_sweep(const PlantParams& p, const ControllerGains& g,
                                  const std::vector<double>& freqs_hz, double amplitude,
                                  BodeMode mode) {
    std::vector<BodePoint> out;
    out.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        switch (mode) {
            case BodeMode::realistic:
                out.push_back(measure_point_realistic(p, g, f, amplitude, false));
                break;
            case BodeMode::realistic_ff:
                out.push_back(measure_point_realistic(p, g, f, amplitude, true));
                break;
            case BodeMode::idealized:
                out.push_back(measure_point_idealized(g, f, amplitude));
                break;
        }
    }
    return out;
}

double ideal_gain_db(const ControllerGains& g, double freq_hz) {
    const double w = 2.0 * M_PI * freq_hz;
    const double num = std::hypot(g.Kp, w * g.Kd);
    const double den = std::hypot(g.Kp - w * w, w * g.Kd);
    return 20.0 * std::log10(num / den);
}

std::optional<double> gain_crossing_hz(const std::vector<BodePoint>& pts,
                                       double level_db) {
    for (size_t i = 1; i < pts.size(); ++i) {
        const double a = pts[i - 1].gain_db, b = pts[i].gain_db;
        if ((a > level_db && b <= level_db) || (a >= level_db && b < level_db)) {
            const double frac = (a - level_db) / (a - b);
            return pts[i - 1].freq_hz +
                   frac * (pts[i].freq_hz - pts[i - 1].freq_hz);
        }
    }
    return std::nullopt;
}

TaskOutcome score_outcome(const Episode& e, double settle_s) {
    TaskOutcome oc;
    oc.f_cmd = e.meta.f_target;
    oc.height_m = e.meta.height_m;
    oc.coverage = e.coverage.empty() ? 0.0 : e.coverage.back();
    oc.success = oc.coverage >= 0.90;
    const size_t k0 = std::min(e.size(), static_cast<size_t>(settle_s * 1000.0));
    std::vector<double> th1;
    th1.reserve(e.size() - k0);
    for (size_t k = k0; k < e.size(); ++k) th1.push_back(e.th_s[k][0]);
    oc.fft_peak_hz = th1.size() >= 64 ? fft_peak(th1, 1000.0) : 0.0;
    return oc;
}

namespace {
size_t settle_index(const Episode& e, double settle_s) {
    return std::min(e.size(), static_cast<size_t>(settle_s * 1000.0));
}
}  // namespace

double rms_sync_error(const Episode& e, double settle_s) {
    const size_t k0 = settle_index(e, settle_s);
    double acc = 0.0;
    size_t n = 0;
    for (size_t k = k0; k < e.size(); ++k)
        for (int i = 0; i < 3; ++i) {
            const double d = e.th_m[k][i] - e.th_s[k][i];
            acc += d * d;
            ++n;
        }
    return n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
}

double rms_tau_sum(const Episode& e, double settle_s) {
    const size_t k0 = settle_index(e, settle_s);
    double acc = 0.0;
    size_t n = 0;
    for (size_t k = k0; k < e.size(); ++k)
        for (int i = 0; i < 3; ++i) {
            const double d = e.tau_m[k][i] + e.tau_s[k][i];
            acc += d * d;
            ++n;
        }
    return n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
}

double mean_tau_sum_j1(const Episode& e, double settle_s) {
    const size_t k0 = settle_index(e, settle_s);
    double acc = 0.0;
    size_t n = 0;
    for (size_t k = k0; k < e.size(); ++k) {
        acc += e.tau_m[k][0] + e.tau_s[k][0];
        ++n;
    }
    return n ? acc / static_cast<double>(n) : 0.0;
}

double peak_to_peak_theta_s1(const Episode& e, double settle_s) {
    const size_t k0 = settle_index(e, settle_s);
    double lo = 1e300, hi = -1e300;
    for (size_t k = k0; k < e.size(); ++k) {
        lo = std::min(lo, e.th_s[k][0]);
        hi = std::max(hi, e.th_s[k][0]);
    }
    return k0 < e.size() ? hi - lo : 0.0;
}

double peak_abs_tau_s1(const Episode& e, double settle_s) {
    const size_t k0 = settle_index(e, settle_s);
    double m = 0.0;
    for (size_t k = k0; k < e.size(); ++k) m = std::max(m, std::fabs(e.tau_s[k][0]));
    return m;
}

SineFit fit_sine(const std::vector<double>& x, double f_hz, double fs_hz,
                 double t_start_s) {
    const auto k0 = static_cast<size_t>(t_start_s * fs_hz);
    double si = 0.0, sq = 0.0, mean = 0.0;
    size_t n = 0;
    for (size_t k = k0; k < x.size(); ++k) {
        mean += x[k];
        ++n;
    }
    if (n == 0) return {};
    mean /= static_cast<double>(n);
    for (size_t k = k0; k < x.size(); ++k) {
        const double ph = 2.0 * M_PI * f_hz * static_cast<double>(k) / fs_hz;
        si += (x[k] - mean) * std::sin(ph);
        sq += (x[k] - mean) * std::cos(ph);
    }
    const double scale = 2.0 / static_cast<double>(n);
    SineFit fit;
    fit.amplitude = std::hypot(si * scale, sq * scale);
    fit.phase_deg = std::atan2(sq, si) * 180.0 / M_PI;
    return fit;
}

double tracking_rms(const std::vector<double>& a, const std::vector<double>& b,
                    size_t k_start) {
    const size_t n = std::min(a.size(), b.size());
    if (k_start >= n) return 0.0;
    double acc = 0.0;
    for (size_t k = k_start; k < n; ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(n - k_start));
}

namespace {

struct TrialSpec {
    std::string method;
    double f = 0.0;
    double h = 0.0;
    int trial = 0;
    bool extrap = false;
};

uint64_t trial_seed(uint64_t base, const TrialSpec& ts) {
    uint64_t s = Rng::mix(base, static_cast<uint64_t>(std::llround(ts.f * 1e4)));
    s = Rng::mix(s, static_cast<uint64_t>(std::llround(ts.h * 1e5)));
    s = Rng::mix(s, static_cast<uint64_t>(ts.trial) + (ts.method == "copy" ? 1000u : 0u));
    return s;
}

}  // namespace

GridResult evaluate_grid(const ModelParams& model, const Episode& copy_source,
                         const TeleopConfig& cfg, const GridSpec& spec) {
    std::vector<TrialSpec> trials;
    for (const char* method : {"proposed", "copy"})
        for (double f : spec.freqs_hz)
            for (double h : spec.heights_m)
                for (int tr = 0; tr < spec.trials; ++tr)
                    trials.push_back({method, f, h, tr, false});
    for (double f : spec.extrap_freqs_hz)
        for (int tr = 0; tr < spec.trials; ++tr)
            trials.push_back({"proposed", f, spec.extrap_height_m, tr, true});

    std::vector<TaskOutcome> outcomes(trials.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= trials.size()) return;
            const TrialSpec& ts = trials[i];
            RunConfig rc;
            rc.schedule = {{0.0, ts.f}};
            rc.height_m = ts.h;
            rc.duration_s = spec.duration_s;
            rc.settle_s = spec.settle_s;
            rc.seed = trial_seed(spec.seed, ts);
            try {
                const RunResult rr = ts.method == "proposed"
                                         ? autonomous_run(model, cfg, rc)
                                         : motion_copy_run(copy_source, ts.f, cfg, rc);
                outcomes[i] = rr.outcome;
            } catch (const std::exception&) {
                TaskOutcome oc;
                oc.f_cmd = ts.f;
                oc.height_m = ts.h;
                outcomes[i] = oc;  // blow-up counts as failure
            }
        }
    };

    unsigned jobs = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(trials.size()));
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    GridResult gr;
    for (const char* method : {"proposed", "copy"})
        for (double f : spec.freqs_hz)
            for (double h : spec.heights_m) {
                GridCell cell;
                cell.method = method;
                cell.f_cmd = f;
                cell.height_m = h;
                for (size_t i = 0; i < trials.size(); ++i) {
                    const TrialSpec& ts = trials[i];
                    if (ts.extrap || ts.method != method || ts.f != f || ts.h != h)
                        continue;
                    ++cell.trials;
                    cell.successes += outcomes[i].success ? 1 : 0;
                    cell.mean_coverage += outcomes[i].coverage;
                    cell.mean_fft_peak += outcomes[i].fft_peak_hz;
                }
                if (cell.trials > 0) {
                    cell.mean_coverage /= cell.trials;
                    cell.mean_fft_peak /= cell.trials;
                }
                gr.cells.push_back(cell);
            }

    for (size_t i = 0; i < trials.size(); ++i) {
        const TrialSpec& ts = trials[i];
        FreqReproRow row;
        row.method = ts.extrap ? "proposed_extrap" : ts.method;
        row.f_cmd = ts.f;
        row.height_m = ts.h;
        row.trial = ts.trial;
        row.fft_peak_hz = outcomes[i].fft_peak_hz;
        row.success = outcomes[i].success;
        gr.repro.push_back(row);
    }
    return gr;
}

}  // namespace bilat
