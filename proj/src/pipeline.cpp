#include "bilat/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "bilat/errors.hpp"
#include "bilat/hash.hpp"
#include "bilat/pipeline.hpp"

namespace bilat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v, int prec = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

void ensure_dirs(const Config& cfg) {
    for (const char* sub : {"episodes", "dataset", "models", "results"})
        fs::create_directories(fs::path(cfg.out_dir) / sub);
}

void manifest_record(const Config& cfg, const std::string& stage,
                     const std::vector<std::string>& paths) {
    const fs::path mpath = fs::path(cfg.out_dir) / "manifest.json";
    json m;
    if (fs::exists(mpath)) {
        std::ifstream f(mpath);
        f >> m;
    }
    m["config_hash"] = hex64(fnv1a64(config_json(cfg)));
    m["seed"] = cfg.seed;
    if (!m.contains("artifacts")) m["artifacts"] = json::object();
    for (const std::string& p : paths) {
        const std::string rel = fs::relative(p, cfg.out_dir).string();
        m["artifacts"][rel] = {{"hash", hex64(hash_file(p))}, {"stage", stage}};
    }
    std::ofstream f(mpath);
    f << m.dump(2) << "\n";
}

bool all_exist(const std::vector<std::string>& paths) {
    for (const auto& p : paths)
        if (!fs::exists(p)) return false;
    return !paths.empty();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

uint64_t episode_seed(const Config& cfg, double f, double h) {
    uint64_t s = Rng::mix(cfg.seed, static_cast<uint64_t>(std::llround(f * 1e4)));
    return Rng::mix(s, static_cast<uint64_t>(std::llround(h * 1e5)));
}

}  // namespace

std::string episode_csv_path(const Config& cfg, double f_hz, double h_m) {
    return (fs::path(cfg.out_dir) / "episodes" /
            ("ep_f" + fmt(f_hz) + "_h" + fmt(h_m, 3) + ".csv"))
        .string();
}

std::string replay_episode_path(const Config& cfg) {
    return (fs::path(cfg.out_dir) / "episodes" /
            ("ep_replay_f" + fmt(cfg.collect.replay_freq_hz) + "_h" +
             fmt(cfg.collect.replay_height_m, 3) + ".csv"))
        .string();
}

std::string model_path(const Config& cfg) {
    return (fs::path(cfg.out_dir) / "models" / "model.json").string();
}

std::string dataset_pairs_path(const Config& cfg) {
    return (fs::path(cfg.out_dir) / "dataset" / "pairs.bin").string();
}

std::string normalizer_path(const Config& cfg) {
    return (fs::path(cfg.out_dir) / "dataset" / "normalizer.json").string();
}

void stage_collect(const Config& cfg, bool force) {
    ensure_dirs(cfg);
    std::vector<std::string> outputs;
    for (double f : cfg.collect.freqs_hz)
        for (double h : cfg.collect.heights_m) outputs.push_back(episode_csv_path(cfg, f, h));
    outputs.push_back(replay_episode_path(cfg));

    if (!force && all_exist(outputs)) {
        std::cerr << "[collect] outputs exist, skipping\n";
        return;
    }

    std::vector<std::string> written;
    for (double f : cfg.collect.freqs_hz)
        for (double h : cfg.collect.heights_m) {
            const Episode ep = collect_demonstration(cfg.teleop, f, h,
                                                     cfg.collect.duration_s,
                                                     episode_seed(cfg, f, h));
            const std::string path = episode_csv_path(cfg, f, h);
            write_episode_csv(ep, path);
            write_episode_meta(ep.meta, path.substr(0, path.size() - 4) + ".json");
            written.push_back(path);
            std::cerr << "[collect] " << path << "\n";
        }

    const Episode replay_ep = collect_demonstration(
        cfg.teleop, cfg.collect.replay_freq_hz, cfg.collect.replay_height_m,
        cfg.collect.duration_s,
        episode_seed(cfg, cfg.collect.replay_freq_hz, cfg.collect.replay_height_m) + 1);
    write_episode_csv(replay_ep, replay_episode_path(cfg));
    write_episode_meta(replay_ep.meta,
                       replay_episode_path(cfg).substr(0, replay_episode_path(cfg).size() - 4) +
                           ".json");
    written.push_back(replay_episode_path(cfg));

    manifest_record(cfg, "collect", written);
}

namespace {

struct LoadedEpisodes {
    std::vector<Episode> episodes;
    std::vector<double> labels;
};

LoadedEpisodes load_training_episodes(const Config& cfg) {
    LoadedEpisodes out;
    for (double f : cfg.collect.freqs_hz)
        for (double h : cfg.collect.heights_m) {
            const std::string path = episode_csv_path(cfg, f, h);
            if (!fs::exists(path))
                throw PipelineError("missing episode artifact: " + path +
                                    " (run the collect stage first)");
            Episode ep = read_episode_csv(path);
            ep.meta = read_episode_meta(path.substr(0, path.size() - 4) + ".json");
            out.labels.push_back(label_episode(ep));
            out.episodes.push_back(std::move(ep));
        }
    return out;
}

}  // namespace

void stage_train(const Config& cfg, bool force) {
    ensure_dirs(cfg);
    const std::string mpath = model_path(cfg);
    const fs::path loss_path = fs::path(cfg.out_dir) / "models" / "loss.csv";
    if (!force && fs::exists(mpath)) {
        std::cerr << "[train] model exists, skipping\n";
        return;
    }

    const LoadedEpisodes data = load_training_episodes(cfg);

    std::vector<Series50> series;
    for (size_t e = 0; e < data.episodes.size(); ++e) {
        auto s = downsample_augment(data.episodes[e], static_cast<int>(e));
        series.insert(series.end(), s.begin(), s.end());
    }
    const Dataset ds = build_dataset(series, data.labels);
    write_dataset(ds, dataset_pairs_path(cfg), normalizer_path(cfg));

    json labels_json;
    for (size_t e = 0; e < data.labels.size(); ++e) {
        labels_json.push_back({{"f_target", data.episodes[e].meta.f_target},
                               {"height_m", data.episodes[e].meta.height_m},
                               {"label_hz", data.labels[e]}});
    }
    const std::string labels_path =
        (fs::path(cfg.out_dir) / "dataset" / "labels.json").string();
    write_text(labels_path, labels_json.dump(2) + "\n");

    std::cerr << "[train] " << ds.total_pairs << " pairs, training "
              << cfg.train.epochs << " epochs\n";
    const TrainResult tr = train_model(ds, cfg.train);
    save_model(tr.params, mpath);

    std::string loss_csv = "epoch,loss\n";
    for (size_t i = 0; i < tr.loss_curve.size(); ++i)
        loss_csv += std::to_string(i) + "," + std::to_string(tr.loss_curve[i]) + "\n";
    write_text(loss_path.string(), loss_csv);

    manifest_record(cfg, "train",
                    {mpath, loss_path.string(), dataset_pairs_path(cfg),
                     normalizer_path(cfg), labels_path});
}

void stage_bode(const Config& cfg, bool force) {
    ensure_dirs(cfg);
    const std::string csv_path = (fs::path(cfg.out_dir) / "results" / "bode.csv").string();
    const std::string sum_path =
        (fs::path(cfg.out_dir) / "results" / "bode_summary.json").string();
    if (!force && all_exist({csv_path, sum_path})) {
        std::cerr << "[bode] outputs exist, skipping\n";
        return;
    }

    const auto freqs = log_spaced(cfg.bode.lo_hz, cfg.bode.hi_hz, cfg.bode.points);
    std::string csv = "mode,freq_hz,gain_db,phase_deg\n";
    json summary;
    for (BodeMode mode : {BodeMode::realistic, BodeMode::realistic_ff, BodeMode::idealized}) {
        const auto pts =
            bode_sweep(cfg.teleop.plant, cfg.teleop.gains, freqs, cfg.bode.amplitude, mode);
        for (const BodePoint& bp : pts)
            csv += std::string(bode_mode_name(mode)) + "," + std::to_string(bp.freq_hz) +
                   "," + std::to_string(bp.gain_db) + "," + std::to_string(bp.phase_deg) +
                   "\n";
        const auto crossing = gain_crossing_hz(pts, -3.0);
        summary[bode_mode_name(mode)]["crossing_hz"] =
            crossing ? json(*crossing) : json(nullptr);
        if (mode == BodeMode::idealized) {
            double worst = 0.0;
            for (const BodePoint& bp : pts) {
                if (2.0 * M_PI * bp.freq_hz > 20.0) continue;
                worst = std::max(worst,
                                 std::fabs(bp.gain_db - ideal_gain_db(cfg.teleop.gains,
                                                                      bp.freq_hz)));
            }
            summary["idealized"]["max_dev_db_below_20rad"] = worst;
        }
    }
    summary["reference_bandwidth_hz"] = 2.3;  // measured on the physical device

    write_text(csv_path, csv);
    write_text(sum_path, summary.dump(2) + "\n");
    manifest_record(cfg, "bode", {csv_path, sum_path});
}

void stage_replay(const Config& cfg, bool force) {
    ensure_dirs(cfg);
    const std::string out_path =
        (fs::path(cfg.out_dir) / "results" / "replay.json").string();
    if (!force && fs::exists(out_path)) {
        std::cerr << "[replay] output exists, skipping\n";
        return;
    }
    const std::string src_path = replay_episode_path(cfg);
    if (!fs::exists(src_path))
        throw PipelineError("missing replay source episode (run the collect stage first)");
    Episode src = read_episode_csv(src_path);
    src.meta = read_episode_meta(src_path.substr(0, src_path.size() - 4) + ".json");

    RunConfig rc;
    rc.schedule = {{0.0, src.meta.f_target}};
    rc.height_m = src.meta.height_m;
    rc.duration_s = src.meta.duration_s;
    rc.seed = Rng::mix(cfg.seed, 0x5e91aULL);
    rc.settle_s = cfg.teleop.settle_s;

    const RunResult master_rr = replay_run(src, ReplaySide::master, cfg.teleop, rc);
    const RunResult slave_rr = replay_run(src, ReplaySide::slave, cfg.teleop, rc);

    const std::vector<double> src_th1 = src.slave_theta1();
    const size_t k0 = static_cast<size_t>(rc.settle_s * 1000.0);
    const double f = src.meta.f_target;

    const SineFit fit_src = fit_sine(src_th1, f, 1000.0, rc.settle_s);
    const SineFit fit_master =
        fit_sine(master_rr.episode.slave_theta1(), f, 1000.0, rc.settle_s);
    const SineFit fit_slave =
        fit_sine(slave_rr.episode.slave_theta1(), f, 1000.0, rc.settle_s);

    auto wrap_deg = [](double d) {
        while (d > 180.0) d -= 360.0;
        while (d < -180.0) d += 360.0;
        return d;
    };

    json out;
    out["freq_hz"] = f;
    out["master_replay"]["tracking_rms"] =
        tracking_rms(master_rr.episode.slave_theta1(), src_th1, k0);
    out["master_replay"]["amplitude_ratio"] = fit_master.amplitude / fit_src.amplitude;
    out["master_replay"]["phase_lag_deg"] =
        wrap_deg(fit_src.phase_deg - fit_master.phase_deg);
    out["slave_replay"]["tracking_rms"] =
        tracking_rms(slave_rr.episode.slave_theta1(), src_th1, k0);
    out["slave_replay"]["amplitude_ratio"] = fit_slave.amplitude / fit_src.amplitude;
    out["slave_replay"]["phase_lag_deg"] =
        wrap_deg(fit_src.phase_deg - fit_slave.phase_deg);

    write_text(out_path, out.dump(2) + "\n");
    manifest_record(cfg, "replay", {out_path});
}

namespace {

Episode load_copy_source(const Config& cfg) {
    const std::string path = episode_csv_path(cfg, cfg.collect.copy_source_freq_hz,
                                              cfg.collect.copy_source_height_m);
    if (!fs::exists(path))
        throw PipelineError("missing copy source episode (run the collect stage first)");
    Episode ep = read_episode_csv(path);
    ep.meta = read_episode_meta(path.substr(0, path.size() - 4) + ".json");
    return ep;
}

}  // namespace

void stage_copy(const Config& cfg, bool force) {
    ensure_dirs(cfg);
    const std::string out_path = (fs::path(cfg.out_dir) / "results" / "copy.csv").string();
    if (!force && fs::exists(out_path)) {
        std::cerr << "[copy] output exists, skipping\n";
        return;
    }
    const Episode src = load_copy_source(cfg);

    std::string csv = "f_dst,height_m,coverage,success,fft_peak_hz\n";
    for (double f : cfg.eval.freqs_hz) {
        RunConfig rc;
        rc.schedule = {{0.0, f}};
        rc.height_m = cfg.collect.copy_source_height_m;
        rc.duration_s = cfg.eval.duration_s;
        rc.seed = Rng::mix(cfg.seed, static_cast<uint64_t>(std::llround(f * 1e4)) + 77);
        rc.settle_s = cfg.teleop.settle_s;
        const RunResult rr = motion_copy_run(src, f, cfg.teleop, rc);
        csv += std::to_string(f) + "," + std::to_string(rc.height_m) + "," +
               std::to_string(rr.outcome.coverage) + "," +
               std::to_string(rr.outcome.success ? 1 : 0) + "," +
               std::to_string(rr.outcome.fft_peak_hz) + "\n";
    }
    write_text(out_path, csv);
    manifest_record(cfg, "copy", {out_path});
}

void stage_eval(const Config& cfg, bool force) {
    ensure_dirs(cfg);
    const std::string grid_path = (fs::path(cfg.out_dir) / "results" / "grid.csv").string();
    const std::string repro_path =
        (fs::path(cfg.out_dir) / "results" / "freq_repro.csv").string();
    const std::string sum_path =
        (fs::path(cfg.out_dir) / "results" / "eval_summary.json").string();
    if (!force && all_exist({grid_path, repro_path, sum_path})) {
        std::cerr << "[eval] outputs exist, skipping\n";
        return;
    }
    if (!fs::exists(model_path(cfg)))
        throw PipelineError("missing model artifact (run the train stage first)");

    const ModelParams model = load_model(model_path(cfg));
    const Episode copy_src = load_copy_source(cfg);

    GridSpec spec;
    spec.freqs_hz = cfg.eval.freqs_hz;
    spec.heights_m = cfg.eval.heights_m;
    spec.trials = cfg.eval.trials;
    spec.extrap_freqs_hz = cfg.eval.extrap_freqs_hz;
    spec.extrap_height_m = cfg.collect.copy_source_height_m;
    spec.seed = cfg.seed;
    spec.duration_s = cfg.eval.duration_s;
    spec.settle_s = cfg.teleop.settle_s;
    spec.jobs = cfg.eval.jobs;

    const GridResult gr = evaluate_grid(model, copy_src, cfg.teleop, spec);

    std::string grid_csv = "method,f_cmd,height_m,trials,successes,mean_coverage,mean_fft_peak\n";
    for (const GridCell& c : gr.cells)
        grid_csv += c.method + "," + std::to_string(c.f_cmd) + "," +
                    std::to_string(c.height_m) + "," + std::to_string(c.trials) + "," +
                    std::to_string(c.successes) + "," + std::to_string(c.mean_coverage) +
                    "," + std::to_string(c.mean_fft_peak) + "\n";
    write_text(grid_path, grid_csv);

    std::string repro_csv = "method,f_cmd,height_m,trial,fft_peak_hz,success\n";
    for (const FreqReproRow& r : gr.repro)
        repro_csv += r.method + "," + std::to_string(r.f_cmd) + "," +
                     std::to_string(r.height_m) + "," + std::to_string(r.trial) + "," +
                     std::to_string(r.fft_peak_hz) + "," +
                     std::to_string(r.success ? 1 : 0) + "\n";
    write_text(repro_path, repro_csv);

    int prop_succ = 0, prop_total = 0, copy_succ = 0, copy_total = 0;
    bool per_cell_ok = true;
    for (const GridCell& c : gr.cells) {
        if (c.method == "proposed") {
            prop_succ += c.successes;
            prop_total += c.trials;
        } else {
            copy_succ += c.successes;
            copy_total += c.trials;
        }
    }
    for (const GridCell& c : gr.cells) {
        if (c.method != "proposed") continue;
        for (const GridCell& d : gr.cells)
            if (d.method == "copy" && d.f_cmd == c.f_cmd && d.height_m == c.height_m &&
                c.successes < d.successes)
                per_cell_ok = false;
    }

    json summary;
    summary["proposed_success_rate"] =
        prop_total ? static_cast<double>(prop_succ) / prop_total : 0.0;
    summary["copy_success_rate"] =
        copy_total ? static_cast<double>(copy_succ) / copy_total : 0.0;
    summary["proposed_ge_copy_everywhere"] = per_cell_ok;
    summary["reference_success_rate"] = 0.982;  // physical-device result
    write_text(sum_path, summary.dump(2) + "\n");

    manifest_record(cfg, "eval", {grid_path, repro_path, sum_path});
}

void stage_report(const Config& cfg, bool force) {
    ensure_dirs(cfg);
    const std::string out_path =
        (fs::path(cfg.out_dir) / "results" / "summary.json").string();
    if (!force && fs::exists(out_path)) {
        std::cerr << "[report] output exists, skipping\n";
        return;
    }

    json report;
    const fs::path results = fs::path(cfg.out_dir) / "results";
    for (const char* name : {"bode_summary.json", "replay.json", "eval_summary.json"}) {
        const fs::path p = results / name;
        if (fs::exists(p)) {
            std::ifstream f(p);
            json j;
            f >> j;
            std::string key = name;
            key = key.substr(0, key.find('.'));
            report[key] = j;
        }
    }
    report["artifacts_hashed"] = true;
    write_text(out_path, report.dump(2) + "\n");
    manifest_record(cfg, "report", {out_path});
}

int run_pipeline(const Config& cfg, const std::vector<std::string>& stages, bool force) {
    for (const std::string& s : stages) {
        if (s == "collect") stage_collect(cfg, force);
        else if (s == "train") stage_train(cfg, force);
        else if (s == "bode") stage_bode(cfg, force);
        else if (s == "replay") stage_replay(cfg, force);
        else if (s == "copy") stage_copy(cfg, force);
        else if (s == "eval") stage_eval(cfg, force);
        else if (s == "report") stage_report(cfg, force);
        else throw PipelineError("unknown stage: " + s);
    }
    return 0;
}

}  // namespace bilat
