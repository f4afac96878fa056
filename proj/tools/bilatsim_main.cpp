// bilatsim: seeded simulation pipeline for bilateral-teleoperation imitation
// learning on the line-erasing task. Stages: collect, train, bode, replay,
// copy, eval, report.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bilat/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bilateral teleoperation simulation pipeline"};

    std::string config_path;
    std::string out_dir;
    std::string stages_csv = "collect,train,bode,replay,copy,eval,report";
    uint64_t seed = 0;
    bool have_seed = false;
    int epochs = 0;
    bool force = false;

    app.add_option("--config", config_path, "JSON config file (defaults when omitted)");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--stages", stages_csv, "comma-separated stage list");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");
    app.add_option("--epochs", epochs, "training epochs (overrides config)");
    app.add_flag("--force", force, "re-run stages even when outputs exist");

    CLI11_PARSE(app, argc, argv);
    have_seed = seed_opt->count() > 0;

    try {
        bilat::Config cfg =
            config_path.empty() ? bilat::default_config() : bilat::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (have_seed) {
            cfg.seed = seed;
            cfg.train.seed = seed;
        }
        if (epochs > 0) cfg.train.epochs = epochs;

        std::vector<std::string> stages;
        std::stringstream ss(stages_csv);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) stages.push_back(item);

        return bilat::run_pipeline(cfg, stages, force);
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cout << err.dump() << std::endl;
        return 1;
    }
}
