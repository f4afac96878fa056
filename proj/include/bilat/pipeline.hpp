#pragma once

#include <string>
#include <vector>

#include "bilat/config.hpp"

namespace bilat {

// Stage runner: collect -> train -> {bode, replay, copy, eval} -> report.
// Every stage is idempotent: it skips itself when its outputs already exist
// unless `force` is set. Artifacts and their content hashes are recorded in
// <out_dir>/manifest.json.
int run_pipeline(const Config& cfg, const std::vector<std::string>& stages, bool force);

// individual stages (exposed for tests)
void stage_collect(const Config& cfg, bool force);
void stage_train(const Config& cfg, bool force);
void stage_bode(const Config& cfg, bool force);
void stage_replay(const Config& cfg, bool force);
void stage_copy(const Config& cfg, bool force);
void stage_eval(const Config& cfg, bool force);
void stage_report(const Config& cfg, bool force);

// artifact path helpers
std::string episode_csv_path(const Config& cfg, double f_hz, double h_m);
std::string replay_episode_path(const Config& cfg);
std::string model_path(const Config& cfg);
std::string dataset_pairs_path(const Config& cfg);
std::string normalizer_path(const Config& cfg);

}  // namespace bilat
