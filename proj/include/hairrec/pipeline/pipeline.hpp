#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace hairrec::pipeline {

// A stage blew up mid-run; the config itself was fine.
struct StageError : std::runtime_error {
  StageError(const std::string& stage_name, const std::string& message)
      : std::runtime_error(stage_name + ": " + message), stage(stage_name) {}
  std::string stage;
};

// Config for the bundled synthetic demo scene: 50 wavy strands, 24 views,
// 30% noise, all downstream stages enabled.
nlohmann::json demo_config();

// Generate a synthetic scene (ground-truth strands, scalp, cameras, noisy
// cloud, per-view orientation/confidence maps) into `scene_dir` from the
// "synth" config section. Returns the artifact counts.
nlohmann::json synth_scene(const nlohmann::json& synth_config,
                           const std::filesystem::path& scene_dir);

struct RunReport {
  nlohmann::json summary;              // per-stage wall time and counts
  std::filesystem::path strands_path;  // final geometry
};

// Execute the staged reconstruction described by `config`. Relative paths
// resolve against `base_dir`. Stages whose outputs already exist are
// skipped unless `force`; `threads` > 0 caps the worker count.
RunReport run_pipeline(const nlohmann::json& config, const std::filesystem::path& base_dir,
                       bool force = false, int threads = 0);
RunReport run_pipeline_file(const std::filesystem::path& config_path, bool force = false,
                            int threads = 0);

}  // namespace hairrec::pipeline
