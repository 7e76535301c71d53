// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "linetrace/models/training.hpp"
#include "linetrace/sim/world.hpp"

namespace linetrace::cli {

/// `linetrace <subcommand> [flags]`. Returns the exit code: 0 on success, 1
/// when a stage fails, 2 on bad usage. Results go to `out`, diagnostics to
/// `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "preset:oval", "preset:s_curve", "preset:test_loop", or a world JSON path.
sim::TrackWorld resolve_world(const std::string& spec);

/// Settings from --config. The file is a JSON object with optional "sim"
/// (simulator settings) and "train" (epochs, batch_size, learning_rate,
/// accuracy_delta) objects.
struct RunConfig {
  sim::SimConfig sim;
  models::TrainConfig train;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace linetrace::cli
