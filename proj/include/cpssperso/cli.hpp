#ifndef CPSSPERSO_CLI_HPP_
#define CPSSPERSO_CLI_HPP_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpssperso/dqn.hpp"
#include "cpssperso/perso.hpp"
#include "cpssperso/rl_core.hpp"
#include "cpssperso/workshop_env.hpp"

namespace cpssperso::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

// One experiment: every section of the config file after defaults are filled
// in. Unknown keys are rejected so that typos cannot silently fall back to a
// default.
struct ExperimentConfig {
  std::string run_id = "run";
  std::filesystem::path output_dir = "runs";
  std::optional<std::filesystem::path> graph;  // absolute once loaded
  env::EnvParams env;
  rl::LearningSchedule schedule = rl::LearningSchedule::defaults_for(5000);
  dqn::DqnConfig dqn;
  std::optional<perso::RoleConfig> roles;
  std::vector<perso::ObjectiveSpec> objectives;
};

// A relative graph path is resolved against `base_dir`; the output directory
// stays relative to the working directory. Throws
// Error(Config) on schema problems.
ExperimentConfig config_from_json(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = {});
// Canonical form: every field present, fixed key order, so equal configs
// serialise to equal bytes.
nlohmann::json config_to_json(const ExperimentConfig& config);

// Accepts a plain config or a run manifest (its embedded "config" is used).
// Throws Error(Io) or Error(Parse) for unreadable or malformed files.
ExperimentConfig load_config(const std::filesystem::path& path);

// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// Applies CPSSPERSO_SEED (decimal) to the env and dqn seeds when set.
void apply_seed_override(ExperimentConfig& config);

// Environment the agents train on: when roles are configured they are bound
// (against the graph if one is given) and assembled into the RL task, whose
// influencing contexts replace env.contexts. Warnings from the binding are
// appended to `warnings`.
env::EnvParams resolve_env(const ExperimentConfig& config,
                           std::vector<std::string>* warnings = nullptr);

// Exit code for an exception escaping a subcommand: 2 for configuration and
// validation errors, 3 for I/O and parse errors, 1 otherwise.
int exit_code_for(const std::exception& e);

// Moving average over full windows of `window` values; a single mean of all
// values when window exceeds the series length. Empty input gives empty
// output.
std::vector<double> moving_average(const std::vector<double>& values,
                                   std::size_t window);

// Entry point behind the `cpssperso` executable.
int run(int argc, char** argv);

}  // namespace cpssperso::cli

#endif  // CPSSPERSO_CLI_HPP_
