#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "extremo/extremogram.hpp"
#include "extremo/fit.hpp"
#include "extremo/model.hpp"
#include "extremo/tails.hpp"

namespace extremo {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Fully-resolved default configuration for a command; user configs are
/// deep-merged over this, so every run manifest records the complete
/// parameter set actually used.
json default_config(const std::string& command);

/// Deep merge: user values override defaults, objects merge recursively.
json merge_config(json defaults, const json& user);

/// Executes one command described by `config` (any of: simulate, extremogram,
/// bands, fit-uni, fit-biv, var, tail-index, lyapunov, qq, acf,
/// clock-profile, pipeline). Writes the command's output files plus
/// manifest.json into out_dir and returns the manifest. A manifest is itself
/// a valid config (its "config" key is unwrapped), so re-running a manifest
/// reproduces the outputs byte for byte.
json run_command(json config, const std::filesystem::path& out_dir);

// JSON codecs shared by the CLI and the Python module.
BivariateGarchParams bivariate_params_from_json(const json& j);
UnivariateGarchParams univariate_params_from_json(const json& j);
Innovation innovation_from_json(const json& j);
json to_json(const BivariateGarchParams& p);
json to_json(const UnivariateGarchParams& p);
json to_json(const Innovation& innov);
ExtremogramConfig extremogram_config_from_json(const json& j);

}  // namespace extremo
