#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rsense/errors.hpp"
#include "rsense/io.hpp"
#include "rsense/params.hpp"

namespace rsense::cli {

/// Malformed or inconsistent run configuration (exit code 2).
class ConfigError : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

enum class Format { Csv, Json };

struct RunConfig {
    ParamSet params;
    std::optional<PhysicalParams> physical;
    std::vector<double> chi;     ///< scan list; defaults to {params.chi}
    std::vector<double> P_list;  ///< for `critical`; defaults to {params.P}
    double t_min = 0.0;
    double t_max = 100.0;
    std::size_t t_steps = 2001;
    int n_max = 10;
    double horizon = 100.0;
    double dt = 0.25;
    unsigned jobs = 1;
    Format format = Format::Csv;
    std::string out;  ///< empty: stdout

    /// Throws ConfigError on empty or unordered ranges, t_steps < 2, etc.
    void check() const;
};

/// Reads the JSON config schema documented in the README. Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

struct CommandOutput {
    io::Table table;
    nlohmann::json meta;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNumerical = 3;

CommandOutput cmd_features(const RunConfig& config);
CommandOutput cmd_gamma(const RunConfig& config);
CommandOutput cmd_qfi(const RunConfig& config);
CommandOutput cmd_envelope(const RunConfig& config);
CommandOutput cmd_critical(const RunConfig& config);
CommandOutput cmd_nonmarkov(const RunConfig& config);
CommandOutput cmd_convert(const RunConfig& config);

/// Dispatch by subcommand name; throws ConfigError for unknown names.
CommandOutput run_command(std::string_view name, const RunConfig& config);

const std::vector<std::string>& command_names();

/// Measure at horizons T, 2T, 4T from Gamma sampled on 0, dt, 2 dt, ...
/// Used by `nonmarkov`; exposed so synthetic Gamma curves can be fed in.
std::vector<double> nonmarkov_from_samples(std::span<const double> gamma, double dt, double horizon);

/// Writes the table in the configured format. For CSV with a file target a
/// `<out>.json` sidecar carrying `meta` is written next to it.
void write_output(const CommandOutput& output, const RunConfig& config);
void write_output(const CommandOutput& output, Format format, std::ostream& os);

} // namespace rsense::cli
