#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "tempexit/dynamics.hpp"

namespace tempexit::cli {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int {
    exit_pass = 0,
    exit_comparison_failure = 1,
    exit_config_error = 2,
    exit_censored = 3,
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct ExperimentConfig {
    std::string driver = "gaussian";  // gaussian | stable
    double alpha = 1.0;
    double mu = 0.1;
    double beta = 1.5;
    double eps = 1.0;
    double a = 1.0;  // Gaussian diffusion coefficient
    int dim = 1;
    double radius = 10.0;
    // Start points. In dim >= 2 each value is a radial coordinate, started at (x0, 0, ...).
    std::vector<double> x0{0.0};
    double ds = 0.01;
    std::uint64_t trajectories = 10000;
    std::uint64_t max_steps = 100'000'000;
    std::uint64_t seed = 1;
    std::string out = "-";
    OutputFormat format = OutputFormat::csv;
    std::optional<double> rel_tol;  // per-command default when unset
    unsigned workers = 0;           // never recorded: output is worker-independent
    ExitCheck exit_check = ExitCheck::bridge;
};

// Apply one key=value setting (flag names without the leading dashes).
// Throws ConfigError on unknown keys or unparsable values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Parse a flat key=value file; '#' starts a comment.
std::map<std::string, std::string> read_settings_file(const std::string& path);

// "lo:hi:count", inclusive of both ends.
std::vector<double> parse_grid(const std::string& spec);

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Report {
    nlohmann::ordered_json metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// CSV: "#<metadata json>", header line, then one line per row. Doubles are
// written in shortest round-trip form.
std::string render_csv(const Report& r);
std::string render_json(const Report& r);
std::string render(const Report& r, OutputFormat f);
std::string format_number(double v);

struct CommandResult {
    Report report;
    int exit_code = exit_pass;
};

CommandResult cmd_mfet(const ExperimentConfig& cfg);
CommandResult cmd_escape(const ExperimentConfig& cfg);
CommandResult cmd_analytic(const ExperimentConfig& cfg);
CommandResult cmd_ratio(const ExperimentConfig& cfg);

std::vector<std::string> preset_names();
// Runs a figure preset; `overrides` are applied on top of every run.
CommandResult run_preset(const std::string& name, const std::map<std::string, std::string>& overrides);

int run(int argc, char** argv);

}  // namespace tempexit::cli
