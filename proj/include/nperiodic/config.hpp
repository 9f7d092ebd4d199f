#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nperiodic/bilinear.hpp"
#include "nperiodic/field.hpp"
#include "nperiodic/residual.hpp"
#include "nperiodic/seed.hpp"
#include "nperiodic/solver.hpp"

namespace nperiodic {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluates scalar expressions such as "0.46*2pi", "1*2pi/10" or "-(3/4)".
/// Supports + - * /, parentheses, `pi`, and implicit products like "2pi".
double evaluate_expression(std::string_view text);

struct RunConfig {
    std::string label = "run";
    BilinearSystem system;
    GivenParams given;
    SeedConfig seed;
    SolverConfig solver;
    double tail_tol = kDefaultTailTol;
    std::optional<int> m_max;
    GridSpec grid;
    bool write_grid = false;
    GridFormat grid_format = GridFormat::csv;
    std::filesystem::path out_dir = ".";
    OracleSampling oracle;
};

struct BatchConfig {
    std::vector<RunConfig> rows;
};

/// Command-line overrides applied on top of a parsed config.
struct Overrides {
    std::optional<std::filesystem::path> out_dir;
    std::optional<SeedMode> seed_mode;
    std::optional<std::uint64_t> rng_seed;
    std::optional<int> max_iter;
    std::optional<int> trunc_m;
};

SeedMode parse_seed_mode(std::string_view s);
std::string to_string(SeedMode m);

/// YAML run description. Throws ConfigError with "path:line: field: message".
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(std::string_view yaml_text, const std::string& origin = "<string>");

/// YAML batch: optional `defaults` map merged under each entry of `rows`.
BatchConfig load_batch_config(const std::filesystem::path& path);
BatchConfig parse_batch_config(std::string_view yaml_text, const std::string& origin = "<string>");

void apply_overrides(RunConfig& cfg, const Overrides& o);

}  // namespace nperiodic
