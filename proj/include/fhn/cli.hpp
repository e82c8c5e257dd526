#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fhn/epsilon_solver.hpp"
#include "fhn/model.hpp"

namespace fhn::cli {

/// Everything a subcommand may read. Config files and flags share the key
/// names (flags use dashes: c_lo <-> --c-lo).
struct RunConfig
{
    Params params{};
    bool has_alpha = false;
    bool has_gamma = false;
    bool has_sigma = false;

    double c = 0.0;
    bool has_c = false;
    double c_lo = 0.0;  // 0: derive from bracket_lo * limit speed
    double c_hi = 0.0;
    std::string ell_grid = "0.1:10:200";
    std::vector<double> eps_list{0.04, 0.02, 0.01};

    SolverOptions solver{};
    double bracket_lo = 0.1;
    double bracket_hi = 2.0;
    unsigned threads = 0;

    std::string output;  // empty: stdout
    std::string svg;
    std::string input;
    std::string set;  // interval union as JSON

    std::string alpha_range;
    std::string gamma_range;
    std::string sigma_range;
};

/// Recognized configuration keys, in documentation order.
[[nodiscard]] const std::vector<std::string>& config_keys();

/// Apply one key=value setting. Throws InvalidParameter for unknown keys or
/// unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parse key=value text ('#' comments allowed) or a flat JSON object into
/// ordered settings; unknown keys are rejected.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/// "lo:hi:n" -> n evenly spaced values including both ends.
[[nodiscard]] std::vector<double> parse_range(const std::string& spec);

/// Full command-line entry point; returns the process exit code
/// (0 ok, 2 invalid parameters or regime, 3 non-convergence, 4 I/O).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fhn::cli
