#pragma once

// Command-line front end. The subcommand functions are callable directly
// so tests can drive them without spawning a process.

#include "tcellsim/abm.hpp"
#include "tcellsim/ode.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tcellsim::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 2,
    kDataError = 3,
    kNumericalFailure = 4,
};

enum class Engine { Ode, Abm, Both };

const char* to_string(Engine engine);

/// Environment variable consulted for the output directory when --out is absent.
inline constexpr const char* kOutDirEnv = "TCELLSIM_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "tcellsim_out";

struct RunRequest {
    std::vector<int> scenarios{1, 2, 3, 4, 5};
    Engine engine = Engine::Ode;
    IntegrationConfig ode;
    AbmConfig abm;
    std::optional<std::filesystem::path> actives;  // placeholder table if unset
    std::filesystem::path out_dir = kDefaultOutDir;
    std::string command_line;                      // recorded in the manifest
};

struct ValidateRequest {
    RunRequest run;
    std::string dataset = "both";  // murray, lorenzi or both
};

/// Simulates each requested scenario and writes trajectories, replicate
/// files, comparison reports (engine both) and a manifest per scenario.
int cmd_run(const RunRequest& request, std::ostream& out);

/// Runs both engines for every requested scenario and writes one combined
/// comparison report over all quantities.
int cmd_compare(const RunRequest& request, std::ostream& out);

/// Overlays simulated thymic-naive percentages on the TREC datasets and
/// writes the residual summary and an SVG chart.
int cmd_validate(const ValidateRequest& request, std::ostream& out);

/// Prints the built-in TREC tables.
int cmd_datasets(std::ostream& out);

/// Parses argv and dispatches. Exceptions become exit codes: usage errors
/// 2, data/IO errors 3, numerical failures 4.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Sets the recording stride of both engines so they sample every 0.1
/// years when dt divides 0.1, otherwise every step.
void align_recording(RunRequest& request);

} // namespace tcellsim::cli
