#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hiercon/dde_sim.hpp"

namespace hiercon::cli {

enum class Status { Ok, InvalidScenario, IoError, ParseError };

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDiverged = 4;

/// Exit code of one scenario. `regime` is set only for simulation commands.
[[nodiscard]] int exit_code(Status status, std::optional<Regime> regime, bool allow_unstable);

/// A batch exits with the largest per-file code.
[[nodiscard]] int batch_exit_code(const std::vector<int>& codes);

struct Options {
    std::string command;
    std::vector<std::string> paths;
    std::optional<std::string> out;
    std::optional<std::string> csv;
    std::uint64_t seed = 42;
    std::size_t c_trials = 0;
    std::optional<double> step;
    std::optional<double> t_end;
    std::size_t jobs = 1;
    bool allow_unstable = false;
};

struct FileResult {
    Status status = Status::Ok;
    std::optional<Regime> regime;
    std::string out;  // for stdout
    std::string err;  // for stderr
    int code = kExitOk;
};

/// Runs one command on one scenario file. Never throws.
[[nodiscard]] FileResult run_file(const Options& opts, const std::string& path);

/// Runs the command on every path, `opts.jobs` at a time, and prints results
/// in input order.
[[nodiscard]] int run_batch(const Options& opts, std::ostream& out, std::ostream& err);

/// Full command line entry point.
[[nodiscard]] int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hiercon::cli
