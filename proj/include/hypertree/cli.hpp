#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "hypertree/io.hpp"

namespace hypertree::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,   // decompose: totals disagree
    kConfigError = 2,   // parse / schema / validation
    kDegenerate = 3,    // degenerate state
    kIntegration = 4,   // integration halted
};

struct Options {
    std::optional<std::string> out_path;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
};

/// Each command reads a JSON config, writes its report to `out` (or to
/// options.out_path for the machine-readable product) and returns an exit
/// code. Errors are reported on `err`.
int cmd_tree(const Json& config, const Options& opt, std::ostream& out, std::ostream& err);
int cmd_decompose(const Json& config, const Options& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const Json& config, const Options& opt, std::ostream& out, std::ostream& err);
int cmd_scatter(const Json& config, const Options& opt, std::ostream& out, std::ostream& err);
int cmd_veff(const Json& config, const Options& opt, std::ostream& out, std::ostream& err);

/// `hypertree <tree|decompose|simulate|scatter|veff> --config <path>
///  [--out <path>] [--seed <u64>] [-v]`
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hypertree::cli
