#pragma once

// Command-line front end.  run() parses the arguments, validates the
// configuration, dispatches the subcommand and writes its artifacts; the
// executable only forwards main's arguments.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hypdim::cli {

struct RunConfig {
  double p = 1.0;
  std::optional<double> l;   // dynamics default: l_min + 1; eval default: 0
  std::optional<double> r;   // default: r0
  std::string constants;     // cache path; empty selects the bundled cache
  std::string out_dir = ".";
  unsigned workers = 0;      // 0: HYPDIM_WORKERS or hardware concurrency
  std::uint64_t seed = 20240607;
};

// Returns the process exit status.  Errors are reported as one JSON object
// on `err`; results go to files under --out and a JSON summary on `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hypdim::cli
