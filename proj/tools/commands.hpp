#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace danc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;  // numeric blowup or gain-sign abort
inline constexpr int kExitBound = 4;

struct RunOptions {
  std::string config;
  std::optional<std::string> out_dir;
  bool verbose_trace = false;
  std::optional<std::uint64_t> seed;
};

struct SweepOptions {
  RunOptions run;
  std::string axis;
  std::vector<double> values;
  int jobs = 1;
};

struct PlotOptions {
  std::string trace;
  std::vector<std::string> columns;
  std::optional<std::string> out_dir;  // defaults to the trace's directory
};

int cmd_simulate(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_plotdata(const PlotOptions& opts, std::ostream& out, std::ostream& err);
int cmd_lemmas(std::uint64_t seed, std::ostream& out, std::ostream& err);

/// Full command line, subcommand first.
int run_cli(int argc, const char* const* argv);

}  // namespace danc::cli
