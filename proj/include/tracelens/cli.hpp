#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tracelens/heavy_hitters.hpp"
#include "tracelens/sampling.hpp"

namespace tracelens::cli {

enum ExitCode : int { ok = 0, usage_error = 1, data_error = 2 };

struct RunConfig {
  std::string subcommand;

  std::string input;                    // path, "-" for stdin
  std::string input_format = "auto";    // auto | dag | csv
  std::string output;                   // path, empty for stdout
  std::optional<double> delta;          // minutes, csv input only

  unsigned max_length = 0;              // m
  std::optional<double> epsilon;
  std::optional<double> oversampling;   // C
  std::optional<double> p;
  bool relative = false;                // epsilon is a fraction of |S_m|
  bool clamp = false;                   // allow epsilon < C by capping p at 1
  std::optional<std::uint64_t> seed;
  SamplerKind sampler = SamplerKind::exact;
  SecondPassMode mode = SecondPassMode::regenerate;
  bool hashed = false;
  std::optional<std::size_t> top_k;
  unsigned threads = 1;
  std::uint64_t limit = default_enumeration_limit;

  std::string format = "text";          // stats: text | json
  std::vector<double> oversampling_list{3, 5, 10, 15, 20, 30};

  // synth
  std::string kind = "skip";            // skip | random | planted
  std::size_t n = 16;
  std::vector<std::size_t> skips{1, 2, 3};
  std::size_t label_period = 0;
  double edge_prob = 0.3;
  std::size_t alphabet = 0;
  std::vector<std::string> plants;      // "5-9-2x100"
  std::size_t background = 2000;
  double zipf = 1.2;
  std::size_t window = 3;
};

// Checks flag combinations before any computation. Throws
// Error(invalid_argument) describing the first problem.
void validate(RunConfig& config);

// Runs a validated configuration, writing results to `out` and diagnostics
// to `err`. Returns an ExitCode.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv, validates and runs. Parse and validation failures exit with
// usage_error; library errors are mapped by their code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tracelens::cli
