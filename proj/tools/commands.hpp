#pragma once

// Command-line front end: argument parsing, command dispatch, CSV/JSON
// rendering. Every command renders into a string before anything is written,
// so a failing command never leaves a partial output file.

#include "fepp/faraday.hpp"
#include "fepp/lossmodel.hpp"
#include "fepp/protocol.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fepp::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Reflection, Gate, Round, Iterate, MonteCarlo, LossSweep };
enum class OutputFormat { Csv, Json };

struct Grid {
  double min;
  double max;
  int steps;
};

struct RunSpec {
  Command command = Command::Round;

  CavityParams cavity = CavityParams::ideal();
  bool cavity_gate = false;  // build the round gate from `cavity` instead of the ideal table

  std::optional<double> f;
  std::optional<std::array<double, 4>> weights;
  std::optional<double> f2;
  std::optional<std::array<double, 4>> weights2;

  int rounds = 1;
  bool alternate_errors = false;

  std::uint64_t trials = 100000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  LossParams loss;
  std::optional<Grid> grid;

  std::optional<OutputFormat> format;
  std::optional<std::string> out_path;
};

Grid parse_grid(const std::string& text);
std::array<double, 4> parse_weights(const std::string& text);
std::string to_string(Command c);

// Renders the command output. Throws UsageError or library errors on bad input.
std::string run_command(const RunSpec& spec);

OutputFormat effective_format(const RunSpec& spec);

// Full CLI: parses argv, runs, writes to --out or `out`. Returns the exit status;
// failures produce one diagnostic line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fepp::cli
