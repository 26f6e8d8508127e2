#pragma once
#include <map>
#include <string>

#include "qtherm/experiments.hpp"

namespace qtherm {

// Run configuration, parsed from a small `key = value` text format:
//
//   # comment until end of line
//   experiment = spontaneous_emission
//   n = 10000
//   seed = 42
//   dt = 0.001            # overrides the preset default
//   threads = 4           # 0 = hardware concurrency
//   out = "runs/demo"
//   export { records = true  series = false }
//   params { gamma = 1.0  omega0 = 1.0  duration = 2.0 }
//
// Values are numbers, booleans (true/false), quoted strings, or bare words.
// Unknown or duplicate keys are rejected with their source position.
struct RunConfig {
  std::string experiment;
  long long n = 1000;
  uint64_t seed = 1;
  std::optional<double> dt;  // unset: keep the preset default
  int threads = 0;
  std::string out_dir;  // empty: $QTHERM_OUT_DIR or ./qtherm-out
  bool export_records = false;
  bool export_series = false;
  bool enumerate = false;                 // set by the CLI subcommand
  std::map<std::string, double> params;   // forwarded to the preset builder

  void validate() const;  // range checks; throws ValidationError
  // preset lookup + parameter validation + dt override
  ExperimentSpec build_experiment() const;
};

// throws ParseError with line/col on malformed text
RunConfig parse_config_text(const std::string& text);
// throws IoError when the file cannot be read
RunConfig parse_config_file(const std::string& path);

}  // namespace qtherm
