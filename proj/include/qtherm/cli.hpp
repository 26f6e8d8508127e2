#pragma once

namespace qtherm {

// Command line entry point. Exit codes:
//   0  success (also --help)
//   2  bad command line or malformed config text
//   3  invalid configuration or protocol (semantic errors)
//   4  runtime failure
//   5  file I/O failure
int cli_main(int argc, char** argv);

}  // namespace qtherm
