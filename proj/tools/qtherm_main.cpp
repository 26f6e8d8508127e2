#include "qtherm/cli.hpp"

int main(int argc, char** argv) { return qtherm::cli_main(argc, argv); }
