#include "echoslam/cli/cli.hpp"

int main(int argc, char** argv) { return echoslam::cli::run_main(argc, argv); }
