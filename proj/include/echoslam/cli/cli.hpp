#pragma once

namespace echoslam::cli {

// Entry point behind the echoslam binary. Parses argv, dispatches to the
// gen-data / train / slam / eval / plot-scan subcommands and maps failures
// to exit codes: 0 on success, 2 for configuration, input and generation
// problems, 3 for file-format violations and internal errors.
int run_main(int argc, const char* const* argv);

}  // namespace echoslam::cli
