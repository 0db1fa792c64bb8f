#pragma once

namespace relblow::cli {

// Full command-line entry: relblow <mode> [--config PATH] [--set key=value]...
// [--out DIR] [--seed N]. Exit codes: 0 success, 1 usage/config error,
// 2 numerical failure, 3 outside-theory.
int run_cli(int argc, const char* const* argv);

}  // namespace relblow::cli
