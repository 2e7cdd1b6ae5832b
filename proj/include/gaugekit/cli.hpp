#pragma once

namespace gaugekit::cli {

// Exit codes: 0 result matches the expectation (or none was given),
// 1 mismatch, 2 unknown name, 3 partition failure, 4 unsupported instance,
// 5 any other error.
enum ExitCode { ok = 0, mismatch = 1, unknown_name = 2, partition_failure = 3, unsupported = 4, other_error = 5 };

int run(int argc, char** argv);

}  // namespace gaugekit::cli
