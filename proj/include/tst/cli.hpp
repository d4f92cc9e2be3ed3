#pragma once

#include <string>
#include <vector>

namespace tst {

// Outcome of a single command-line invocation: the process exit code plus the
// captured stdout/stderr text. Exit codes: 0 success, 1 validation or usage
// error, 2 refusal (a budget or precondition stopped the computation).
struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

// Run the tst command line on `args` (argv[1..], program name excluded);
// `stdin_text` stands in for piped input when no --model path is given.
// Never throws: failures are reported through `code` and `err`.
CliResult run_cli(const std::vector<std::string>& args, const std::string& stdin_text = "");

}  // namespace tst
