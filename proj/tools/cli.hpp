#pragma once

#include <string>
#include <vector>

namespace barostab::cli {

/// Entry point behind the barostab executable; args exclude argv[0].
/// Exit codes: 0 success, 2 numerical failure, 3 config error.
int cli_main(const std::vector<std::string>& args);

}  // namespace barostab::cli
