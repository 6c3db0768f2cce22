#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gigomea::cli
{

enum ExitCode : int
{
    ok = 0,
    optimum_not_found = 1,
    invalid_args = 2,
    io_failure = 3
};

// Entry point shared by the executable and the tests. args excludes argv[0].
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace gigomea::cli
