#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace transop::cli {

/// Exit codes: 0 success, 1 usage error, 2 numeric or runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace transop::cli
