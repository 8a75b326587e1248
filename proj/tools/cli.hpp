#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oqsid::cli {

/// Exit codes: 0 identifiable / success, 1 I/O or validation error,
/// 2 not identifiable (or parameters not fully recovered), 3 inconclusive.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace oqsid::cli
