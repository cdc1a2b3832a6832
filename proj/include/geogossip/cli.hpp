#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geogossip {

// Entry point of the `geogossip` tool. Verbs: gen-network, simulate, analyze,
// certify, experiment. Returns the process exit status.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geogossip
