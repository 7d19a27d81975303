#pragma once

#include <string>
#include <vector>

namespace causalsens {

// Full command dispatch; args excludes the binary name. Exit codes: 0 ok,
// 1 computation failure, 2 usage error. Failures print one-line error JSON
// to stderr.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace causalsens
