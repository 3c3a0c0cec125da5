#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace tho::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point shared by the binary and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Newline-separated reals; blank lines and lines starting with '#' are skipped.
/// Throws std::invalid_argument on anything else.
Eigen::VectorXd parse_sample(std::istream& in);

}  // namespace tho::cli
