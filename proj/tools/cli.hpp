#ifndef OPENSET_TOOLS_CLI_HPP_
#define OPENSET_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace openset::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kInputError = 2;
inline constexpr int kDegenerate = 3;

// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace openset::cli

#endif  // OPENSET_TOOLS_CLI_HPP_
