#ifndef OCP_CLI_H_
#define OCP_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace ocp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitTrainingError = 3,
  kExitExternalError = 4,
};

// Runs one `ocp` invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ocp::cli

#endif  // OCP_CLI_H_
