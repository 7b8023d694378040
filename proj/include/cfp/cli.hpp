#ifndef CFP_CLI_HPP
#define CFP_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace cfp::cli {

enum ExitCode { ok = 0, usage_error = 1, compute_error = 2, compare_miss = 3 };

struct Score {
  double z;            // |value - exact| / se, NaN when not applicable
  std::string status;  // pass, miss or unresolved
};

/// compare's rule: a structural zero must be met exactly; otherwise a
/// resolved estimate passes within 3 standard errors.
Score score_estimate(double exact, double value, double se, bool resolved);

/// Runs one subcommand. Data goes to `out` unless --out names a file;
/// diagnostics and the summary go to `err` in that case.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace cfp::cli

#endif  // CFP_CLI_HPP
