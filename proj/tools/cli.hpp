#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace gausskraft::cli {

/// Exit codes shared by all commands.
enum Exit : int {
  kOk = 0,
  kFailed = 1,
  kParse = 2,
  kDegenerated = 3,
  kMaxIters = 4,
};

int cmd_validate(const std::string& instance_path, std::ostream& out, std::ostream& err);

struct SolveOptions {
  std::string instance_path;
  double tol = 1e-8;
  int max_iters = 500;
  std::optional<std::string> out_path;
  std::optional<std::string> obj_path;
  bool force = false;
};
int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);

struct RefineOptions {
  std::string density;  // path or "uniform" / "bump"
  int levels = 3;
  std::optional<std::string> out_dir;
  double tol = 1e-8;
};
int cmd_refine(const RefineOptions& opts, std::ostream& out, std::ostream& err);

struct OracleOptions {
  std::string instance_path;
  std::size_t samples = 320;
  std::uint64_t seed = 0;
  std::optional<std::string> plan_path;
};
int cmd_oracle(const OracleOptions& opts, std::ostream& out, std::ostream& err);

struct GradcheckOptions {
  std::string instance_path;
  double eps = 1e-5;
  int points = 5;
  std::uint64_t seed = 0;
};
int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int run(int argc, char** argv);

}  // namespace gausskraft::cli
