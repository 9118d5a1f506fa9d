#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testing {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

/// Runs the bubblestory binary with `args` (already quoted) inside `cwd`,
/// capturing both streams.
inline CliRun run_cli(const std::filesystem::path& cwd, const std::string& args) {
  const auto out_file = cwd / ".cli-stdout";
  const auto err_file = cwd / ".cli-stderr";
  const std::string cmd = "cd " + shell_quote(cwd.string()) + " && env -u BUBBLESTORY_DATA_DIR " +
                          shell_quote(BUBBLESTORY_CLI) + " " + args + " >" +
                          shell_quote(out_file.string()) + " 2>" + shell_quote(err_file.string());
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  std::filesystem::remove(out_file);
  std::filesystem::remove(err_file);
  return r;
}

}  // namespace testing
