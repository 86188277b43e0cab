#pragma once

// Filesystem scratch helpers shared by every suite. Deliberately free of any
// library headers so the C-API and CLI tests stay decoupled from the core.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

// A clean per-test scratch directory under the system temp root.
inline std::string fresh_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / ("edubayes_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

inline std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline bool exists(const std::string& path) { return std::filesystem::exists(path); }

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command, capturing exit status and both streams via files.
inline CommandResult run_command(const std::string& cmd, const std::string& scratch) {
  const std::string out_file = join(scratch, "_stdout");
  const std::string err_file = join(scratch, "_stderr");
  const std::string full = cmd + " > '" + out_file + "' 2> '" + err_file + "'";
  const int raw = std::system(full.c_str());
  CommandResult r;
#if defined(_WIN32)
  r.exit_code = raw;
#else
  r.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
#endif
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

}  // namespace testutil
