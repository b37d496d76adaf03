#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "seedscope/json.hpp"

namespace seedscope::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kReject = 3 };

/// Runs one command line (without the program name). Results go to `out`
/// as JSON, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

/// Everything needed to rerun a command: tool version, argv, the resolved
/// parameters and digests of every input file. No timestamps or host data.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  Json parameters = Json::object();
  Json inputs = Json::array();

  void add_input(const std::filesystem::path& path);
  Json to_json() const;
};

/// Reads a manifest (bare, or embedded under "manifest") and returns its argv.
std::vector<std::string> manifest_argv(const std::filesystem::path& path);

}  // namespace seedscope::cli
