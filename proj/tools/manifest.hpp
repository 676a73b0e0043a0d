#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace circadia::cli {

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

/// Collects inputs and outputs of one command run. The run id hashes the
/// command, its parameters, the input file hashes and the tool version; every
/// output file carries it, and manifest.json maps it to the outputs. Wall
/// time appears only in manifest.json.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json parameters, std::string out_dir);

  void add_input(const std::string& path);
  const std::string& id();

  void write_csv(const std::string& name, const std::string& csv);
  void write_json(const std::string& name, nlohmann::json j);
  void write_svg(const std::string& name, const std::string& svg);
  /// Writes manifest.json.
  void finish(double wall_seconds, int exit_code);

 private:
  void record(const std::string& name, const std::string& content);

  std::string command_;
  nlohmann::json parameters_;
  std::string out_dir_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  std::string id_;
};

}  // namespace circadia::cli
