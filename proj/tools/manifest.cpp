#include "manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "circadia/errors.hpp"
#include "circadia/output.hpp"

#ifndef CIRCADIA_VERSION
#define CIRCADIA_VERSION "dev"
#endif

namespace circadia::cli {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("input", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

RunManifest::RunManifest(std::string command, nlohmann::json parameters, std::string out_dir)
    : command_(std::move(command)), parameters_(std::move(parameters)), out_dir_(std::move(out_dir)) {}

void RunManifest::add_input(const std::string& path) {
  if (!id_.empty()) throw Error("inputs must be registered before the first output");
  inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}});
}

const std::string& RunManifest::id() {
  if (id_.empty()) {
    // input paths are excluded so that a copied input reproduces the same id
    nlohmann::json hashes = nlohmann::json::array();
    for (const auto& in : inputs_) hashes.push_back(in["sha256"]);
    const nlohmann::json key{{"command", command_}, {"parameters", parameters_}, {"inputs", hashes},
                             {"version", CIRCADIA_VERSION}};
    id_ = sha256_hex(key.dump());
  }
  return id_;
}

void RunManifest::record(const std::string& name, const std::string& content) {
  const std::string path = (std::filesystem::path(out_dir_) / name).string();
  write_text(path, content);
  outputs_.push_back({{"path", name}, {"sha256", sha256_hex(content)}});
}

void RunManifest::write_csv(const std::string& name, const std::string& csv) {
  record(name, "# manifest " + id() + "\n" + csv);
}

void RunManifest::write_json(const std::string& name, nlohmann::json j) {
  j["manifest_id"] = id();
  record(name, j.dump(2) + "\n");
}

void RunManifest::write_svg(const std::string& name, const std::string& svg) {
  record(name, "<!-- manifest " + id() + " -->\n" + svg);
}

void RunManifest::finish(double wall_seconds, int exit_code) {
  const nlohmann::json m{{"manifest_id", id()},    {"command", command_},   {"parameters", parameters_},
                         {"inputs", inputs_},      {"outputs", outputs_},   {"tool_version", CIRCADIA_VERSION},
                         {"exit_code", exit_code}, {"wall_time_s", wall_seconds}};
  write_text((std::filesystem::path(out_dir_) / "manifest.json").string(), m.dump(2) + "\n");
}

}  // namespace circadia::cli
