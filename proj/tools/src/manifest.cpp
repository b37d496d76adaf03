#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <openssl/evp.h>

#include "seedscope/version.hpp"
#include "seedscope_cli/commands.hpp"

namespace seedscope::cli {

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.push_back({{"path", path.string()}, {"sha256", file_sha256(path)}});
}

Json RunManifest::to_json() const {
  Json j;
  j["tool"] = "seedscope";
  j["version"] = kVersion;
  j["command"] = command;
  j["argv"] = argv;
  j["parameters"] = parameters;
  j["inputs"] = inputs;
  return j;
}

std::vector<std::string> manifest_argv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error("manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }
  const Json& manifest = doc.contains("manifest") ? doc.at("manifest") : doc;
  if (!manifest.contains("argv") || !manifest.at("argv").is_array()) {
    throw std::runtime_error("manifest '" + path.string() + "' has no argv");
  }
  return manifest.at("argv").get<std::vector<std::string>>();
}

}  // namespace seedscope::cli
