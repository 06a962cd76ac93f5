#include "trotterkit/polyexp.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace trotterkit {

std::string ZeroCache::key(const SeriesSpec& spec) {
  std::string out = std::string(family_name(spec.family)) + "_" + std::to_string(spec.k);
  if (spec.family == Family::Chebyshev) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", quantize_gamma_h(spec.gamma_h()));
    out += "_" + std::string(buf) + "_" + std::string(axis_name(spec.axis));
  }
  return out;
}

std::filesystem::path ZeroCache::path_for(const SeriesSpec& spec) const { return dir_ / (key(spec) + ".json"); }

std::optional<std::vector<std::pair<std::string, std::string>>> ZeroCache::load(const SeriesSpec& spec) const {
  std::ifstream in(path_for(spec));
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& z : j) out.emplace_back(z.at(0).get<std::string>(), z.at(1).get<std::string>());
    if (static_cast<int>(out.size()) != spec.k) return std::nullopt;
    return out;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

void ZeroCache::store(const SeriesSpec& spec, const std::vector<std::pair<std::string, std::string>>& zeros) const {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCategory::Io, "cannot create zero cache directory " + dir_.string());
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [re, im] : zeros) j.push_back({re, im});
  const auto final_path = path_for(spec);
  const auto tmp = dir_ / (key(spec) + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++));
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCategory::Io, "cannot write " + tmp.string());
    out << j.dump(1) << "\n";
    if (!out) throw Error(ErrorCategory::Io, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCategory::Io, "cannot move zero file into " + final_path.string());
  }
}

}  // namespace trotterkit
