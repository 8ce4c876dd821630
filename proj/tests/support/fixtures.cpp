#include "fixtures.hpp"

#include <map>
#include <mutex>

namespace fixture {

std::filesystem::path source_dir() { return DIFFEO_SOURCE_DIR; }
std::filesystem::path cli_path() { return DIFFEO_CLI_PATH; }

const diffeo::cli::SpecFile& spec(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, diffeo::cli::SpecFile> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(name);
  if (it == cache.end())
    it = cache.emplace(name, diffeo::cli::load_spec(source_dir() / "specs" / (name + ".json"))).first;
  return it->second;
}

diffeo::AlgebraPtr algebra(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, diffeo::AlgebraPtr> cache;
  const auto& s = spec(name);
  std::lock_guard lock(mu);
  auto& slot = cache[name];
  if (!slot) slot = std::make_shared<diffeo::FieldAlgebra>(diffeo::FieldAlgebra::declare(s.space, s.fields));
  return slot;
}

}  // namespace fixture
