#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "diffeo/cli/spec_file.hpp"
#include "diffeo/diffeo.hpp"

namespace fixture {

std::filesystem::path source_dir();
std::filesystem::path cli_path();

// specs/<name>.json, parsed once per process.
const diffeo::cli::SpecFile& spec(const std::string& name);
diffeo::AlgebraPtr algebra(const std::string& name);

}  // namespace fixture
