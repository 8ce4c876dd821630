#pragma once

// Space description files: a JSON document naming a space, its generators and
// optionally a field algebra, a coefficient basis and per-command settings.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffeo/diffeo.hpp"

namespace diffeo::cli {

struct FlowSettings {
  std::string field;
  Vector point;
  double t_end = 1.0;
  double dt = 1e-3;
  int samples = 4;
};

struct TangentSettings {
  Vector point;
  int order = 1;
};

struct TangentExpectation {
  Vector point;
  std::optional<bool> linear;
  std::optional<int> span_dimension;
  std::vector<int> components;
};

struct SpecFile {
  std::string name;
  std::string kind;
  SpacePtr space;
  std::optional<MatrixGroup> group;
  std::vector<VectorField> fields;
  std::optional<FunctionBasis> basis;
  int max_degree = 1;
  int samples = 0;
  std::optional<FlowSettings> flow;
  std::optional<TangentSettings> tangent;
  std::vector<TangentExpectation> expectations;
  nlohmann::json source;
};

// Every malformed document raises SpecParseError.
SpecFile parse_spec(const nlohmann::json& doc);
SpecFile load_spec(const std::filesystem::path& path);

// Expressions over x1..x<dim> (ambient coordinates).
SmoothMapPtr ambient_expressions(const std::vector<std::string>& components, int dim);

}  // namespace diffeo::cli
