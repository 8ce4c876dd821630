// CLI reports against golden files, and the runner.

#include <sstream>

#include <cmath>
#include <fstream>
#include <numbers>

#include "criteria.hpp"
#include "fixtures.hpp"
#include "golden.hpp"

namespace criteria {

Result cli_contract() {
  Tally t(10, "CLI reports match golden files with documented exit codes");
  try {
    int matched = 0;
    for (const auto& c : golden::cases()) {
      const golden::Outcome o = golden::check(c);
      if (t.expect(o.passed, o.detail)) ++matched;
    }
    // The stored reports carry the known answers, not just whatever the tool printed once.
    auto load = [](const std::string& name) {
      std::ifstream in(fixture::source_dir() / "tests" / "golden" / (name + ".json"));
      return nlohmann::json::parse(in, nullptr, false);
    };
    auto betti = [&](const std::string& name) {
      const auto doc = load(name);
      return doc.is_discarded() ? std::vector<int>{} : doc["results"]["cohomology"]["betti"].get<std::vector<int>>();
    };
    t.expect(betti("cohomology_circle") == std::vector<int>{1, 1}, "circle Betti in golden report");
    t.expect(betti("cohomology_torus") == std::vector<int>{1, 2, 1}, "torus Betti in golden report");
    auto prefix = [](std::vector<int> v, std::size_t n) {
      v.resize(std::min(v.size(), n));
      return v;
    };
    t.expect(prefix(betti("cohomology_so3"), 3) == std::vector<int>{1, 0, 1}, "sphere Betti in golden report");
    t.expect(prefix(betti("cohomology_euclidean2"), 3) == std::vector<int>{1, 0, 0}, "plane Betti in golden report");
    auto endpoint = [&](const std::string& name) {
      const auto doc = load(name);
      return doc.is_discarded() ? std::vector<double>{} : doc["results"]["endpoint"].get<std::vector<double>>();
    };
    auto near = [](const std::vector<double>& a, const std::vector<double>& b, double tol) {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (!(std::abs(a[i] - b[i]) <= tol)) return false;
      return true;
    };
    t.expect(near(endpoint("flow_rotation"), {0.0, 1.0}, 1e-6), "rotation endpoint in golden report");
    t.expect(near(endpoint("flow_circle"), {0.0, 1.0}, 1e-6), "circle endpoint in golden report");
    t.expect(near(endpoint("flow_constant"), {3.25}, 1e-12), "constant field endpoint in golden report");
    auto span = [&](const std::string& name) {
      const auto doc = load(name);
      return doc.is_discarded() ? -1 : doc["results"]["tangent"]["span_dimension"].get<int>();
    };
    t.expect(span("tangent_euclidean3") == 3, "R3 tangent dimension in golden report");
    t.expect(span("tangent_so3") == 2, "orbit tangent dimension in golden report");
    t.expect(span("tangent_torus") == 2, "torus tangent dimension in golden report");
    t.expect(!load("tangent_crossing")["results"]["tangent"]["linear"].get<bool>(), "crossing curves non-linear in golden report");

    std::ostringstream s;
    s << matched << "/" << golden::cases().size() << " golden reports match (exit codes 0-6 covered)";
    return t.finish(s.str());
  } catch (const std::exception& e) {
    return t.fail(e.what());
  }
}

std::vector<Result> run_all() {
  return {jets(), equivalence(), chain_rule(), crossing_curves(), coadjoint_orbit(),
          derivations(), flows(), exterior_calculus(), betti_numbers(), cli_contract()};
}

}  // namespace criteria
