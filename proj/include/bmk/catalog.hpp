#pragma once

// Test-body catalog: closed-form support functions for balls, ellipsoids,
// smoothed cubes (q-norm bodies) and perturbed balls, plus JSON catalog
// files that merge with the built-ins.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmk/body.hpp"

namespace bmk {

struct Discretization {
  int dim = 2;
  int bandlimit = 0;
  std::shared_ptr<const DirectionGrid> grid;
};

inline int default_bandlimit(int dim) { return dim == 2 ? 64 : 24; }

// Working discretization: grid oversampled relative to the band limit so
// pointwise products of fields stay below the quadrature's exact degree.
inline Discretization make_discretization(int dim, int bandlimit = 0,
                                          int oversample = 2) {
  Discretization d;
  d.dim = dim;
  d.bandlimit = bandlimit > 0 ? bandlimit : default_bandlimit(dim);
  int res = dim == 2 ? 4 * d.bandlimit * oversample : d.bandlimit * oversample;
  d.grid = std::make_shared<DirectionGrid>(build_grid(dim, res));
  return d;
}

struct CatalogEntry {
  std::string name;
  std::string kind;  // ball | ellipsoid | smoothed_cube | perturbed_ball
  nlohmann::json params;
};

inline BodyRep make_body(const CatalogEntry& entry, const Discretization& disc) {
  const auto& grid = *disc.grid;
  int m = grid.node_count();

  if (entry.kind == "ball" || entry.kind == "ellipsoid" ||
      entry.kind == "smoothed_cube") {
    Eigen::VectorXd h(m);
    if (entry.kind == "ball") {
      double r = entry.params.value("r", 1.0);
      if (r <= 0) throw ConfigError("ball: r must be positive");
      h.setConstant(r);
    } else if (entry.kind == "ellipsoid") {
      std::vector<double> a = entry.params.at("semiaxes").get<std::vector<double>>();
      if (static_cast<int>(a.size()) != disc.dim)
        throw ConfigError("ellipsoid: need " + std::to_string(disc.dim) + " semiaxes");
      for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int i = 0; i < disc.dim; ++i)
          s += a[i] * a[i] * grid.nodes(j, i) * grid.nodes(j, i);
        h[j] = std::sqrt(s);
      }
    } else {
      int q = entry.params.value("q", 4);
      if (q < 2 || q % 2 != 0) throw ConfigError("smoothed_cube: q must be even >= 2");
      // the raw q-norm support function has W = 0 along the axes for q >= 4;
      // blend in mu * |x|^q (= mu on the sphere) to keep W strictly positive
      double mu = entry.params.value("mu", 0.1);
      if (mu < 0) throw ConfigError("smoothed_cube: mu must be nonnegative");
      std::vector<double> a = entry.params.at("scales").get<std::vector<double>>();
      if (static_cast<int>(a.size()) != disc.dim)
        throw ConfigError("smoothed_cube: need " + std::to_string(disc.dim) + " scales");
      for (int j = 0; j < m; ++j) {
        double s = mu;
        for (int i = 0; i < disc.dim; ++i)
          s += std::pow(a[i] * grid.nodes(j, i), q);
        h[j] = std::pow(s, 1.0 / q);
      }
    }
    return body_from_values(h, disc.grid, disc.bandlimit, entry.name);
  }

  if (entry.kind == "perturbed_ball") {
    SpectralField f = constant_field(disc.dim, disc.bandlimit, entry.params.value("r", 1.0));
    for (const auto& mode : entry.params.value("modes", nlohmann::json::array())) {
      int deg = mode.at(disc.dim == 2 ? "k" : "l").get<int>();
      if (deg % 2 != 0 || deg < 2 || deg > disc.bandlimit)
        throw ConfigError("perturbed_ball: modes must be even, 2 <= degree <= bandlimit");
      if (disc.dim == 2) {
        f.coeffs[2 * deg - 1] += mode.value("cos", 0.0);
        f.coeffs[2 * deg] += mode.value("sin", 0.0);
      } else {
        int order = mode.value("m", 0);
        if (order < 0 || order > deg) throw ConfigError("perturbed_ball: bad order m");
        if (order == 0)
          f.coeffs[deg * deg] += mode.value("cos", 0.0);
        else {
          f.coeffs[deg * deg + 2 * order - 1] += mode.value("cos", 0.0);
          f.coeffs[deg * deg + 2 * order] += mode.value("sin", 0.0);
        }
      }
    }
    return body_from_field(std::move(f), disc.grid, entry.name);
  }

  throw ConfigError("unknown body kind '" + entry.kind + "'");
}

// Built-in bodies, stable order.
inline std::vector<CatalogEntry> builtin_catalog(int dim) {
  using nlohmann::json;
  if (dim == 2) {
    return {
        {"ball", "ball", json{{"r", 1.0}}},
        {"ellipse_2_1", "ellipsoid", json{{"semiaxes", {2.0, 1.0}}}},
        {"ellipse_5_1", "ellipsoid", json{{"semiaxes", {5.0, 1.0}}}},
        {"square_q2", "smoothed_cube", json{{"q", 2}, {"scales", {1.5, 1.0}}}},
        {"square_q4", "smoothed_cube", json{{"q", 4}, {"scales", {1.0, 1.0}}}},
        {"square_q8", "smoothed_cube", json{{"q", 8}, {"scales", {1.0, 1.0}}}},
        {"perturbed_ball", "perturbed_ball",
         json{{"r", 1.0},
              {"modes", json::array({json{{"k", 2}, {"cos", 0.1}},
                                     json{{"k", 4}, {"cos", 0.02}}})}}},
    };
  }
  return {
      {"ball", "ball", nlohmann::json{{"r", 1.0}}},
      {"ellipsoid_a", "ellipsoid", nlohmann::json{{"semiaxes", {1.3, 1.0, 0.8}}}},
      {"cube_q4", "smoothed_cube", nlohmann::json{{"q", 4}, {"scales", {1.0, 1.0, 1.0}}}},
      {"perturbed_ball", "perturbed_ball",
       nlohmann::json{{"r", 1.0},
                      {"modes", nlohmann::json::array(
                                    {nlohmann::json{{"l", 2}, {"m", 0}, {"cos", 0.1}},
                                     nlohmann::json{{"l", 2}, {"m", 2}, {"cos", 0.05}}})}}},
  };
}

inline std::vector<CatalogEntry> parse_catalog_json(const nlohmann::json& doc) {
  std::vector<CatalogEntry> out;
  if (!doc.is_array()) throw ConfigError("catalog: expected a JSON array of bodies");
  for (const auto& item : doc) {
    CatalogEntry e;
    e.name = item.at("name").get<std::string>();
    e.kind = item.at("kind").get<std::string>();
    e.params = item.value("params", nlohmann::json::object());
    out.push_back(std::move(e));
  }
  return out;
}

// Built-ins plus user entries; duplicate names are rejected.
inline std::vector<CatalogEntry> merge_catalog(int dim,
                                               const std::vector<CatalogEntry>& extra) {
  auto cat = builtin_catalog(dim);
  for (const auto& e : extra) {
    for (const auto& b : cat)
      if (b.name == e.name)
        throw ConfigError("catalog: duplicate body name '" + e.name + "'");
    cat.push_back(e);
  }
  return cat;
}

inline CatalogEntry find_body(const std::vector<CatalogEntry>& cat,
                              const std::string& name) {
  for (const auto& e : cat)
    if (e.name == name) return e;
  throw ConfigError("catalog: no body named '" + name + "'");
}

}  // namespace bmk
