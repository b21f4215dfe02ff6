#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "magband/counting.hpp"
#include "magband/errors.hpp"
#include "magband/potential.hpp"

namespace magband {

// Run configuration, one JSON document. Field paths in error messages match
// the key structure below.
struct RunConfig {
  // potential
  double period = 1.0;
  std::vector<double> cos_coeffs{0.0};
  std::vector<double> sin_coeffs;
  // field
  double b = 1.0;
  // basis
  int N = 128;
  int Q = 0;  // 0 -> 4N
  double eps_conv = 1e-9;
  // bands
  int j_max = 6;
  int k_grid = 512;
  // perturbation
  std::vector<Rect> rectangles;
  std::optional<Envelope> envelope;
  // counting
  std::vector<double> lambdas;
  int gap_index = 1;
  int L = 0;  // 0 -> adaptive
  double K_O1 = 3.0;
  bool with_m1 = false;
  bool with_oracle = false;
  int m1_nx = 16, m1_ny = 48;
  BsOptions bs;
  // decay probe
  int decay_j = 1;
  double decay_k0 = 0.0;
  double decay_lo = -0.5, decay_hi = 0.5;
  std::vector<double> decay_xi;
  // semiclassics
  std::vector<int> semi_j{1, 2};
  std::vector<double> semi_x0{0.25, -0.25};
  int semi_b_points = 10;
  double semi_b_factor = 100.0;
  // output
  std::string out_dir = "out";
  // misc
  std::uint64_t seed = 0;
  int threads = 1;
  bool use_cache = true;

  FourierPotential potential() const {
    return FourierPotential(period, cos_coeffs, sin_coeffs);
  }
  int quad_order() const { return Q > 0 ? Q : 4 * N; }
  PerturbationV perturbation() const { return PerturbationV(rectangles, envelope); }
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw config_error("missing required key: " + path);
  return *it;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::get_or;
  using detail::require;
  RunConfig c;
  try {
    const auto& pot = require(j, "potential", "potential");
    c.period = require(pot, "period", "potential.period").get<double>();
    if (!(c.period > 0.0)) throw config_error("potential.period must be positive");
    c.cos_coeffs = require(pot, "cos", "potential.cos").get<std::vector<double>>();
    c.sin_coeffs = get_or(pot, "sin", std::vector<double>{});

    c.b = require(j, "field", "field").get<double>();
    if (!(c.b > 0.0)) throw config_error("field must be positive");

    if (j.contains("basis")) {
      const auto& bs = j["basis"];
      c.N = get_or(bs, "N", c.N);
      c.Q = get_or(bs, "Q", 0);
      c.eps_conv = get_or(bs, "eps_conv", c.eps_conv);
      if (c.N < 16) throw config_error("basis.N must be >= 16");
      if (c.Q != 0 && c.Q < 2 * c.N) throw config_error("basis.Q must be >= 2N");
      if (!(c.eps_conv > 0.0)) throw config_error("basis.eps_conv must be positive");
    }
    if (j.contains("bands")) {
      const auto& bn = j["bands"];
      c.j_max = get_or(bn, "j_max", c.j_max);
      c.k_grid = get_or(bn, "k_grid", c.k_grid);
      if (c.j_max < 1 || 2 * c.j_max > c.N)
        throw config_error("bands.j_max must satisfy 1 <= j_max <= N/2");
      if (c.k_grid < 16) throw config_error("bands.k_grid must be >= 16");
    }
    if (j.contains("perturbation")) {
      const auto& p = j["perturbation"];
      for (const auto& r : require(p, "rectangles", "perturbation.rectangles")) {
        Rect rect;
        const auto xs = require(r, "x", "perturbation.rectangles[].x").get<std::vector<double>>();
        const auto ys = require(r, "y", "perturbation.rectangles[].y").get<std::vector<double>>();
        if (xs.size() != 2 || ys.size() != 2)
          throw config_error("perturbation.rectangles[].x/y must be [lo, hi]");
        rect.x0 = xs[0]; rect.x1 = xs[1];
        rect.y0 = ys[0]; rect.y1 = ys[1];
        rect.amplitude = get_or(r, "amplitude", 1.0);
        c.rectangles.push_back(rect);
      }
      if (p.contains("envelope")) {
        Envelope e;
        e.C0 = require(p["envelope"], "C0", "perturbation.envelope.C0").get<double>();
        e.m1 = require(p["envelope"], "m1", "perturbation.envelope.m1").get<double>();
        e.m2 = require(p["envelope"], "m2", "perturbation.envelope.m2").get<double>();
        c.envelope = e;
      }
    }
    if (j.contains("counting")) {
      const auto& cc = j["counting"];
      c.lambdas = get_or(cc, "lambdas", std::vector<double>{});
      for (double l : c.lambdas)
        if (!(l > 0.0 && l < 1.0)) throw config_error("counting.lambdas must lie in (0,1)");
      c.gap_index = get_or(cc, "gap_index", 1);
      c.L = get_or(cc, "L", 0);
      c.K_O1 = get_or(cc, "K_O1", 3.0);
      c.with_m1 = get_or(cc, "with_m1", false);
      c.with_oracle = get_or(cc, "with_oracle", false);
      c.m1_nx = get_or(cc, "m1_nx", 16);
      c.m1_ny = get_or(cc, "m1_ny", 48);
      c.bs.j_count = get_or(cc, "oracle_bands", 12);
      c.bs.k_points = get_or(cc, "oracle_k_points", 32);
      c.bs.l_max = get_or(cc, "oracle_l_max", 8);
      c.bs.nx = get_or(cc, "oracle_nx", 16);
      c.bs.ny = get_or(cc, "oracle_ny", 48);
    }
    if (j.contains("decay")) {
      const auto& d = j["decay"];
      c.decay_j = get_or(d, "j", 1);
      c.decay_k0 = get_or(d, "k0", 0.0);
      const auto iv = get_or(d, "interval", std::vector<double>{-0.5, 0.5});
      if (iv.size() != 2 || !(iv[1] > iv[0]))
        throw config_error("decay.interval must be [lo, hi] with lo < hi");
      c.decay_lo = iv[0];
      c.decay_hi = iv[1];
      c.decay_xi = get_or(d, "xi", std::vector<double>{});
    }
    if (j.contains("semiclassics")) {
      const auto& s = j["semiclassics"];
      c.semi_j = get_or(s, "j", c.semi_j);
      c.semi_x0 = get_or(s, "x0", c.semi_x0);
      c.semi_b_points = get_or(s, "b_points", c.semi_b_points);
      c.semi_b_factor = get_or(s, "b_factor", c.semi_b_factor);
    }
    if (j.contains("output")) {
      c.out_dir = detail::get_or(j["output"], "directory", c.out_dir);
    }
    c.seed = get_or(j, "seed", std::uint64_t{0});
    c.threads = get_or(j, "threads", 1);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace magband
