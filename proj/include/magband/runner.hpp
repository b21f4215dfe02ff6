#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "magband/cache.hpp"
#include "magband/config.hpp"
#include "magband/counting.hpp"
#include "magband/eigenfield.hpp"
#include "magband/io.hpp"
#include "magband/semiclassics.hpp"

namespace magband {

struct RunFlags {
  std::string out_dir;  // empty: use config
  int threads = 0;      // 0: use config
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool no_cache = false;
};

namespace detail {

inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline std::filesystem::path ensure_out_dir(const RunConfig& cfg, const RunFlags& flags) {
  std::filesystem::path dir = flags.out_dir.empty() ? cfg.out_dir : flags.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw config_error("cannot open output file: " + p.string());
  out << j.dump(2) << "\n";
}

// Band sweep used by `bands`: data-parallel over k, cache-backed.
inline BandCache::Payload band_sweep(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = ensure_out_dir(cfg, flags);
  BandCache cache(dir / ".cache");
  const auto key = BandCache::key(cfg);
  if (cfg.use_cache && !flags.no_cache) {
    if (auto hit = cache.load(key)) return *hit;
  }
  const FourierPotential W = cfg.potential();
  const HermiteBasis basis(cfg.b, cfg.N, cfg.quad_order());
  const double tau = cfg.b * cfg.period;
  BandCache::Payload p;
  p.j_count = cfg.j_max;
  p.k_grid.resize(cfg.k_grid);
  p.values.assign(static_cast<std::size_t>(cfg.k_grid) * cfg.j_max, 0.0);
  const int threads = flags.threads > 0 ? flags.threads : cfg.threads;
  parallel_for(cfg.k_grid, threads, [&](int i) {
    const double k = tau * i / cfg.k_grid;
    const auto fs = solve_fiber(basis, W, k, cfg.j_max);
    p.k_grid[i] = k;
    for (int j = 0; j < cfg.j_max; ++j)
      p.values[static_cast<std::size_t>(i) * cfg.j_max + j] = fs.eigenvalues[j];
  });
  if (!flags.no_cache && cfg.use_cache) cache.store(key, p);
  return p;
}

inline nlohmann::json extremum_json(const ExtremumPoint& e) {
  return {{"k", e.k},          {"value", e.value},    {"curvature", e.curvature},
          {"mu", e.mu()},      {"order", e.order},    {"degenerate", e.degenerate},
          {"kind", e.is_max ? "max" : "min"}};
}

}  // namespace detail

inline int run_bands(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = detail::ensure_out_dir(cfg, flags);
  const auto p = detail::band_sweep(cfg, flags);
  CsvWriter csv((dir / "bands.csv").string());
  std::vector<std::string> hdr{"k"};
  for (int j = 1; j <= p.j_count; ++j) hdr.push_back("E_" + std::to_string(j));
  csv.header(hdr);
  for (std::size_t i = 0; i < p.k_grid.size(); ++i) {
    std::vector<double> row{p.k_grid[i]};
    for (int j = 0; j < p.j_count; ++j) row.push_back(p.values[i * p.j_count + j]);
    csv.row(row);
  }
  return 0;
}

inline int run_gaps(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = detail::ensure_out_dir(cfg, flags);
  BandSolver solver(HermiteBasis(cfg.b, cfg.N, cfg.quad_order()), cfg.potential(),
                    cfg.j_max);
  auto bands = solver.band_edges_and_gaps(cfg.j_max, cfg.k_grid);
  nlohmann::json out;
  out["bands"] = nlohmann::json::array();
  for (const auto& b : bands) {
    nlohmann::json jb{{"j", b.j},
                      {"lower_edge", b.lower_edge},
                      {"upper_edge", b.upper_edge},
                      {"constant", b.constant}};
    if (b.gap_above)
      jb["gap_above"] = {{"from", b.gap_above->first},
                         {"to", b.gap_above->second},
                         {"width", b.gap_above->second - b.gap_above->first}};
    out["bands"].push_back(jb);
  }
  detail::write_json(dir / "gaps.json", out);
  return 0;
}

inline int run_extrema(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = detail::ensure_out_dir(cfg, flags);
  BandSolver solver(HermiteBasis(cfg.b, cfg.N, cfg.quad_order()), cfg.potential(),
                    cfg.j_max);
  nlohmann::json out;
  out["bands"] = nlohmann::json::array();
  for (int j = 1; j <= cfg.j_max; ++j) {
    auto sets = solver.locate_extrema(j, cfg.k_grid);
    nlohmann::json jb{{"j", j},
                      {"lower_edge", sets.lower_edge},
                      {"upper_edge", sets.upper_edge}};
    jb["minima"] = nlohmann::json::array();
    jb["maxima"] = nlohmann::json::array();
    for (const auto& e : sets.minima) jb["minima"].push_back(detail::extremum_json(e));
    for (const auto& e : sets.maxima) jb["maxima"].push_back(detail::extremum_json(e));
    out["bands"].push_back(jb);
  }
  detail::write_json(dir / "extrema.json", out);
  return 0;
}

inline int run_semiclassics(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = detail::ensure_out_dir(cfg, flags);
  const FourierPotential W = cfg.potential();
  nlohmann::json out;
  out["c3_c4_provenance"] =
      "c3, c4 are the c1, c2 analogues with one extra derivative on W "
      "(stated by substitution, not displayed in closed form)";
  out["bands"] = nlohmann::json::array();
  bool all_passed = true;
  for (int j : cfg.semi_j) {
    const auto c = semiclassical_constants(j, W);
    nlohmann::json jc{{"j", j},      {"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3},
                      {"c4", c.c4},  {"c5", c.c5}, {"series1", c.series1},
                      {"series2", c.series2},      {"moment", c.moment}};
    double b_start = 2.0 * c.sup_w0;
    jc["thresholds"] = nlohmann::json::array();
    for (double x0 : cfg.semi_x0) {
      nlohmann::json jt{{"x0", x0}};
      try {
        const double b0 = threshold_b0(c, W, x0);
        jt["b0"] = b0;
        b_start = std::max(b_start, b0);
      } catch (const numerics_error&) {
        jt["b0"] = nullptr;  // W'(x0) = 0: no first-order prediction here
      }
      try {
        const double b1 = threshold_b1(c, W, x0);
        jt["b1"] = b1;
        b_start = std::max(b_start, b1);
      } catch (const numerics_error&) {
        jt["b1"] = nullptr;
      }
      jc["thresholds"].push_back(jt);
    }
    jc["sweep"] = nlohmann::json::array();
    for (int i = 0; i < cfg.semi_b_points; ++i) {
      const double t = (cfg.semi_b_points == 1)
                           ? 0.0
                           : static_cast<double>(i) / (cfg.semi_b_points - 1);
      const double b = b_start * std::pow(cfg.semi_b_factor, t);
      BandSolver solver(HermiteBasis(b, std::max(32, cfg.N / 4),
                                     4 * std::max(32, cfg.N / 4)),
                        W, std::max(4, 2 * j));
      const auto r1 = verify_first_bound(solver, j, c);
      const auto r2 = verify_second_bound(solver, j, c);
      all_passed = all_passed && r1.passed && r2.passed;
      jc["sweep"].push_back({{"b", b},
                             {"first_residual", r1.max_residual},
                             {"first_bound", r1.bound},
                             {"second_residual", r2.max_residual},
                             {"second_bound", r2.bound},
                             {"passed", r1.passed && r2.passed}});
    }
    out["bands"].push_back(jc);
  }
  out["passed"] = all_passed;
  detail::write_json(dir / "semiclassics.json", out);
  return 0;
}

inline int run_decay(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = detail::ensure_out_dir(cfg, flags);
  BandSolver solver(HermiteBasis(cfg.b, cfg.N, cfg.quad_order()), cfg.potential(),
                    std::max(cfg.decay_j, 2));
  std::vector<double> xi = cfg.decay_xi;
  if (xi.empty()) {
    const double hi = std::min(8.0, std::sqrt(70.0 / cfg.b));
    for (int i = 0; i < 9; ++i) xi.push_back(4.0 + (hi - 4.0) * i / 8.0);
  }
  const auto fit = decay_slope(solver, cfg.decay_j, cfg.decay_k0, cfg.decay_lo,
                               cfg.decay_hi, xi);
  CsvWriter csv((dir / "decay.csv").string());
  csv.header({"xi", "ln_integral", "s_xi"});
  for (std::size_t i = 0; i < fit.xi.size(); ++i)
    csv.row({fit.xi[i], fit.log_integral[i], fit.s_of_xi[i]});
  detail::write_json(dir / "decay.json",
                     {{"slope", fit.slope},
                      {"target", -cfg.b},
                      {"residual", fit.residual},
                      {"dropped", fit.dropped}});
  return 0;
}

// shared by `count` and `fitlaw`
struct CountArtifacts {
  std::vector<double> lambdas;
  std::vector<int> n_g2, n_nu_lo, n_nu_hi;
  std::vector<int> n_m1, n_oracle;  // empty unless enabled
  bool fit_valid = false;  // needs >= 6 decades of lambda
  GaussianFit fit;
  double capacity_value = 0.0;
  double sandwich_lo = 0.0, sandwich_hi = 0.0;
  int A_plus = 0;
  int L_used = 0;
  double nu_ratio_plus = 0.0, nu_ratio_minus = 0.0;  // scale-matched, at min lambda
};

inline CountArtifacts compute_counts(const RunConfig& cfg) {
  if (cfg.lambdas.empty()) throw config_error("counting.lambdas must be non-empty");
  if (cfg.rectangles.empty())
    throw config_error("perturbation.rectangles must be non-empty for counting");
  const PerturbationV V = cfg.perturbation();
  BandSolver solver(HermiteBasis(cfg.b, cfg.N, cfg.quad_order()), cfg.potential(),
                    std::max(cfg.j_max, cfg.gap_index + 1));
  const int j = cfg.gap_index;
  double lam_min = cfg.lambdas[0], lam_max = cfg.lambdas[0];
  for (double l : cfg.lambdas) {
    lam_min = std::min(lam_min, l);
    lam_max = std::max(lam_max, l);
  }
  auto model = make_effective_model(solver, j, lam_min, V, cfg.k_grid);
  if (cfg.L > 0) model.L = cfg.L;

  // gap must be open and wide enough for the probe energies
  auto bands = solver.band_edges_and_gaps(j + 1, cfg.k_grid);
  if (!bands[j - 1].gap_above)
    throw numerics_error("counting: the gap above band j is not open");
  const auto [gap_lo, gap_hi] = *bands[j - 1].gap_above;
  if (lam_max >= gap_hi - gap_lo)
    throw numerics_error("counting: largest lambda exceeds the gap width");

  CountArtifacts art;
  art.lambdas = cfg.lambdas;
  art.A_plus = model.A();

  // truncation stability: L and L+2 must agree to within one count
  for (;;) {
    Eigen::MatrixXcd gram = gram_G2(model, V);
    auto nu = nu_bounds(model, V);
    EffectiveModel wide = model;
    wide.L = model.L + 2;
    Eigen::MatrixXcd gram2 = gram_G2(wide, V);
    bool stable = true;
    art.n_g2.clear();
    art.n_nu_lo.clear();
    art.n_nu_hi.clear();
    for (double lam : cfg.lambdas) {
      const int n1 = count_G2(lam, gram);
      const int n2 = count_G2(lam, gram2);
      if (std::abs(n1 - n2) > 1) {
        stable = false;
        break;
      }
      const double thr = 2.0 * std::sqrt(lam);
      art.n_g2.push_back(n1);
      art.n_nu_lo.push_back(count_above(nu.nu_minus, thr));
      art.n_nu_hi.push_back(count_above(nu.nu_plus, thr));
    }
    if (stable) {
      // scale-matched ratio of the nu counts at the smallest lambda
      const double sq = std::sqrt(lam_min);
      const double denom = std::sqrt(std::abs(std::log(lam_min)));
      int cp = 0, cm = 0;
      for (double v : nu.nu_plus)
        if (v > nu.nu0_plus * sq) ++cp;
      for (double v : nu.nu_minus)
        if (v > nu.nu0_minus * sq) ++cm;
      art.nu_ratio_plus = cp / denom;
      art.nu_ratio_minus = cm / denom;
      break;
    }
    model.L += 2;
    if (model.L > 64)
      throw numerics_error("counting: lattice cutoff did not stabilize by L = 64");
  }
  art.L_used = model.L;

  if (cfg.with_m1) {
    for (double lam : cfg.lambdas)
      art.n_m1.push_back(count_M1(model, V, lam, cfg.m1_nx, cfg.m1_ny));
  }
  if (cfg.with_oracle) {
    for (double lam : cfg.lambdas)
      art.n_oracle.push_back(bs_oracle(solver, V, gap_lo + lam, gap_lo, gap_hi, cfg.bs));
  }
  if (art.lambdas.size() >= 4 && lam_max / lam_min >= 1e6) {
    art.fit = gaussian_fit(art.lambdas, art.n_g2);
    art.fit_valid = true;
  }
  art.capacity_value = capacity(V, cfg.b, cfg.period);
  const double pref = std::sqrt(2.0) / (std::sqrt(cfg.b) * cfg.period);
  art.sandwich_lo = pref * art.capacity_value;
  art.sandwich_hi = pref * art.A_plus;
  return art;
}

inline int run_count(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = detail::ensure_out_dir(cfg, flags);
  const auto art = compute_counts(cfg);
  CsvWriter csv((dir / "count.csv").string());
  csv.header({"lambda", "N_G2", "N_M1", "N_nu_lo", "N_nu_hi", "N_oracle"});
  for (std::size_t i = 0; i < art.lambdas.size(); ++i) {
    std::vector<std::string> cells{format_double(art.lambdas[i]),
                                   std::to_string(art.n_g2[i])};
    cells.push_back(art.n_m1.empty() ? "" : std::to_string(art.n_m1[i]));
    cells.push_back(std::to_string(art.n_nu_lo[i]));
    cells.push_back(std::to_string(art.n_nu_hi[i]));
    cells.push_back(art.n_oracle.empty() ? "" : std::to_string(art.n_oracle[i]));
    csv.row_cells(cells);
  }
  nlohmann::json out{{"slope", art.fit_valid ? nlohmann::json(art.fit.slope)
                                               : nlohmann::json()},
                     {"fit_residual", art.fit_valid ? nlohmann::json(art.fit.residual)
                                                    : nlohmann::json()},
                     {"capacity", art.capacity_value},
                     {"A_plus", art.A_plus},
                     {"sandwich", {art.sandwich_lo, art.sandwich_hi}},
                     {"L", art.L_used},
                     {"nu_threshold", "scale-matched (s = nu_0)"},
                     {"nu_ratio_plus", art.nu_ratio_plus},
                     {"nu_ratio_minus", art.nu_ratio_minus}};
  detail::write_json(dir / "count.json", out);
  return 0;
}

inline int run_oracle(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = detail::ensure_out_dir(cfg, flags);
  if (cfg.lambdas.empty()) throw config_error("counting.lambdas must be non-empty");
  const PerturbationV V = cfg.perturbation();
  BandSolver solver(HermiteBasis(cfg.b, cfg.N, cfg.quad_order()), cfg.potential(),
                    std::max({cfg.j_max, cfg.gap_index + 1, cfg.bs.j_count}));
  auto bands = solver.band_edges_and_gaps(cfg.gap_index + 1, cfg.k_grid);
  if (!bands[cfg.gap_index - 1].gap_above)
    throw numerics_error("oracle: the gap above band j is not open");
  const auto [gap_lo, gap_hi] = *bands[cfg.gap_index - 1].gap_above;
  CsvWriter csv((dir / "oracle.csv").string());
  csv.header({"lambda", "N_oracle"});
  for (double lam : cfg.lambdas) {
    const int n = bs_oracle(solver, V, gap_lo + lam, gap_lo, gap_hi, cfg.bs);
    csv.row_cells({format_double(lam), std::to_string(n)});
  }
  return 0;
}

inline int run_fitlaw(const RunConfig& cfg, const RunFlags& flags) {
  const auto dir = detail::ensure_out_dir(cfg, flags);
  const auto art = compute_counts(cfg);
  if (!art.fit_valid)
    throw numerics_error("fitlaw: need at least 6 decades of lambda and 4 points");
  const bool within = art.fit.slope >= art.sandwich_lo * 0.8 - 1e-12 &&
                      art.fit.slope <= art.sandwich_hi * 1.2 + 1e-12;
  detail::write_json(dir / "fitlaw.json",
                     {{"slope", art.fit.slope},
                      {"sandwich", {art.sandwich_lo, art.sandwich_hi}},
                      {"capacity", art.capacity_value},
                      {"A_plus", art.A_plus},
                      {"within_20pct", within}});
  return 0;
}

inline int run_subcommand(const std::string& cmd, const RunConfig& cfg,
                          const RunFlags& flags) {
  RunConfig c = cfg;
  if (flags.seed_set) c.seed = flags.seed;
  if (flags.no_cache) c.use_cache = false;
  if (cmd == "bands") return run_bands(c, flags);
  if (cmd == "gaps") return run_gaps(c, flags);
  if (cmd == "extrema") return run_extrema(c, flags);
  if (cmd == "semiclassics") return run_semiclassics(c, flags);
  if (cmd == "decay") return run_decay(c, flags);
  if (cmd == "count") return run_count(c, flags);
  if (cmd == "oracle") return run_oracle(c, flags);
  if (cmd == "fitlaw") return run_fitlaw(c, flags);
  throw config_error("unknown subcommand: " + cmd);
}

}  // namespace magband
