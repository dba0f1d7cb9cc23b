#include "sppm/simstudy.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "sppm/cps.hpp"
#include "sppm/dataset.hpp"
#include "sppm/metrics.hpp"

namespace sppm {

void SimStudyConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("replicates must be positive");
  if (clusters.empty() || errors.empty() || layouts.empty() || masses.empty() || cohesions.empty())
    throw std::invalid_argument("every simulation factor needs at least one level");
  for (double m : masses)
    if (!(m > 0.0)) throw std::invalid_argument("M values must be positive");
  if (a && !(*a > 0.0)) throw std::invalid_argument("a must be positive");
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
  mcmc.validate();
}

std::uint64_t replicate_data_seed(std::uint64_t master, int clusters, ErrorKind error, Layout layout, int replicate) {
  std::uint64_t s = derive_seed(master, static_cast<std::uint64_t>(clusters));
  s = derive_seed(s, static_cast<std::uint64_t>(error));
  s = derive_seed(s, static_cast<std::uint64_t>(layout));
  return derive_seed(s, static_cast<std::uint64_t>(replicate));
}

ReplicateResult run_replicate(const SimScenario& scenario, const CohesionConfig& cohesion, const McmcConfig& mcmc,
                              std::optional<double> a_override) {
  ReplicateResult r;
  try {
    const SimData sim = gen_dataset(scenario);
    const PreparedData prep = prepare_training(sim.train.coords, sim.train.y, sim.train.x, false);
    CpsSpec spec;
    spec.cohesion = cohesion;
    spec.cohesion.a = a_override.value_or(prep.data.loc.median_pairwise_distance());
    const CpsSamples samples = fit_cps(prep.data, spec, mcmc);
    r.rand = adjusted_rand(dahl_estimate(samples.partitions), sim.train_truth);
    r.lpml = lpml(samples.loglik);
    std::vector<Point> sites;
    for (const Point& p : sim.test.coords) sites.push_back(prep.data.loc.to_working(p));
    Rng rng(derive_seed(mcmc.seed, 0x9e37));
    const auto pred = predict_cps(prep.data, spec, samples, sites, sim.test.x, rng);
    r.mspe = mspe(std::span<const double>(sim.test.y.data(), static_cast<std::size_t>(sim.test.y.size())), pred.mean);
    r.ok = std::isfinite(r.rand) && std::isfinite(r.lpml) && std::isfinite(r.mspe);
    if (!r.ok) r.error = "non-finite score";
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

std::vector<CellSummary> run_simstudy(const SimStudyConfig& cfg) {
  cfg.validate();
  std::vector<CellSummary> cells;
  for (int k : cfg.clusters)
    for (ErrorKind e : cfg.errors)
      for (Layout l : cfg.layouts)
        for (double m : cfg.masses)
          for (CohesionKind c : cfg.cohesions) {
            CellSummary s;
            s.clusters = k;
            s.error = e;
            s.layout = l;
            s.M = m;
            s.cohesion = c;
            cells.push_back(s);
          }
  const std::size_t reps = static_cast<std::size_t>(cfg.replicates);
  std::vector<ReplicateResult> results(cells.size() * reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < results.size(); job = next++) {
      const CellSummary& cell = cells[job / reps];
      const int rep = static_cast<int>(job % reps);
      SimScenario sc;
      sc.n_train = cfg.n_train;
      sc.n_test = cfg.n_test;
      sc.n_clusters = cell.clusters;
      sc.layout = cell.layout;
      sc.error = cell.error;
      sc.gp_tau2 = cfg.gp_tau2;
      sc.gp_phi = cfg.gp_phi;
      sc.seed = replicate_data_seed(cfg.seed, cell.clusters, cell.error, cell.layout, rep);
      CohesionConfig coh;
      coh.kind = cell.cohesion;
      coh.M = cell.M;
      coh.alpha = cfg.alpha;
      McmcConfig mc = cfg.mcmc;
      mc.seed = derive_seed(sc.seed, job / reps);
      results[job] = run_replicate(sc, coh, mc, cfg.a);
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(nthreads, results.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    mean = se = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  };
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> rand, lp, ms;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& res = results[c * reps + r];
      if (!res.ok) {
        std::cerr << "simstudy: clusters=" << cells[c].clusters << " error=" << error_name(cells[c].error)
                  << " layout=" << layout_name(cells[c].layout) << " M=" << cells[c].M
                  << " cohesion=" << cohesion_name(cells[c].cohesion) << " replicate " << r
                  << " failed: " << res.error << '\n';
        ++cells[c].n_failed;
        continue;
      }
      ++cells[c].n_ok;
      rand.push_back(res.rand);
      lp.push_back(res.lpml);
      ms.push_back(res.mspe);
    }
    mean_se(rand, cells[c].rand_mean, cells[c].rand_se);
    mean_se(lp, cells[c].lpml_mean, cells[c].lpml_se);
    mean_se(ms, cells[c].mspe_mean, cells[c].mspe_se);
  }
  return cells;
}

}  // namespace sppm
