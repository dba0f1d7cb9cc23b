#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sppm/cohesion.hpp"
#include "sppm/datagen.hpp"
#include "sppm/mcmc.hpp"

namespace sppm {

struct SimStudyConfig {
  int replicates = 100;
  std::size_t n_train = 100;
  std::size_t n_test = 100;
  std::vector<int> clusters{1, 4};
  std::vector<ErrorKind> errors{ErrorKind::Gaussian, ErrorKind::Mixture};
  std::vector<Layout> layouts{Layout::Square, Layout::Mixture};
  std::vector<double> masses{0.01, 0.1, 1.0};
  std::vector<CohesionKind> cohesions{CohesionKind::DistancePenalty, CohesionKind::HardBoundary,
                                      CohesionKind::PriorPredictive, CohesionKind::DoubleDip};
  double alpha = 1.0;
  /// C2 threshold; unset means the median pairwise distance of each
  /// replicate's training sites.
  std::optional<double> a = 1.0;
  double gp_tau2 = 2.0;
  double gp_phi = 6.0;
  McmcConfig mcmc;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct ReplicateResult {
  bool ok = false;
  std::string error;
  double rand = 0.0;
  double lpml = 0.0;
  double mspe = 0.0;
};

struct CellSummary {
  int clusters = 4;
  ErrorKind error = ErrorKind::Gaussian;
  Layout layout = Layout::Square;
  double M = 1.0;
  CohesionKind cohesion = CohesionKind::DistancePenalty;
  int n_ok = 0;
  int n_failed = 0;
  double rand_mean = 0.0, rand_se = 0.0;
  double lpml_mean = 0.0, lpml_se = 0.0;
  double mspe_mean = 0.0, mspe_se = 0.0;
};

/// Seed of the data set for one replicate of a (clusters, error, layout)
/// cell; shared by every cohesion and M so they are compared on the same data.
std::uint64_t replicate_data_seed(std::uint64_t master, int clusters, ErrorKind error, Layout layout, int replicate);

/// Fits CPS to one generated data set and scores it: adjusted Rand of the
/// least-squares partition against the generating groups, LPML on the
/// training data and MSPE of the predictive means on the test split.
ReplicateResult run_replicate(const SimScenario& scenario, const CohesionConfig& cohesion, const McmcConfig& mcmc,
                              std::optional<double> a_override);

/// Runs every replicate of every cell on a worker pool. Cells appear in the
/// order clusters, error, layout, M, cohesion.
std::vector<CellSummary> run_simstudy(const SimStudyConfig& cfg);

}  // namespace sppm
