#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sppm/cohesion.hpp"
#include "sppm/cps.hpp"
#include "sppm/dataset.hpp"
#include "sppm/joint.hpp"
#include "sppm/mcmc.hpp"
#include "sppm/spatial_partition.hpp"

namespace sppm::cli {

struct CohesionOptions {
  std::string kind = "C1";
  double M = 1.0;
  double alpha = 1.0;
  std::string a = "1";  // number or "median"
  double kappa0 = 1.0;
  double nu0 = 2.0;
  std::string lambda0 = "1";  // diagonal: "v" or "v1,v2"
  std::string mu0_policy = "centroid";
  std::string mu0_fixed = "0,0";

  void add_to(CLI::App& app);
  /// Resolves "median" against the working-scale locations.
  CohesionConfig resolve(const LocationSet& loc) const;
};

struct McmcOptions {
  int iters = 2000;
  int burnin = 1000;
  int thin = 1;
  int neal_m = 1;
  std::uint64_t seed = 1;
  bool adapt = true;
  std::string init = "one";
  int init_clusters = 4;
  std::string rw_scales;  // "name=value,name=value"

  void add_to(CLI::App& app, bool with_seed = true);
  McmcConfig resolve() const;
};

/// Model choice and the prior settings shared by fit and predict.
struct ModelOptions {
  std::string model = "cps";
  bool standardize = false;
  bool prior_only = false;
  double sigma_max = 10.0;
  double sigma0_max = 10.0;
  double beta_sd = 10.0;
  double mu0_sd = 10.0;
  std::optional<double> fixed_gamma;
  std::optional<double> fixed_tau2;

  void add_to(CLI::App& app);
  bool joint() const { return model != "cps"; }
  CpsSpec cps_spec(const CohesionConfig& cohesion) const;
  JointSpec joint_spec(const CohesionConfig& cohesion) const;
  /// Reads the training file and checks the response width against the model.
  PreparedData load_training(const std::filesystem::path& path) const;
};

std::vector<std::string> split_list(const std::string& s);
std::vector<double> parse_doubles(const std::string& s);
double parse_number(const std::string& s, const std::string& what);
/// Parses "NxM" into (N, M), both positive.
std::pair<int, int> parse_grid(const std::string& s);
/// N x M integer lattice (1..N) x (1..M).
std::vector<Point> lattice(int nx, int ny);

/// Creates the directory and returns the path of `name` inside it.
std::filesystem::path output_path(const std::filesystem::path& dir, const std::string& name);

/// Registers --config and --out-dir on a subcommand.
void add_common(CLI::App& app, std::filesystem::path& out_dir);

/// Rewrites argv so that `key = value` lines of the file named by --config
/// come first as --key value pairs; later command-line flags win. One file
/// can serve several subcommands: keys that belong only to other
/// subcommands are skipped, keys no subcommand knows are rejected.
std::vector<std::string> expand_config(int argc, char** argv, const CLI::App& app);

}  // namespace sppm::cli
