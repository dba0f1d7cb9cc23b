#include "options.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sppm/io.hpp"

namespace sppm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument(what + ": '" + s + "' is not a number");
  return v;
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos) throw std::invalid_argument("grid '" + s + "' is not of the form NxM");
  const double nx = parse_number(s.substr(0, x), "grid");
  const double ny = parse_number(s.substr(x + 1), "grid");
  if (nx < 1 || ny < 1 || nx != std::floor(nx) || ny != std::floor(ny))
    throw std::invalid_argument("grid '" + s + "' needs positive integer sides");
  return {static_cast<int>(nx), static_cast<int>(ny)};
}

std::vector<Point> lattice(int nx, int ny) {
  std::vector<Point> pts;
  for (int j = 1; j <= ny; ++j)
    for (int i = 1; i <= nx; ++i) pts.push_back({static_cast<double>(i), static_cast<double>(j)});
  return pts;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_number(item, "list entry"));
  return out;
}

void CohesionOptions::add_to(CLI::App& app) {
  app.add_option("--cohesion", kind, "Cohesion C1, C2, C3 or C4")->check(CLI::IsMember({"C1", "C2", "C3", "C4", "c1", "c2", "c3", "c4"}));
  app.add_option("--M", M, "Mass parameter")->check(CLI::PositiveNumber);
  app.add_option("--alpha", alpha, "C1 distance penalty")->check(CLI::PositiveNumber);
  app.add_option("--a", a, "C2 distance threshold, or 'median'");
  app.add_option("--kappa0", kappa0, "NIW prior mean scale")->check(CLI::PositiveNumber);
  app.add_option("--nu0", nu0, "NIW degrees of freedom (> 1)");
  app.add_option("--lambda0", lambda0, "NIW scale diagonal: v or v1,v2");
  app.add_option("--mu0-policy", mu0_policy, "NIW prior mean: centroid or fixed")->check(CLI::IsMember({"centroid", "fixed"}));
  app.add_option("--mu0-fixed", mu0_fixed, "Fixed NIW prior mean x,y");
}

CohesionConfig CohesionOptions::resolve(const LocationSet& loc) const {
  CohesionConfig c;
  c.kind = parse_cohesion_kind(kind);
  c.M = M;
  c.alpha = alpha;
  c.a = a == "median" ? loc.median_pairwise_distance() : parse_number(a, "a");
  c.niw.kappa0 = kappa0;
  c.niw.nu0 = nu0;
  const auto diag = parse_doubles(lambda0);
  if (diag.size() != 1 && diag.size() != 2) throw std::invalid_argument("lambda0 takes one or two values");
  c.niw.lambda0 = Eigen::Vector2d(diag.front(), diag.back()).asDiagonal();
  c.niw.mu0_policy = mu0_policy == "fixed" ? Mu0Policy::Fixed : Mu0Policy::ClusterCentroid;
  const auto m = parse_doubles(mu0_fixed);
  if (m.size() != 2) throw std::invalid_argument("mu0-fixed takes two values");
  c.niw.mu0_fixed = {m[0], m[1]};
  c.validate();
  return c;
}

void McmcOptions::add_to(CLI::App& app, bool with_seed) {
  app.add_option("--iters", iters, "Total sweeps")->check(CLI::PositiveNumber);
  app.add_option("--burnin", burnin, "Discarded sweeps")->check(CLI::NonNegativeNumber);
  app.add_option("--thin", thin, "Keep every thin-th sweep")->check(CLI::PositiveNumber);
  app.add_option("--neal-m", neal_m, "Auxiliary components per allocation")->check(CLI::PositiveNumber);
  if (with_seed) app.add_option("--seed", seed, "Random seed");
  app.add_option("--adapt", adapt, "Tune random-walk steps during burn-in");
  app.add_option("--init", init, "Initial partition: one or kmeans")->check(CLI::IsMember({"one", "kmeans"}));
  app.add_option("--init-clusters", init_clusters, "Clusters for kmeans initialization")->check(CLI::PositiveNumber);
  app.add_option("--rw-scales", rw_scales, "Initial random-walk steps, name=value,...");
}

McmcConfig McmcOptions::resolve() const {
  McmcConfig c;
  c.n_iter = iters;
  c.burnin = burnin;
  c.thin = thin;
  c.neal_m = neal_m;
  c.seed = seed;
  c.adapt = adapt;
  c.init = init == "kmeans" ? InitKind::KMeans : InitKind::OneCluster;
  c.init_clusters = init_clusters;
  for (const auto& item : split_list(rw_scales)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("rw-scales entries take the form name=value");
    c.rw_scales[trim(item.substr(0, eq))] = parse_number(trim(item.substr(eq + 1)), "rw-scales");
  }
  c.validate();
  return c;
}

void ModelOptions::add_to(CLI::App& app) {
  app.add_option("--model", model, "cps, jps or jls")->check(CLI::IsMember({"cps", "jps", "jls"}));
  app.add_option("--standardize", standardize, "Standardize response and covariate columns");
  app.add_option("--prior-only", prior_only, "Drop the likelihood so the chain targets the prior");
  app.add_option("--sigma-max", sigma_max, "Upper bound of the uniform prior on sigma (cps)")->check(CLI::PositiveNumber);
  app.add_option("--sigma0-max", sigma0_max, "Upper bound of the uniform prior on sigma0 (cps)")->check(CLI::PositiveNumber);
  app.add_option("--beta-sd", beta_sd, "Prior sd of regression coefficients (cps)")->check(CLI::PositiveNumber);
  app.add_option("--mu0-sd", mu0_sd, "Prior sd of the mean of cluster means")->check(CLI::PositiveNumber);
  app.add_option("--fixed-gamma", fixed_gamma, "Hold the coregionalization weight fixed (jls)")->check(CLI::Range(0.0, 1.0));
  app.add_option("--fixed-tau2", fixed_tau2, "Hold both partial sills fixed (jls)")->check(CLI::PositiveNumber);
}

CpsSpec ModelOptions::cps_spec(const CohesionConfig& cohesion) const {
  CpsSpec s;
  s.cohesion = cohesion;
  s.sigma_max = sigma_max;
  s.sigma0_max = sigma0_max;
  s.beta_sd = beta_sd;
  s.mu0_sd = mu0_sd;
  s.prior_only = prior_only;
  s.validate();
  return s;
}

JointSpec ModelOptions::joint_spec(const CohesionConfig& cohesion) const {
  JointSpec s;
  s.cohesion = cohesion;
  s.mode = model == "jls" ? JointMode::Jls : JointMode::Jps;
  s.mu0_sd = mu0_sd;
  s.fixed_gamma = fixed_gamma;
  s.fixed_tau2 = fixed_tau2;
  s.prior_only = prior_only;
  s.validate();
  return s;
}

PreparedData ModelOptions::load_training(const std::filesystem::path& path) const {
  const io::SiteData raw = io::read_sites(path, true);
  const Eigen::Index want = joint() ? 2 : 1;
  if (raw.y.cols() != want)
    throw std::runtime_error(path.string() + ": model " + model + " needs " +
                             (want == 1 ? "a y column" : "y1 and y2 columns"));
  if (joint() && raw.x.cols() > 0) throw std::runtime_error(path.string() + ": joint models take no covariates");
  return prepare_training(raw.coords, raw.y, raw.x, standardize);
}

std::filesystem::path output_path(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return dir / name;
}

void add_common(CLI::App& app, std::filesystem::path& out_dir) {
  app.add_option("--config", "Configuration file of key = value lines");
  app.add_option("--out-dir", out_dir, "Output directory");
}

std::vector<std::string> expand_config(int argc, char** argv, const CLI::App& app) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty() || args.size() < 2) return args;
  const CLI::App* current = nullptr;
  for (const CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    if (sub->get_name() == args[1]) current = sub;
  if (current == nullptr) return args;
  auto known_elsewhere = [&](const std::string& flag) {
    for (const CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
      if (sub != current && sub->get_option_no_throw(flag) != nullptr) return true;
    return false;
  };
  std::ifstream in(config);
  if (!in) throw std::runtime_error("cannot open config file " + config);
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(config + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error(config + ":" + std::to_string(lineno) + ": empty key");
    for (char& c : key)
      if (c == '_') c = '-';
    const std::string flag = "--" + key;
    if (current->get_option_no_throw(flag) == nullptr) {
      if (known_elsewhere(flag)) continue;
      throw std::runtime_error(config + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    injected.push_back(flag);
    injected.push_back(value);
  }
  // Program name and subcommand first, then the file, then the command line.
  std::vector<std::string> out{args[0], args[1]};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace sppm::cli
