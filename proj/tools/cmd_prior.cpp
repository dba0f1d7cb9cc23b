#include <cmath>
#include <iostream>
#include <memory>
#include <string>

#include "commands.hpp"
#include "options.hpp"
#include "sppm/correlation.hpp"
#include "sppm/io.hpp"
#include "sppm/prior.hpp"

namespace sppm::cli {

namespace {

struct PriorSimOptions {
  std::filesystem::path out_dir = ".";
  std::string grid = "10x10";
  std::filesystem::path locations;
  int draws = 5000;
  std::uint64_t seed = 1;
  bool exact = false;
  CohesionOptions cohesion;
};

LocationSet prior_locations(const PriorSimOptions& o) {
  if (!o.locations.empty()) return LocationSet::standardize(io::read_sites(o.locations, false).coords);
  const auto [nx, ny] = parse_grid(o.grid);
  return LocationSet::standardize(lattice(nx, ny));
}

void run_prior_sim(const PriorSimOptions& o) {
  const LocationSet loc = prior_locations(o);
  const CohesionConfig cfg = o.cohesion.resolve(loc);
  Rng rng(o.seed);
  const PriorSimulation sim = simulate_prior(loc, cfg, o.draws, rng);
  const PriorSummary& s = sim.summary;

  io::Table summary;
  summary.header = {"n_draws", "ess", "low_ess", "a", "mean_k", "se_k", "mean_singletons", "se_singletons",
                    "mean_max_cluster", "se_max_cluster"};
  summary.rows.push_back({static_cast<double>(s.n_draws), s.ess, s.low_ess ? 1.0 : 0.0, cfg.a, s.mean_k, s.mc_se_k,
                          s.mean_singletons, s.mc_se_singletons, s.mean_max_cluster, s.mc_se_max_cluster});
  io::write_table(output_path(o.out_dir, "prior_summary.csv"), summary);
  io::write_matrix(output_path(o.out_dir, "coclust.csv"), sim.coclustering, "c");
  if (s.low_ess)
    std::cerr << "prior-sim: effective sample size " << s.ess << " is below 50; estimates are unreliable\n";

  if (o.exact) {
    const auto prior = exact_prior(loc, cfg);
    io::Table t;
    t.header = {"probability"};
    for (std::size_t i = 0; i < loc.size(); ++i) t.header.push_back("c" + std::to_string(i + 1));
    for (const auto& [part, prob] : prior) {
      std::vector<double> row{prob};
      for (int l : part.labels()) row.push_back(l + 1);
      t.rows.push_back(std::move(row));
    }
    io::write_table(output_path(o.out_dir, "exact_prior.csv"), t);
    io::write_matrix(output_path(o.out_dir, "exact_coclust.csv"), coclustering_from_exact(prior, loc.size()), "c");
  }
}

struct CorrOptions {
  std::filesystem::path out_dir = ".";
  std::string surface = "curve";
  double extent = 3.0;
  int steps = 61;
  double tau2 = 1.0;
  double sigma2 = 0.1;
  double lambda2 = 0.0;
  double phi = 1.0;
  CohesionOptions cohesion;
};

// Pr(c_1 = c_2) for two locations under the exact prior.
double pair_same_cluster(Point a, Point b, const CohesionOptions& opts) {
  if (distance(a, b) < 1e-9) b.x += 1e-9;
  const Point pts[] = {a, b};
  const LocationSet loc = LocationSet::from_coordinates(pts);
  const CohesionConfig cfg = opts.resolve(loc);
  return coclustering_from_exact(exact_prior(loc, cfg), 2)(0, 1);
}

double pair_corr(Point a, Point b, double p_same, const CorrOptions& o) {
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(1, 1, o.tau2);
  const double h = std::exp(-o.phi * distance(a, b));
  return corr_local_regression_global_gp(one, one, t, o.sigma2, o.lambda2, h, p_same);
}

void run_corr(const CorrOptions& o) {
  if (o.steps < 2) throw std::invalid_argument("steps must be at least 2");
  if (!(o.extent > 0.0)) throw std::invalid_argument("extent must be positive");
  auto grid_value = [&](int i) { return -o.extent + 2.0 * o.extent * i / (o.steps - 1); };
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  if (o.surface == "curve") {
    header = {"distance", "p_same", "corr"};
    for (int i = 0; i < o.steps; ++i) {
      const Point a{0.0, 0.0}, b{o.extent * i / (o.steps - 1), 0.0};
      const double p = pair_same_cluster(a, b, o.cohesion);
      rows.push_back({io::format_double(b.x), io::format_double(p), io::format_double(pair_corr(a, b, p, o))});
    }
  } else {
    const bool plane = o.surface == "plane";
    header = plane ? std::vector<std::string>{"x", "y", "p_same", "corr"}
                   : std::vector<std::string>{"s1", "s2", "p_same", "corr"};
    for (int j = 0; j < o.steps; ++j)
      for (int i = 0; i < o.steps; ++i) {
        // plane: first site at the origin, second at (x, y); line: sites at (s1, 0) and (s2, 0).
        const Point a = plane ? Point{0.0, 0.0} : Point{grid_value(i), 0.0};
        const Point b = plane ? Point{grid_value(i), grid_value(j)} : Point{grid_value(j), 0.0};
        const double p = pair_same_cluster(a, b, o.cohesion);
        rows.push_back({io::format_double(plane ? b.x : a.x), io::format_double(plane ? b.y : b.x),
                        io::format_double(p), io::format_double(pair_corr(a, b, p, o))});
      }
  }
  io::write_text_table(output_path(o.out_dir, o.surface == "curve" ? "curve.csv" : "field.csv"), header, rows);
}

}  // namespace

void add_prior_sim(CLI::App& app) {
  auto o = std::make_shared<PriorSimOptions>();
  auto* sub = app.add_subcommand("prior-sim", "Importance-sampling summaries of the partition prior");
  add_common(*sub, o->out_dir);
  o->cohesion.add_to(*sub);
  sub->add_option("--grid", o->grid, "Regular NxM lattice of locations");
  sub->add_option("--locations", o->locations, "CSV with s1, s2 columns (overrides --grid)")->check(CLI::ExistingFile);
  sub->add_option("--draws", o->draws, "Sequential importance draws")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o->seed, "Random seed");
  sub->add_option("--exact", o->exact, "Also enumerate the exact prior (at most 12 locations)");
  sub->callback([o] { run_prior_sim(*o); });
}

void add_corr(CLI::App& app) {
  auto o = std::make_shared<CorrOptions>();
  auto* sub = app.add_subcommand("corr", "Marginal correlation between two locations");
  add_common(*sub, o->out_dir);
  o->cohesion.add_to(*sub);
  sub->add_option("--surface", o->surface, "curve (distance), plane (second site moves) or line (both move)")
      ->check(CLI::IsMember({"curve", "plane", "line"}));
  sub->add_option("--extent", o->extent, "Largest distance or coordinate magnitude");
  sub->add_option("--steps", o->steps, "Grid points per axis");
  sub->add_option("--tau2", o->tau2, "Variance of cluster means")->check(CLI::PositiveNumber);
  sub->add_option("--sigma2", o->sigma2, "Error variance")->check(CLI::PositiveNumber);
  sub->add_option("--lambda2", o->lambda2, "Partial sill of a global GP")->check(CLI::NonNegativeNumber);
  sub->add_option("--phi", o->phi, "Decay of the global GP")->check(CLI::PositiveNumber);
  sub->callback([o] { run_corr(*o); });
}

}  // namespace sppm::cli
