#include <memory>
#include <string>

#include "commands.hpp"
#include "options.hpp"
#include "sppm/datagen.hpp"
#include "sppm/io.hpp"

namespace sppm::cli {

namespace {

struct GenOptions {
  std::filesystem::path out_dir = ".";
  std::string kind = "sim";
  int clusters = 4;
  std::string layout = "square";
  std::string error = "gaussian";
  std::size_t n_train = 100;
  std::size_t n_test = 100;
  double gp_tau2 = 2.0;
  double gp_phi = 6.0;
  double gamma = 0.5;
  std::string regime = "global";
  std::string grid = "50x50";
  double width = 10.0;
  double height = 10.0;
  std::uint64_t seed = 1;
};

void write_split(const std::filesystem::path& path, const std::vector<Point>& coords, const Eigen::MatrixXd& y,
                 const Eigen::MatrixXd& x) {
  io::SiteData d;
  d.coords = coords;
  d.y = y;
  d.x = x;
  io::write_sites(path, d);
}

void run_gen(const GenOptions& o) {
  if (o.kind == "sim") {
    SimScenario sc;
    sc.n_train = o.n_train;
    sc.n_test = o.n_test;
    sc.n_clusters = o.clusters;
    sc.layout = parse_layout(o.layout);
    sc.error = parse_error_kind(o.error);
    sc.gp_tau2 = o.gp_tau2;
    sc.gp_phi = o.gp_phi;
    sc.seed = o.seed;
    const SimData sim = gen_dataset(sc);
    write_split(output_path(o.out_dir, "train.csv"), sim.train.coords, sim.train.y, sim.train.x);
    write_split(output_path(o.out_dir, "test.csv"), sim.test.coords, sim.test.y, sim.test.x);
    io::write_partition(output_path(o.out_dir, "truth.csv"), sim.train_truth);
  } else if (o.kind == "joint") {
    JointScenario sc;
    sc.n_train = o.n_train;
    sc.n_test = o.n_test;
    sc.layout = parse_layout(o.layout);
    sc.gamma = o.gamma;
    sc.seed = o.seed;
    const JointSimData sim = gen_joint_dataset(sc);
    write_split(output_path(o.out_dir, "train.csv"), sim.train.coords, sim.train.y, Eigen::MatrixXd());
    write_split(output_path(o.out_dir, "test.csv"), sim.test.coords, sim.test.y, Eigen::MatrixXd());
    io::write_partition(output_path(o.out_dir, "truth.csv"), sim.train_truth);
  } else {
    const auto [nx, ny] = parse_grid(o.grid);
    GridSpec g{nx, ny, o.width, o.height};
    Rng rng(o.seed);
    const GridField f = gen_regime_fields(parse_field_regime(o.regime), g, rng);
    io::Table t;
    t.header = {"s1", "s2", "group", "value"};
    for (std::size_t i = 0; i < f.coords.size(); ++i)
      t.rows.push_back({f.coords[i].x, f.coords[i].y, static_cast<double>(f.group[i] + 1),
                        f.value(static_cast<Eigen::Index>(i))});
    io::write_table(output_path(o.out_dir, "field.csv"), t);
  }
}

}  // namespace

void add_gen(CLI::App& app) {
  auto o = std::make_shared<GenOptions>();
  auto* sub = app.add_subcommand("gen", "Generate synthetic data");
  add_common(*sub, o->out_dir);
  sub->add_option("--kind", o->kind, "sim (univariate with covariate), joint (bivariate) or field (gridded fields)")
      ->check(CLI::IsMember({"sim", "joint", "field"}));
  sub->add_option("--clusters", o->clusters, "Generating clusters, 1 or 4 (sim)")->check(CLI::IsMember({1, 4}));
  sub->add_option("--layout", o->layout, "square or mixture");
  sub->add_option("--error", o->error, "gaussian or mixture (sim)");
  sub->add_option("--n-train", o->n_train, "Training sites")->check(CLI::PositiveNumber);
  sub->add_option("--n-test", o->n_test, "Test sites")->check(CLI::PositiveNumber);
  sub->add_option("--gp-tau2", o->gp_tau2, "Partial sill of the unexplained field (sim)")->check(CLI::PositiveNumber);
  sub->add_option("--gp-phi", o->gp_phi, "Decay of the unexplained field (sim)")->check(CLI::PositiveNumber);
  sub->add_option("--gamma", o->gamma, "Coregionalization weight (joint)")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--regime", o->regime, "global, local_means or local_gps (field)");
  sub->add_option("--grid", o->grid, "NxM grid (field)");
  sub->add_option("--width", o->width, "Domain width (field)")->check(CLI::PositiveNumber);
  sub->add_option("--height", o->height, "Domain height (field)")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o->seed, "Random seed");
  sub->callback([o] { run_gen(*o); });
}

}  // namespace sppm::cli
