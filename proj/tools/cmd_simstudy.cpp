#include <memory>
#include <string>

#include "commands.hpp"
#include "options.hpp"
#include "sppm/io.hpp"
#include "sppm/simstudy.hpp"

namespace sppm::cli {

namespace {

struct SimStudyOptions {
  std::filesystem::path out_dir = ".";
  int replicates = 100;
  std::size_t n_train = 100;
  std::size_t n_test = 100;
  std::string clusters = "1,4";
  std::string errors = "gaussian,mixture";
  std::string layouts = "square,mixture";
  std::string masses = "0.01,0.1,1";
  std::string cohesions = "C1,C2,C3,C4";
  double alpha = 1.0;
  std::string a = "1";
  double gp_tau2 = 2.0;
  double gp_phi = 6.0;
  int threads = 0;
  McmcOptions mcmc;
};

void write_cells(const std::filesystem::path& path, const std::vector<CellSummary>& cells, bool with_rand) {
  std::vector<std::string> header{"error", "layout", "M", "cohesion", "n_ok", "n_failed"};
  if (with_rand) header.insert(header.end(), {"rand", "rand_se"});
  header.insert(header.end(), {"lpml", "lpml_se", "mspe", "mspe_se"});
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cells) {
    std::vector<std::string> r{std::string(error_name(c.error)), std::string(layout_name(c.layout)),
                               io::format_double(c.M), std::string(cohesion_name(c.cohesion)),
                               std::to_string(c.n_ok), std::to_string(c.n_failed)};
    if (with_rand) r.insert(r.end(), {io::format_double(c.rand_mean), io::format_double(c.rand_se)});
    r.insert(r.end(), {io::format_double(c.lpml_mean), io::format_double(c.lpml_se), io::format_double(c.mspe_mean),
                       io::format_double(c.mspe_se)});
    rows.push_back(std::move(r));
  }
  io::write_text_table(path, header, rows);
}

void run_simstudy_cmd(const SimStudyOptions& o) {
  SimStudyConfig cfg;
  cfg.replicates = o.replicates;
  cfg.n_train = o.n_train;
  cfg.n_test = o.n_test;
  cfg.clusters.clear();
  for (double k : parse_doubles(o.clusters)) cfg.clusters.push_back(static_cast<int>(k));
  cfg.errors.clear();
  for (const auto& e : split_list(o.errors)) cfg.errors.push_back(parse_error_kind(e));
  cfg.layouts.clear();
  for (const auto& l : split_list(o.layouts)) cfg.layouts.push_back(parse_layout(l));
  cfg.masses = parse_doubles(o.masses);
  cfg.cohesions.clear();
  for (const auto& c : split_list(o.cohesions)) cfg.cohesions.push_back(parse_cohesion_kind(c));
  cfg.alpha = o.alpha;
  cfg.a = o.a == "median" ? std::nullopt : std::optional<double>(parse_number(o.a, "a"));
  cfg.gp_tau2 = o.gp_tau2;
  cfg.gp_phi = o.gp_phi;
  cfg.mcmc = o.mcmc.resolve();
  cfg.seed = o.mcmc.seed;
  cfg.threads = o.threads;

  const std::vector<CellSummary> cells = run_simstudy(cfg);
  std::vector<CellSummary> four, one;
  for (const auto& c : cells) (c.clusters == 4 ? four : one).push_back(c);
  if (!four.empty()) write_cells(output_path(o.out_dir, "simstudy_4clusters.csv"), four, true);
  if (!one.empty()) write_cells(output_path(o.out_dir, "simstudy_1cluster.csv"), one, false);
}

}  // namespace

void add_simstudy(CLI::App& app) {
  auto o = std::make_shared<SimStudyOptions>();
  auto* sub = app.add_subcommand("simstudy", "Replicated simulation study over a grid of scenarios");
  add_common(*sub, o->out_dir);
  sub->add_option("--replicates", o->replicates, "Data sets per cell")->check(CLI::PositiveNumber);
  sub->add_option("--n-train", o->n_train, "Training sites")->check(CLI::PositiveNumber);
  sub->add_option("--n-test", o->n_test, "Test sites")->check(CLI::PositiveNumber);
  sub->add_option("--clusters", o->clusters, "Comma list drawn from 1,4");
  sub->add_option("--errors", o->errors, "Comma list drawn from gaussian,mixture");
  sub->add_option("--layouts", o->layouts, "Comma list drawn from square,mixture");
  sub->add_option("--masses", o->masses, "Comma list of M values");
  sub->add_option("--cohesions", o->cohesions, "Comma list drawn from C1..C4");
  sub->add_option("--alpha", o->alpha, "C1 distance penalty")->check(CLI::PositiveNumber);
  sub->add_option("--a", o->a, "C2 threshold, or 'median' for each replicate's median distance");
  sub->add_option("--gp-tau2", o->gp_tau2, "Partial sill of the unexplained field")->check(CLI::PositiveNumber);
  sub->add_option("--gp-phi", o->gp_phi, "Decay of the unexplained field")->check(CLI::PositiveNumber);
  sub->add_option("--threads", o->threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  o->mcmc.add_to(*sub);
  sub->callback([o] { run_simstudy_cmd(*o); });
}

}  // namespace sppm::cli
