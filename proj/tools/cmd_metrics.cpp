#include <limits>
#include <memory>

#include "commands.hpp"
#include "options.hpp"
#include "sppm/io.hpp"
#include "sppm/metrics.hpp"

namespace sppm::cli {

namespace {

struct MetricsOptions {
  std::filesystem::path out_dir = ".";
  std::filesystem::path loglik;
  std::filesystem::path fitted;
  std::filesystem::path data;
  std::filesystem::path predictions;
  std::filesystem::path test;
  std::filesystem::path partition;
  std::filesystem::path truth;
};

// First response column of a site file next to a single prediction column.
double squared_error(const std::filesystem::path& observed, const std::filesystem::path& predicted,
                     const std::string& column) {
  const io::SiteData obs = io::read_sites(observed, true);
  const std::vector<double> pred = io::read_table(predicted).column_values(column);
  const Eigen::VectorXd y = obs.y.col(0);
  return mse(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), pred);
}

void run_metrics(const MetricsOptions& o) {
  constexpr double na = std::numeric_limits<double>::quiet_NaN();
  double w = na, l = na, ms = na, msp = na, ari = na;
  if (!o.loglik.empty()) {
    const Eigen::MatrixXd L = io::read_matrix(o.loglik);
    l = lpml(L);
    if (L.rows() >= 2) w = waic(L);
  }
  if (!o.fitted.empty() || !o.data.empty()) {
    if (o.fitted.empty() || o.data.empty()) throw std::invalid_argument("--fitted and --data go together");
    const io::Table t = io::read_table(o.fitted);
    ms = squared_error(o.data, o.fitted, t.column("fitted") >= 0 ? "fitted" : "fitted1");
  }
  if (!o.predictions.empty() || !o.test.empty()) {
    if (o.predictions.empty() || o.test.empty()) throw std::invalid_argument("--predictions and --test go together");
    msp = squared_error(o.test, o.predictions, "mean");
  }
  if (!o.partition.empty() || !o.truth.empty()) {
    if (o.partition.empty() || o.truth.empty()) throw std::invalid_argument("--partition and --truth go together");
    ari = adjusted_rand(io::read_partition(o.partition), io::read_partition(o.truth));
  }
  io::Table t;
  t.header = {"waic", "lpml", "mse", "mspe", "rand"};
  t.rows.push_back({w, l, ms, msp, ari});
  io::write_table(output_path(o.out_dir, "metrics.csv"), t);
}

}  // namespace

void add_metrics(CLI::App& app) {
  auto o = std::make_shared<MetricsOptions>();
  auto* sub = app.add_subcommand("metrics", "Model comparison and accuracy metrics from saved outputs");
  add_common(*sub, o->out_dir);
  sub->add_option("--loglik", o->loglik, "Draws x sites log-likelihood matrix (LPML, WAIC)")->check(CLI::ExistingFile);
  sub->add_option("--fitted", o->fitted, "fitted.csv (MSE, with --data)")->check(CLI::ExistingFile);
  sub->add_option("--data", o->data, "Training CSV")->check(CLI::ExistingFile);
  sub->add_option("--predictions", o->predictions, "predict.csv (MSPE, with --test)")->check(CLI::ExistingFile);
  sub->add_option("--test", o->test, "Held-out CSV")->check(CLI::ExistingFile);
  sub->add_option("--partition", o->partition, "Estimated partition (adjusted Rand, with --truth)")
      ->check(CLI::ExistingFile);
  sub->add_option("--truth", o->truth, "Reference partition")->check(CLI::ExistingFile);
  sub->callback([o] { run_metrics(*o); });
}

}  // namespace sppm::cli
