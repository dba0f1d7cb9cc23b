#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "commands.hpp"
#include "options.hpp"
#include "sppm/io.hpp"
#include "sppm/metrics.hpp"

namespace sppm::cli {

namespace {

constexpr double kNA = std::numeric_limits<double>::quiet_NaN();

struct FitOptions {
  std::filesystem::path out_dir = ".";
  std::filesystem::path data;
  std::filesystem::path test;
  ModelOptions model;
  CohesionOptions cohesion;
  McmcOptions mcmc;
};

struct PredictOptions {
  std::filesystem::path out_dir = ".";
  std::filesystem::path data;
  std::filesystem::path samples;
  std::filesystem::path sites;
  std::uint64_t seed = 1;
  ModelOptions model;
  CohesionOptions cohesion;
};

std::vector<Point> working_sites(const PreparedData& prep, const std::vector<Point>& raw) {
  std::vector<Point> out;
  out.reserve(raw.size());
  for (const Point& p : raw) out.push_back(prep.data.loc.to_working(p));
  return out;
}

PredictionSummary to_original_scale(PredictionSummary s, const ColumnTransform& yt) {
  const double c = yt.center(0), k = yt.scale(0);
  for (auto* v : {&s.mean, &s.lo90, &s.hi90})
    for (double& x : *v) x = x * k + c;
  return s;
}

PredictionSummary predict_sites(const PreparedData& prep, const CpsSpec& spec, const CpsSamples& samples,
                                const io::SiteData& sites, Rng& rng) {
  if (sites.x.cols() != prep.data.num_covariates())
    throw std::runtime_error("prediction sites have " + std::to_string(sites.x.cols()) + " covariates, training data " +
                             std::to_string(prep.data.num_covariates()));
  const Eigen::MatrixXd x = sites.x.cols() > 0 ? prep.x_transform.apply(sites.x) : sites.x;
  return to_original_scale(predict_cps(prep.data, spec, samples, working_sites(prep, sites.coords), x, rng),
                           prep.y_transform);
}

PredictionSummary predict_sites(const PreparedData& prep, const JointSpec& spec, const JointSamples& samples,
                                const io::SiteData& sites, Rng& rng) {
  std::optional<Eigen::VectorXd> y2;
  if (sites.y.cols() == 2)
    y2 = ((sites.y.col(1).array() - prep.y_transform.center(1)) / prep.y_transform.scale(1)).matrix();
  return to_original_scale(predict_joint(prep.data, spec, samples, working_sites(prep, sites.coords), y2, rng),
                           prep.y_transform);
}

void write_predictions(const std::filesystem::path& path, const PredictionSummary& s) {
  io::Table t;
  t.header = {"site", "mean", "lo90", "hi90"};
  for (std::size_t i = 0; i < s.mean.size(); ++i)
    t.rows.push_back({static_cast<double>(i + 1), s.mean[i], s.lo90[i], s.hi90[i]});
  io::write_table(path, t);
}

void write_acceptance(const std::filesystem::path& path, const std::map<std::string, AcceptanceStat>& acc) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [name, st] : acc)
    rows.push_back({name, std::to_string(st.accepted), std::to_string(st.proposed), io::format_double(st.rate()),
                    io::format_double(st.final_scale)});
  io::write_text_table(path, {"parameter", "accepted", "proposed", "rate", "final_scale"}, rows);
}

double mspe_first_column(const Eigen::MatrixXd& y, const std::vector<double>& pred) {
  const Eigen::VectorXd col = y.col(0);
  return mspe(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), pred);
}

template <class Samples, class Spec, class Fitted>
void write_fit_outputs(const FitOptions& o, const PreparedData& prep, const Spec& spec, const Samples& samples,
                       Fitted fitted_working) {
  const auto dir = o.out_dir;
  io::write_matrix(output_path(dir, "loglik.csv"), samples.loglik, "l");
  io::write_matrix(output_path(dir, "coclust.csv"), coclustering(samples.partitions), "c");
  io::write_partition(output_path(dir, "partition.csv"), dahl_estimate(samples.partitions));
  write_acceptance(output_path(dir, "acceptance.csv"), samples.acceptance);

  const Eigen::MatrixXd fitted = prep.y_transform.invert(fitted_working);
  const Eigen::MatrixXd y = prep.y_transform.invert(prep.data.y);
  io::Table ft;
  ft.header = {"site"};
  for (Eigen::Index j = 0; j < fitted.cols(); ++j)
    ft.header.push_back(fitted.cols() == 1 ? "fitted" : "fitted" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < fitted.rows(); ++i) {
    std::vector<double> row{static_cast<double>(i + 1)};
    for (Eigen::Index j = 0; j < fitted.cols(); ++j) row.push_back(fitted(i, j));
    ft.rows.push_back(std::move(row));
  }
  io::write_table(output_path(dir, "fitted.csv"), ft);

  const Eigen::VectorXd yv = y.reshaped();
  const Eigen::VectorXd fv = fitted.reshaped();
  double test_mspe = kNA;
  if (!o.test.empty()) {
    const io::SiteData test = io::read_sites(o.test, true);
    Rng rng(derive_seed(o.mcmc.seed, 0x7e57));
    const PredictionSummary pred = predict_sites(prep, spec, samples, test, rng);
    write_predictions(output_path(dir, "predict.csv"), pred);
    test_mspe = mspe_first_column(test.y, pred.mean);
  }
  io::Table mt;
  mt.header = {"waic", "lpml", "mse", "mspe"};
  mt.rows.push_back({samples.loglik.rows() >= 2 ? waic(samples.loglik) : kNA, lpml(samples.loglik),
                     mse(std::span<const double>(yv.data(), static_cast<std::size_t>(yv.size())),
                         std::span<const double>(fv.data(), static_cast<std::size_t>(fv.size()))),
                     test_mspe});
  io::write_table(output_path(dir, "metrics.csv"), mt);
}

void run_fit(const FitOptions& o) {
  const PreparedData prep = o.model.load_training(o.data);
  const CohesionConfig coh = o.cohesion.resolve(prep.data.loc);
  const McmcConfig mc = o.mcmc.resolve();
  if (o.model.joint()) {
    const JointSpec spec = o.model.joint_spec(coh);
    const JointSamples samples = fit_joint(prep.data, spec, mc);
    if (samples.num_draws() == 0) throw std::runtime_error("no draws kept; check iters, burnin and thin");
    io::write_joint_samples(output_path(o.out_dir, "samples.csv"), samples);
    write_fit_outputs(o, prep, spec, samples, joint_fitted(prep.data, samples));
  } else {
    const CpsSpec spec = o.model.cps_spec(coh);
    const CpsSamples samples = fit_cps(prep.data, spec, mc);
    if (samples.num_draws() == 0) throw std::runtime_error("no draws kept; check iters, burnin and thin");
    io::write_cps_samples(output_path(o.out_dir, "samples.csv"), samples);
    write_fit_outputs(o, prep, spec, samples, Eigen::MatrixXd(cps_fitted(prep.data, samples)));
  }
}

void run_predict(const PredictOptions& o) {
  const PreparedData prep = o.model.load_training(o.data);
  const CohesionConfig coh = o.cohesion.resolve(prep.data.loc);
  const io::SiteData sites = io::read_sites(o.sites, false);
  Rng rng(o.seed);
  PredictionSummary pred;
  if (o.model.joint()) {
    const JointSamples samples = io::read_joint_samples(o.samples);
    pred = predict_sites(prep, o.model.joint_spec(coh), samples, sites, rng);
  } else {
    const CpsSamples samples = io::read_cps_samples(o.samples);
    pred = predict_sites(prep, o.model.cps_spec(coh), samples, sites, rng);
  }
  write_predictions(output_path(o.out_dir, "predict.csv"), pred);
}

}  // namespace

void add_fit(CLI::App& app) {
  auto o = std::make_shared<FitOptions>();
  auto* sub = app.add_subcommand("fit", "Fit a model by MCMC");
  add_common(*sub, o->out_dir);
  sub->add_option("--data", o->data, "Training CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--test", o->test, "Held-out CSV scored by MSPE")->check(CLI::ExistingFile);
  o->model.add_to(*sub);
  o->cohesion.add_to(*sub);
  o->mcmc.add_to(*sub);
  sub->callback([o] { run_fit(*o); });
}

void add_predict(CLI::App& app) {
  auto o = std::make_shared<PredictOptions>();
  auto* sub = app.add_subcommand("predict", "Posterior predictive summaries at new sites");
  add_common(*sub, o->out_dir);
  sub->add_option("--data", o->data, "Training CSV used for the fit")->required()->check(CLI::ExistingFile);
  sub->add_option("--samples", o->samples, "samples.csv written by fit")->required()->check(CLI::ExistingFile);
  sub->add_option("--sites", o->sites, "CSV of new sites: s1, s2, covariates; y2 for conditional joint prediction")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", o->seed, "Random seed");
  o->model.add_to(*sub);
  o->cohesion.add_to(*sub);
  sub->callback([o] { run_predict(*o); });
}

}  // namespace sppm::cli
