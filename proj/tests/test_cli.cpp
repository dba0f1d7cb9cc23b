#include <algorithm>
#include <cmath>
#include <fstream>

#include "cli_runner.hpp"
#include "doctest.h"
#include "sppm/io.hpp"

using namespace sppm;
using test::ScratchDir;
namespace fs = std::filesystem;

TEST_CASE("every command reruns byte for byte") {
  ScratchDir dir("cli_det");
  const auto first = test::run_all_commands(dir.path / "a");
  const auto second = test::run_all_commands(dir.path / "b");
  for (const auto& c : first) FAIL_CHECK("command failed: " << c);
  CHECK(second == first);
  const auto diff = test::differing_files(dir.path / "a", dir.path / "b");
  for (const auto& f : diff) FAIL_CHECK("differs: " << f);

  {
    // Outputs parse back through the readers.
    const fs::path a = dir.path / "a";
    const CpsSamples s = io::read_cps_samples(a / "fit" / "samples.csv");
    CHECK(s.num_draws() == 150);
    const Eigen::MatrixXd L = io::read_matrix(a / "fit" / "loglik.csv");
    CHECK(L.rows() == 150);
    CHECK(L.cols() == 40);
    const Partition dahl = io::read_partition(a / "fit" / "partition.csv");
    CHECK(dahl.size() == 40);
    CHECK(std::find(s.partitions.begin(), s.partitions.end(), dahl) != s.partitions.end());
    CHECK(io::read_joint_samples(a / "jls" / "samples.csv").num_draws() == 60);
    CHECK(io::read_table(a / "pred" / "predict.csv").rows.size() == 15);
    CHECK(io::read_matrix(a / "prior" / "exact_coclust.csv").rows() == 9);
    const std::string study = test::slurp(a / "study" / "simstudy_4clusters.csv");
    CHECK(std::count(study.begin(), study.end(), '\n') == 3);
  }
}

TEST_CASE("metrics from a single-draw log-likelihood") {
  ScratchDir dir("cli_metrics");
  {
    std::ofstream out(dir.path / "loglik.csv");
    out << "l1,l2,l3\n-1.5,-0.25,-2\n";
  }
  REQUIRE(test::run_cli("metrics --loglik " + (dir.path / "loglik.csv").string() + " --out-dir " + dir.path.string(),
                        dir.path / "err.log") == 0);
  const io::Table t = io::read_table(dir.path / "metrics.csv");
  CHECK(t.rows[0][static_cast<std::size_t>(t.column("lpml"))] == doctest::Approx(-3.75).epsilon(1e-14));
  CHECK(std::isnan(t.rows[0][static_cast<std::size_t>(t.column("waic"))]));
}

TEST_CASE("configuration files") {
  ScratchDir dir("cli_config");
  const auto cfg = dir.path / "run.cfg";
  const auto log = dir.path / "err.log";
  SUBCASE("values apply and flags override them") {
    std::ofstream(cfg) << "# shared settings\nn_train = 12\nn-test = 5\nseed = 2\niters = 50\n";
    REQUIRE(test::run_cli("gen --config " + cfg.string() + " --n-test 7 --out-dir " + dir.path.string(), log) == 0);
    CHECK(io::read_table(dir.path / "train.csv").rows.size() == 12);
    CHECK(io::read_table(dir.path / "test.csv").rows.size() == 7);
  }
  SUBCASE("unknown keys fail") {
    std::ofstream(cfg) << "seed = 2\nbogus = 1\n";
    CHECK(test::run_cli("gen --config " + cfg.string() + " --out-dir " + dir.path.string(), log) != 0);
    CHECK(test::slurp(log).find("unknown key") != std::string::npos);
  }
}

TEST_CASE("bad invocations exit nonzero") {
  ScratchDir dir("cli_bad");
  const auto log = dir.path / "err.log";
  CHECK(test::run_cli("", log) != 0);
  CHECK(test::run_cli("fit", log) != 0);
  CHECK(test::run_cli("nonsense", log) != 0);
  CHECK(test::run_cli("prior-sim --grid 5x5 --exact true --out-dir " + dir.path.string(), log) != 0);
  CHECK(test::slurp(log).find("error") != std::string::npos);
  CHECK(test::run_cli("gen --grid 0x3 --kind field --out-dir " + dir.path.string(), log) != 0);
}
