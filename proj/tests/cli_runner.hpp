#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace sppm::test {

namespace fs = std::filesystem;

/// Runs the command-line tool with `args`, stderr captured to `log`.
inline int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + SPPM_CLI_PATH + "\" " + args + " > /dev/null 2> \"" + log.string() + "\"";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("sppm_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
};

/// One short run of every subcommand into `dir`; `{d}` in an argument list
/// stands for the directory. Returns the commands that exited nonzero.
inline std::vector<std::string> run_all_commands(const fs::path& dir) {
  const std::vector<std::string> commands{
      "gen --kind sim --n-train 40 --n-test 15 --seed 3 --out-dir {d}/sim",
      "fit --data {d}/sim/train.csv --test {d}/sim/test.csv --cohesion C4 --M 0.1 --iters 300 --burnin 150 --seed 4 "
      "--out-dir {d}/fit",
      "predict --data {d}/sim/train.csv --samples {d}/fit/samples.csv --sites {d}/sim/test.csv --cohesion C4 --M 0.1 "
      "--seed 5 --out-dir {d}/pred",
      "metrics --loglik {d}/fit/loglik.csv --fitted {d}/fit/fitted.csv --data {d}/sim/train.csv "
      "--predictions {d}/pred/predict.csv --test {d}/sim/test.csv --out-dir {d}/metrics",
      "gen --kind joint --n-train 30 --n-test 10 --seed 6 --out-dir {d}/joint",
      "fit --model jls --data {d}/joint/train.csv --test {d}/joint/test.csv --iters 120 --burnin 60 --seed 7 "
      "--out-dir {d}/jls",
      "gen --kind field --grid 15x15 --regime local_gps --seed 8 --out-dir {d}/field",
      "prior-sim --grid 3x3 --cohesion C3 --draws 400 --exact true --seed 9 --out-dir {d}/prior",
      "corr --surface plane --steps 11 --out-dir {d}/corr",
      "simstudy --replicates 2 --n-train 25 --n-test 10 --clusters 4 --errors gaussian --layouts square "
      "--masses 0.1 --cohesions C1,C4 --iters 80 --burnin 40 --threads 2 --seed 10 --out-dir {d}/study",
  };
  fs::create_directories(dir);
  std::vector<std::string> failed;
  for (std::string c : commands) {
    for (std::size_t pos; (pos = c.find("{d}")) != std::string::npos;) c.replace(pos, 3, dir.string());
    if (run_cli(c, dir / "stderr.log") != 0) failed.push_back(c);
  }
  fs::remove(dir / "stderr.log");
  return failed;
}

/// Relative paths of files that differ or exist on one side only.
inline std::vector<std::string> differing_files(const fs::path& a, const fs::path& b) {
  std::vector<std::string> out;
  auto collect = [](const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
      if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    return files;
  };
  for (const auto& rel : collect(a))
    if (!fs::exists(b / rel) || slurp(a / rel) != slurp(b / rel)) out.push_back(rel.string());
  for (const auto& rel : collect(b))
    if (!fs::exists(a / rel)) out.push_back(rel.string());
  return out;
}

}  // namespace sppm::test
