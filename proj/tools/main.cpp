#include <algorithm>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "options.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spatial product partition models: prior simulation, fitting and evaluation"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sppm::cli::add_prior_sim(app);
  sppm::cli::add_gen(app);
  sppm::cli::add_fit(app);
  sppm::cli::add_predict(app);
  sppm::cli::add_metrics(app);
  sppm::cli::add_corr(app);
  sppm::cli::add_simstudy(app);

  try {
    std::vector<std::string> args = sppm::cli::expand_config(argc, argv, app);
    // CLI11 takes the arguments without the program name, in reverse order.
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "sppm: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
