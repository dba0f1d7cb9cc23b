#pragma once

#include "CLI11.hpp"

namespace sppm::cli {

void add_prior_sim(CLI::App& app);
void add_gen(CLI::App& app);
void add_fit(CLI::App& app);
void add_predict(CLI::App& app);
void add_metrics(CLI::App& app);
void add_corr(CLI::App& app);
void add_simstudy(CLI::App& app);

}  // namespace sppm::cli
