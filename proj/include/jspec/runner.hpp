#pragma once

#include "jspec/params.hpp"

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace jspec {

struct IntervalSpec {
    double lo, hi;
    std::vector<std::pair<double, double>> holes;
};

struct RunConfig {
    std::string command;
    std::string family = "hermite";
    std::map<std::string, double> family_options;
    std::string custom_path;  // custom family JSON, used when family == "custom"
    index_t n = 1000;
    std::vector<index_t> n_grid;
    double tol = 0;  // 0: the command default, 1e-6 for stieltjes and 1e-12 otherwise
    std::vector<std::complex<double>> z;
    std::vector<double> eps;
    std::vector<double> x;
    std::vector<IntervalSpec> intervals;
    std::string normalizer;  // empty: the natural one for the family's case
    double rel_tol = 0.1;
    index_t j_max = 100000;
    index_t M = 0;  // 0: chosen automatically
    std::filesystem::path out = "out";
    std::string canonical;  // normalized config, hashed into the manifest
};

const std::vector<std::string>& run_commands();
std::string command_help();

// throws Error(Config) with the offending field or line/column
RunConfig parse_run_config(const std::string& json_text);
RunConfig default_run_config(const std::string& command);
void finalize_config(RunConfig& cfg);

// 0 when every declared tolerance holds, 1 otherwise
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace jspec
