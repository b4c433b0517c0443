#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace whmc::cli {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct DensityGridConfig {
    double x_max = 1.0;
    double y_max = 4.0;
    std::size_t nx = 40;
    std::size_t ny = 80;
};

struct RunConfig {
    std::string command;
    std::string preset;
    nlohmann::json model;
    double r = 0.05;
    // recompute the drift so that exp(X_t - r t) is a martingale
    bool calibrate = true;
    double t = 1.0;
    std::size_t steps = 100;
    std::size_t paths = 100000;
    std::uint64_t seed = 1;
    std::size_t truncation = 128;
    // 0 selects the number of logical cores
    unsigned workers = 0;
    std::string engine = "whmc";
    double strike = 5.0;
    // 0 means no upper barrier
    double b_upper = 10.0;
    double b_lower = 0.0;
    std::vector<double> spots;
    // 0 selects 2 steps
    std::size_t baseline_steps = 0;
    // factorization rate for `factorize`; 0 selects steps / t
    double lambda = 0.0;
    DensityGridConfig density;
    std::vector<std::size_t> n_list{10, 20, 50, 100, 200};
    double converge_spot = 6.0;
    std::string out = "whmc_out";
};

void to_json(nlohmann::json& j, const RunConfig& c);
// Rejects unknown keys and values of the wrong type.
void from_json(const nlohmann::json& j, RunConfig& c);

const std::vector<std::string>& commands();
const std::vector<std::string>& preset_names();
RunConfig preset(const std::string& name);

// Runs the command and writes its artifacts and metadata.json under config.out.
// Returns the metadata record.
nlohmann::json run(const RunConfig& config);

// Entry point: 0 success, 1 numerical or I/O failure, 2 usage error. Errors
// are reported on err as {"error": {"type": ..., "message": ...}}.
int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace whmc::cli
