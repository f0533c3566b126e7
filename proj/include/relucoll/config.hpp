#pragma once
// Experiment configuration: parsing with field-path diagnostics.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relucoll/fem.hpp"
#include "relucoll/index_sets.hpp"
#include "relucoll/serialize.hpp"

namespace rc {

struct McConfig {
    std::size_t n_samples = 256;
    std::uint64_t seed = 1;
    std::size_t tail_dims = 8;
};

struct ExperimentConfig {
    LognormalProblem problem;
    WeightModel weights;
    std::vector<double> xi_sweep;
    std::optional<double> delta_fixed;  // empty: closed-form delta
    std::optional<double> omega_fixed;  // empty: omega = floor(K xi) with fitted K
    McConfig mc;
    int truth_refine = 8;
    std::size_t lambda_cap = kDefaultLambdaCap;
    std::string output = "out";
    Json raw;  // as parsed, used for hashing

    // Hash over everything except the output location.
    std::string hash() const;
};

// Throws ConfigError whose message starts with the offending field path.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace rc
