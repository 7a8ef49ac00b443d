#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fkpde/debias.hpp"
#include "fkpde/estimator.hpp"
#include "fkpde/problem.hpp"

namespace fkpde {

struct BenchmarkCase {
    std::string id;
    PdeProblem problem;
    Vec x;
    double t = 0.0;
    std::optional<double> reference;
};

enum class Method { ea, debias, euler };

struct Budget {
    enum class Kind { samples, work_units, wall_seconds } kind = Kind::samples;
    double amount = 0.0;
};

struct MethodRow {
    std::string method;
    std::string param;  // halting spec, step count, ...
    EstimatorResult est;
    double wvp = 0.0;  // total work x sample variance
    bool zero_samples = false;
};

struct BenchmarkReport {
    std::string case_id;
    std::vector<MethodRow> rows;
};

struct BenchmarkConfig {
    Budget budget;
    std::uint64_t seed = 1;
    int threads = 1;
    HaltingDistribution halting = HaltingDistribution::geometric(0.45);
    std::int64_t euler_steps = 1024;
    EaMode ea_mode = EaMode::two_step;
};

// Runs each method against the budget (methods run sequentially for fair
// wall timing; parallelism lives inside each estimator).
BenchmarkReport run_benchmark(const BenchmarkCase& bc, const std::vector<Method>& methods,
                              const BenchmarkConfig& config);

// Frozen column schema (versioned header line):
//   case,method,param,mean,ci_half,n,work,wall_s,wvp
std::string report_csv(const BenchmarkReport& report);
std::string report_json(const BenchmarkReport& report);

// Shared row emission for the CLI outputs, same schema.
std::string csv_header();
std::string csv_row(const std::string& case_id, const MethodRow& row);

}  // namespace fkpde
