#include "fkpde/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "fkpde/euler.hpp"
#include "fkpde/transform.hpp"

namespace fkpde {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Exact pooled update of (n, mean, M2) pairs.
void merge_stats(std::size_t nb, double mean_b, double sd_b, std::size_t& n, double& mean,
                 double& m2) {
    if (nb == 0) return;
    const double m2_b = sd_b * sd_b * static_cast<double>(nb > 1 ? nb - 1 : 0);
    const double delta = mean_b - mean;
    const std::size_t nn = n + nb;
    m2 += m2_b + delta * delta * static_cast<double>(n) * static_cast<double>(nb) /
                     static_cast<double>(nn);
    mean += delta * static_cast<double>(nb) / static_cast<double>(nn);
    n = nn;
}

template <typename Run>
MethodRow run_to_budget(const Budget& budget, Run run) {
    MethodRow row;
    if (budget.amount <= 0.0) {
        row.zero_samples = true;
        return row;
    }
    if (budget.kind == Budget::Kind::samples) {
        row.est = run(static_cast<std::size_t>(budget.amount), 0);
        row.wvp = static_cast<double>(row.est.work) * row.est.sd * row.est.sd;
        return row;
    }

    // Batched accumulation against a work or wall budget.
    std::size_t n = 0;
    double mean = 0.0, m2 = 0.0;
    std::uint64_t work = 0, work_max = 0, work_median = 0;
    double wall = 0.0;
    std::size_t batch = 1024;
    std::size_t offset = 0;
    const auto t0 = std::chrono::steady_clock::now();
    while (true) {
        EstimatorResult er = run(batch, offset);
        offset += batch;
        merge_stats(er.n, er.mean, er.sd, n, mean, m2);
        work += er.work;
        work_max = std::max(work_max, er.work_max);
        work_median = er.work_median;  // representative batch median
        wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double used = budget.kind == Budget::Kind::work_units
                                ? static_cast<double>(work)
                                : wall;
        if (used >= budget.amount) break;
        batch = std::min<std::size_t>(batch * 2, 1 << 20);
    }
    row.est.n = n;
    row.est.mean = mean;
    row.est.sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    row.est.ci_defined = n >= 2;
    row.est.ci_half =
        row.est.ci_defined ? 1.959963984540054 * row.est.sd / std::sqrt(static_cast<double>(n)) : 0.0;
    row.est.work = work;
    row.est.work_max = work_max;
    row.est.work_median = work_median;
    row.est.wall_s = wall;
    row.wvp = static_cast<double>(work) * row.est.sd * row.est.sd;
    return row;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkCase& bc, const std::vector<Method>& methods,
                              const BenchmarkConfig& config) {
    BenchmarkReport report;
    report.case_id = bc.id;
    for (Method m : methods) {
        MethodRow row;
        switch (m) {
            case Method::ea: {
                const EaProblem ea = make_ea(bc.problem, bc.x, bc.t);
                EaConfig ec;
                ec.threads = config.threads;
                ec.mode = config.ea_mode;
                row = run_to_budget(config.budget, [&](std::size_t n, std::size_t offset) {
                    return estimate_ea(ea, n, config.seed + offset, ec);
                });
                row.method = "ea";
                break;
            }
            case Method::debias: {
                DebiasConfig dc;
                dc.halting = config.halting;
                dc.threads = config.threads;
                row = run_to_budget(config.budget, [&](std::size_t n, std::size_t offset) {
                    return estimate_debiased(bc.problem, bc.x, bc.t, n, config.seed + offset, dc);
                });
                row.method = "debias";
                {
                    char p[32];
                    std::snprintf(p, sizeof(p), "%s:%g",
                                  config.halting.kind == HaltingDistribution::Kind::geometric
                                      ? "geom"
                                      : "power",
                                  config.halting.param);
                    row.param = p;
                }
                break;
            }
            case Method::euler: {
                row = run_to_budget(config.budget, [&](std::size_t n, std::size_t offset) {
                    return euler_estimate(bc.problem, bc.x, bc.t, config.euler_steps, n,
                                          config.seed + offset, config.threads);
                });
                row.method = "euler";
                row.param = std::to_string(config.euler_steps);
                break;
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string csv_header() { return "# fkpde-csv-v1\ncase,method,mean,ci_half,n,work,wall_s,wvp\n"; }

std::string csv_row(const std::string& case_id, const MethodRow& row) {
    std::string s;
    if (row.zero_samples) s += "# zero-sample row follows (empty budget)\n";
    std::string method = row.param.empty() ? row.method : row.method + "@" + row.param;
    std::string case_clean = case_id;
    // Label fields must not break the column structure.
    for (auto* field : {&case_clean, &method})
        for (auto& ch : *field)
            if (ch == ',' || ch == '\n') ch = ' ';
    s += case_clean + "," + method + ",";
    if (row.zero_samples) {
        s += ",,0,0,0,0";
    } else {
        s += fmt(row.est.mean) + "," + (row.est.ci_defined ? fmt(row.est.ci_half) : "") + "," +
             std::to_string(row.est.n) + "," + std::to_string(row.est.work) + "," +
             fmt(row.est.wall_s) + "," + fmt(row.wvp);
    }
    s += "\n";
    return s;
}

std::string report_csv(const BenchmarkReport& report) {
    std::string s = csv_header();
    for (const auto& row : report.rows) s += csv_row(report.case_id, row);
    return s;
}

std::string report_json(const BenchmarkReport& report) {
    nlohmann::json j;
    j["case"] = report.case_id;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r;
        r["method"] = row.method;
        r["param"] = row.param;
        r["zero_samples"] = row.zero_samples;
        r["mean"] = row.est.mean;
        r["ci_half"] = row.est.ci_half;
        r["ci_defined"] = row.est.ci_defined;
        r["n"] = row.est.n;
        r["work"] = row.est.work;
        r["work_max"] = row.est.work_max;
        r["work_median"] = row.est.work_median;
        r["wall_s"] = row.est.wall_s;
        r["wvp"] = row.wvp;
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

}  // namespace fkpde
