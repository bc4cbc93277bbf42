// Report emission: trace CSVs, the metrics.json document and SVG charts.

#pragma once

#include "srld/bench/experiment.hpp"
#include "srld/trace.hpp"

#include <string>

namespace srld::bench {

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

std::string trace_csv_path(const std::string& out_dir,
                           const std::string& method, std::uint64_t seed);

// Header `iter,x0,...,x{d-1},phase`; one row per kept state (stride
// keep_every over all states, burn-in included).  Byte-deterministic.
void write_trace_csv(const Trace& trace, const std::string& path,
                     Eigen::Index keep_every = 1);

struct TraceCsv {
  Eigen::MatrixXd states;          // rows in file order
  std::vector<long long> iters;    // empty when the file had no iter column
  std::vector<std::string> phases; // empty when the file had no phase column
};

// Reads a trace CSV or a bare sample-matrix CSV (header x0,...,x{d-1}).
TraceCsv read_trace_csv(const std::string& path);

void write_reference_csv(const Eigen::MatrixXd& samples,
                         const std::string& path);

// metrics.json document per the harness schema:
// { target, methods[], seeds[], per_seed, aggregate }.
json metrics_to_json(const ComparisonResult& result);
ComparisonResult metrics_from_json(const json& j);

// Writes metrics.json and plots/{mmd2,w1,ess_mean,autocorr}.svg.  Trace CSVs
// are streamed by run_experiment while chains are in memory.
void emit_reports(const ComparisonResult& result, const std::string& out_dir);

}  // namespace srld::bench
