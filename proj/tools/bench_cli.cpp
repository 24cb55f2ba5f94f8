#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dcds/analysis.hpp"
#include "dcds/bench.hpp"
#include "dcds/catalog.hpp"
#include "dcds/cc_injector.hpp"
#include "dcds/optimizer.hpp"

namespace {

int do_dump_ir(const std::string& structure, const std::string& stage) {
  using namespace dcds;
  SpecPtr spec = catalog::build_structure(structure);
  if (stage == "pre-opt") {
    std::cout << dump_spec(*spec);
    return 0;
  }
  if (stage == "analysis") {
    std::cout << dump_rw_table(spec, analyze(spec));
    return 0;
  }
  auto [optimized, reports] = optimize(spec);
  if (stage == "post-opt") {
    for (const auto& r : reports) {
      if (r.changed()) std::cout << r.to_string() << "\n";
    }
    std::cout << dump_spec(*optimized);
    return 0;
  }
  if (stage == "post-cc") {
    std::cout << dump_spec(*inject_cc(optimized, analyze(optimized)));
    return 0;
  }
  raise(ErrorCode::UsageError, "unknown stage '" + stage + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Declarative concurrent data structure benchmarks"};
  app.require_subcommand(1);

  dcds::bench::BenchConfig cfg;
  std::string dist = "uniform";
  std::string csv_path;
  bool csv_requested = false;

  CLI::App* run = app.add_subcommand("run", "Run one benchmark");
  run->add_option("--structure", cfg.structure,
                  "fifo|dll|lru|lru-coarse|ycsb|ycsb-coarse");
  run->add_option("--threads", cfg.threads, "worker threads");
  run->add_option("--ops", cfg.ops_per_thread, "operations per thread");
  run->add_option("--dist", dist, "uniform|zipf");
  run->add_option("--theta", cfg.theta, "zipfian skew, in (0,1)");
  run->add_option("--read-ratio", cfg.read_ratio, "ycsb read fraction");
  run->add_option("--columns", cfg.num_columns, "ycsb columns, 1..=10");
  run->add_option("--capacity", cfg.capacity, "lru capacity");
  run->add_option("--domain", cfg.key_domain, "lru key domain");
  run->add_option("--records", cfg.ycsb_records_per_worker,
                  "ycsb records per worker");
  run->add_flag("--full-scale", cfg.full_scale,
                "1M ycsb records per worker");
  run->add_option("--seed", cfg.seed, "rng seed");
  CLI::Option* csv_opt =
      run->add_option("--csv", csv_path,
                      "emit CSV (to a file when a path is given)")
          ->expected(0, 1);

  std::string structure = "fifo";
  std::string stage = "post-opt";
  CLI::App* dump = app.add_subcommand("dump-ir", "Print IR of a stage");
  dump->add_option("--structure", structure,
                   "fifo|dll|lru|lru-coarse|ycsb|ycsb-coarse");
  dump->add_option("--stage", stage, "pre-opt|post-opt|analysis|post-cc");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (dump->parsed()) return do_dump_ir(structure, stage);

    csv_requested = csv_opt->count() > 0;
    if (dist == "zipf") {
      cfg.zipfian = true;
    } else if (dist != "uniform") {
      dcds::raise(dcds::ErrorCode::UsageError,
                  "unknown distribution '" + dist + "'");
    }
    dcds::bench::BenchResult result = dcds::bench::run_bench(cfg);
    std::cout << "structure=" << result.structure
              << " threads=" << result.threads << " ops=" << result.ops
              << " commits=" << result.commits << " aborts=" << result.aborts
              << " seconds=" << result.seconds
              << " throughput=" << result.throughput << " ops/s\n";
    if (csv_requested) {
      if (csv_path.empty()) {
        std::cout << dcds::bench::BenchResult::csv_header() << "\n"
                  << result.csv_row() << "\n";
      } else {
        std::ofstream out(csv_path, std::ios::app);
        if (out.tellp() == 0) {
          out << dcds::bench::BenchResult::csv_header() << "\n";
        }
        out << result.csv_row() << "\n";
      }
    }
    return 0;
  } catch (const dcds::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == dcds::ErrorCode::UsageError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
