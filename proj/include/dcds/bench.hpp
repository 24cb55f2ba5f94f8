#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dcds/executor.hpp"
#include "dcds/ir.hpp"

namespace dcds::bench {

/// Skewed rank sampler over [0, n): p(rank i, 1-based) = i^-theta / zeta_n.
/// Sampling inverts the precomputed cumulative zeta table, so drawn
/// frequencies follow the analytic mass exactly (no power-law
/// approximation error); tables are cached per (n, theta).
class ZipfianGenerator {
 public:
  ZipfianGenerator(uint64_t n, double theta, uint64_t seed);

  /// 0-based rank; rank 0 is the most frequent.
  uint64_t next();

  /// Analytic probability of the 1-based rank.
  double rank_probability(uint64_t rank) const;

 private:
  std::shared_ptr<const std::vector<double>> cumulative_;
  std::mt19937_64 rng_;
};

struct BenchConfig {
  std::string structure = "fifo";   // fifo|dll|lru|lru-coarse|ycsb|ycsb-coarse
  uint64_t threads = 1;
  uint64_t ops_per_thread = 100000;
  bool zipfian = false;
  double theta = 0.4;
  uint64_t key_domain = uint64_t(1) << 20;
  int64_t capacity = 1024;
  double read_ratio = 0.5;
  int64_t num_columns = 10;
  uint64_t ycsb_records_per_worker = 100000;  // desk scale
  bool full_scale = false;                    // 1M records per worker
  uint64_t seed = 42;
  std::string ns;  // unique namespace generated when empty

  void validate() const;  // raises UsageError
};

struct BenchResult {
  std::string structure;
  uint64_t threads = 0;
  std::string distribution;  // uniform|zipf
  double theta = 0.0;
  double read_ratio = 0.0;
  uint64_t ops = 0;
  uint64_t commits = 0;
  uint64_t aborts = 0;
  double seconds = 0.0;
  double throughput = 0.0;  // ops per second

  static std::string csv_header();
  std::string csv_row() const;
};

/// 50/50 push/pop closed loop; asserts multiset conservation of pushed
/// values afterwards. structure: fifo (optimized) or dll (unoptimized
/// wrapper baseline).
BenchResult run_fifo_bench(const BenchConfig& cfg);

/// Insert-only workload over a skewed or uniform key domain; asserts
/// size <= capacity afterwards. structure: lru or lru-coarse.
BenchResult run_lru_bench(const BenchConfig& cfg);

/// Read/update mix over one record per op, touching all columns;
/// asserts no torn rows. structure: ycsb or ycsb-coarse.
BenchResult run_ycsb_bench(const BenchConfig& cfg);

/// Dispatch on cfg.structure.
BenchResult run_bench(const BenchConfig& cfg);

/// Instantiates a named structure ready to run: optimizes + injects for
/// transactional variants, coarse-locked serial for *-coarse ones.
/// dll skips the optimizer (unoptimized baseline).
std::unique_ptr<Instance> make_instance(const std::string& structure,
                                        const std::string& ns,
                                        int64_t capacity = 1024,
                                        int64_t num_columns = 10,
                                        int64_t num_records = 100000);

/// Best-effort pinning of the calling thread to a core; returns false
/// when the platform refuses.
bool pin_current_thread(uint64_t worker_index);

/// Fresh process-unique namespace for an isolated bench run.
std::string unique_namespace(const std::string& prefix);

}  // namespace dcds::bench
