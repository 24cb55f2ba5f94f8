#include "dcds/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <random>
#include <set>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "dcds/analysis.hpp"
#include "dcds/catalog.hpp"
#include "dcds/cc_injector.hpp"
#include "dcds/optimizer.hpp"

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

namespace dcds::bench {

// ---------------------------------------------------------------------------
// Zipfian sampler
// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<const std::vector<double>> zipf_table(uint64_t n,
                                                      double theta) {
  if (n == 0 || theta <= 0.0 || theta >= 1.0) {
    raise(ErrorCode::UsageError, "zipfian needs n > 0 and theta in (0,1)");
  }
  static std::mutex mutex;
  static std::map<std::pair<uint64_t, uint64_t>,
                  std::shared_ptr<const std::vector<double>>> cache;
  uint64_t theta_bits;
  std::memcpy(&theta_bits, &theta, sizeof theta);
  std::lock_guard<std::mutex> guard(mutex);
  auto key = std::make_pair(n, theta_bits);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto table = std::make_shared<std::vector<double>>();
  table->resize(n);
  double sum = 0.0;
  for (uint64_t i = 0; i < n; ++i) {
    sum += std::pow(double(i + 1), -theta);
    (*table)[i] = sum;
  }
  for (uint64_t i = 0; i < n; ++i) (*table)[i] /= sum;
  cache.emplace(key, table);
  return table;
}

}  // namespace

ZipfianGenerator::ZipfianGenerator(uint64_t n, double theta, uint64_t seed)
    : cumulative_(zipf_table(n, theta)), rng_(seed) {}

uint64_t ZipfianGenerator::next() {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = dist(rng_);
  auto it = std::lower_bound(cumulative_->begin(), cumulative_->end(), u);
  if (it == cumulative_->end()) --it;
  return uint64_t(it - cumulative_->begin());
}

double ZipfianGenerator::rank_probability(uint64_t rank) const {
  if (rank == 0 || rank > cumulative_->size()) {
    raise(ErrorCode::UsageError, "rank is 1-based and bounded by the domain");
  }
  double hi = (*cumulative_)[rank - 1];
  double lo = rank == 1 ? 0.0 : (*cumulative_)[rank - 2];
  return hi - lo;
}

// ---------------------------------------------------------------------------
// Config / result plumbing
// ---------------------------------------------------------------------------

void BenchConfig::validate() const {
  if (threads < 1) raise(ErrorCode::UsageError, "threads must be >= 1");
  if (theta <= 0.0 || theta >= 1.0) {
    raise(ErrorCode::UsageError, "theta must be in (0,1)");
  }
  if (read_ratio < 0.0 || read_ratio > 1.0) {
    raise(ErrorCode::UsageError, "read-ratio must be in [0,1]");
  }
  if (num_columns < 1 || num_columns > 10) {
    raise(ErrorCode::UsageError, "columns must be in 1..=10");
  }
}

std::string BenchResult::csv_header() {
  return "structure,threads,distribution,theta,read_ratio,ops,commits,aborts,"
         "seconds,throughput";
}

std::string BenchResult::csv_row() const {
  std::ostringstream os;
  os << structure << "," << threads << "," << distribution << "," << theta
     << "," << read_ratio << "," << ops << "," << commits << "," << aborts
     << "," << seconds << "," << throughput;
  return os.str();
}

std::string unique_namespace(const std::string& prefix) {
  static std::atomic<uint64_t> counter{0};
  return prefix + "_run" + std::to_string(counter.fetch_add(1));
}

bool pin_current_thread(uint64_t worker_index) {
#ifdef __linux__
  unsigned cores = std::thread::hardware_concurrency();
  if (cores == 0) return false;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(int(worker_index % cores), &set);
  return pthread_setaffinity_np(pthread_self(), sizeof(set), &set) == 0;
#else
  (void)worker_index;
  return false;
#endif
}

std::unique_ptr<Instance> make_instance(const std::string& structure,
                                        const std::string& ns,
                                        int64_t capacity, int64_t num_columns,
                                        int64_t num_records) {
  catalog::Params params;
  params.lru_capacity = capacity;
  params.ycsb_columns = num_columns;
  params.ycsb_records = num_records;
  SpecPtr spec = catalog::build_structure(structure, params);

  bool coarse = structure.ends_with("-coarse");
  // dll is the unoptimized wrapper baseline; everything else runs the
  // optimized spec.
  if (structure != "dll") spec = optimize(spec).first;
  if (coarse) {
    return std::make_unique<Instance>(spec, ns, ExecMode::CoarseLocked);
  }
  SpecPtr injected = inject_cc(spec, analyze(spec));
  return std::make_unique<Instance>(injected, ns, ExecMode::Transactional);
}

namespace {

struct Timing {
  std::chrono::steady_clock::time_point start;
  void begin() { start = std::chrono::steady_clock::now(); }
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void warn_pinning_once(bool pinned) {
  static std::atomic<bool> warned{false};
  if (!pinned && !warned.exchange(true)) {
    std::cerr << "warning: thread pinning unavailable; running unpinned\n";
  }
}

BenchResult finish(const BenchConfig& cfg, Instance& inst, double seconds,
                   uint64_t total_ops) {
  BenchResult result;
  result.structure = cfg.structure;
  result.threads = cfg.threads;
  result.distribution = cfg.zipfian ? "zipf" : "uniform";
  result.theta = cfg.zipfian ? cfg.theta : 0.0;
  result.read_ratio = cfg.read_ratio;
  result.ops = total_ops;
  if (inst.mode() == ExecMode::Transactional) {
    result.commits = inst.txn_manager().stats().commits.load();
    result.aborts = inst.txn_manager().stats().aborts.load();
  } else {
    // Serial execution has no transactions; every op trivially commits.
    result.commits = total_ops;
    result.aborts = 0;
  }
  result.seconds = seconds;
  result.throughput = seconds > 0.0 ? double(total_ops) / seconds : 0.0;
  return result;
}

[[noreturn]] void sanity_failure(const std::string& what) {
  raise(ErrorCode::InvalidState, "post-run sanity check failed: " + what);
}

}  // namespace

// ---------------------------------------------------------------------------
// FIFO
// ---------------------------------------------------------------------------

BenchResult run_fifo_bench(const BenchConfig& cfg) {
  cfg.validate();
  if (cfg.structure != "fifo" && cfg.structure != "dll") {
    raise(ErrorCode::UsageError,
          "fifo bench takes structure fifo or dll, got '" + cfg.structure +
              "'");
  }
  std::string ns = cfg.ns.empty() ? unique_namespace(cfg.structure) : cfg.ns;
  auto inst = make_instance(cfg.structure, ns);

  std::vector<std::thread> workers;
  std::vector<std::vector<int64_t>> pushed(cfg.threads);
  std::vector<std::vector<int64_t>> popped(cfg.threads);
  Timing timing;
  timing.begin();
  for (uint64_t t = 0; t < cfg.threads; ++t) {
    workers.emplace_back([&, t] {
      warn_pinning_once(pin_current_thread(t));
      std::mt19937_64 rng(cfg.seed + t);
      std::uniform_int_distribution<int> coin(0, 1);
      for (uint64_t i = 0; i < cfg.ops_per_thread; ++i) {
        if (coin(rng) == 0) {
          int64_t value = int64_t(t * cfg.ops_per_thread + i) + 1;
          inst->invoke("push", {Value::i64(value)});
          pushed[t].push_back(value);
        } else {
          auto r = inst->invoke("pop", {Value::i64(0)});
          if (r.ret.b) popped[t].push_back(r.out_params.at("val").i);
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  double seconds = timing.seconds();
  BenchResult result =
      finish(cfg, *inst, seconds, cfg.threads * cfg.ops_per_thread);

  // Multiset conservation: drained leftovers + pops == pushes.
  std::multiset<int64_t> in, out;
  for (const auto& v : pushed) in.insert(v.begin(), v.end());
  for (const auto& v : popped) out.insert(v.begin(), v.end());
  for (;;) {
    auto r = inst->invoke("pop", {Value::i64(0)});
    if (!r.ret.b) break;
    out.insert(r.out_params.at("val").i);
  }
  if (in != out) sanity_failure("fifo multiset conservation");
  inst->destroy();
  return result;
}

// ---------------------------------------------------------------------------
// LRU
// ---------------------------------------------------------------------------

BenchResult run_lru_bench(const BenchConfig& cfg) {
  cfg.validate();
  if (cfg.structure != "lru" && cfg.structure != "lru-coarse") {
    raise(ErrorCode::UsageError,
          "lru bench takes structure lru or lru-coarse, got '" +
              cfg.structure + "'");
  }
  std::string ns = cfg.ns.empty() ? unique_namespace(cfg.structure) : cfg.ns;
  auto inst = make_instance(cfg.structure, ns, cfg.capacity);

  std::vector<std::thread> workers;
  Timing timing;
  timing.begin();
  for (uint64_t t = 0; t < cfg.threads; ++t) {
    workers.emplace_back([&, t] {
      warn_pinning_once(pin_current_thread(t));
      std::mt19937_64 rng(cfg.seed + t);
      std::uniform_int_distribution<uint64_t> uniform(0, cfg.key_domain - 1);
      ZipfianGenerator zipf(cfg.key_domain, cfg.zipfian ? cfg.theta : 0.5,
                            cfg.seed + t);
      for (uint64_t i = 0; i < cfg.ops_per_thread; ++i) {
        uint64_t key = cfg.zipfian ? zipf.next() : uniform(rng);
        inst->invoke("insert", {Value::i64(int64_t(key)),
                                Value::i64(int64_t(i))});
      }
    });
  }
  for (auto& w : workers) w.join();
  double seconds = timing.seconds();
  BenchResult result =
      finish(cfg, *inst, seconds, cfg.threads * cfg.ops_per_thread);

  uint64_t live = inst->table_for("LRU_NODE")->live_rows();
  if (live > uint64_t(cfg.capacity)) sanity_failure("lru size over capacity");
  inst->destroy();
  return result;
}

// ---------------------------------------------------------------------------
// YCSB
// ---------------------------------------------------------------------------

BenchResult run_ycsb_bench(const BenchConfig& cfg) {
  cfg.validate();
  if (cfg.structure != "ycsb" && cfg.structure != "ycsb-coarse") {
    raise(ErrorCode::UsageError,
          "ycsb bench takes structure ycsb or ycsb-coarse, got '" +
              cfg.structure + "'");
  }
  uint64_t per_worker =
      cfg.full_scale ? 1000000 : cfg.ycsb_records_per_worker;
  int64_t records = int64_t(per_worker * cfg.threads);
  std::string ns = cfg.ns.empty() ? unique_namespace(cfg.structure) : cfg.ns;
  auto inst =
      make_instance(cfg.structure, ns, cfg.capacity, cfg.num_columns, records);

  size_t k = size_t(cfg.num_columns);
  std::vector<std::thread> workers;
  std::atomic<uint64_t> torn{0};
  Timing timing;
  timing.begin();
  for (uint64_t t = 0; t < cfg.threads; ++t) {
    workers.emplace_back([&, t] {
      warn_pinning_once(pin_current_thread(t));
      std::mt19937_64 rng(cfg.seed + t);
      std::uniform_int_distribution<uint64_t> uniform(0, uint64_t(records) - 1);
      std::uniform_real_distribution<double> ratio(0.0, 1.0);
      ZipfianGenerator zipf(uint64_t(records), cfg.zipfian ? cfg.theta : 0.5,
                            cfg.seed + t);
      std::vector<Value> args(1 + k);
      for (uint64_t i = 0; i < cfg.ops_per_thread; ++i) {
        uint64_t rec = cfg.zipfian ? zipf.next() : uniform(rng);
        args[0] = Value::i64(int64_t(rec));
        if (ratio(rng) < cfg.read_ratio) {
          for (size_t j = 0; j < k; ++j) args[1 + j] = Value::i64(0);
          auto r = inst->invoke("read_record", args);
          // All columns of a record carry one writer's stamp.
          int64_t first = r.out_params.at("v0").i;
          for (size_t j = 1; j < k; ++j) {
            if (r.out_params.at("v" + std::to_string(j)).i != first) {
              torn.fetch_add(1);
            }
          }
        } else {
          int64_t stamp = int64_t(t * cfg.ops_per_thread + i) + 1;
          for (size_t j = 0; j < k; ++j) args[1 + j] = Value::i64(stamp);
          inst->invoke("update_record", args);
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  double seconds = timing.seconds();
  BenchResult result =
      finish(cfg, *inst, seconds, cfg.threads * cfg.ops_per_thread);

  if (torn.load() != 0) sanity_failure("ycsb torn read");
  // Final sweep: every record's columns must agree.
  std::vector<Value> args(1 + k);
  for (int64_t rec = 0; rec < records; ++rec) {
    args[0] = Value::i64(rec);
    for (size_t j = 0; j < k; ++j) args[1 + j] = Value::i64(0);
    auto r = inst->invoke("read_record", args);
    int64_t first = r.out_params.at("v0").i;
    for (size_t j = 1; j < k; ++j) {
      if (r.out_params.at("v" + std::to_string(j)).i != first) {
        sanity_failure("ycsb torn row after run");
      }
    }
  }
  inst->destroy();
  return result;
}

BenchResult run_bench(const BenchConfig& cfg) {
  if (cfg.structure == "fifo" || cfg.structure == "dll") {
    return run_fifo_bench(cfg);
  }
  if (cfg.structure == "lru" || cfg.structure == "lru-coarse") {
    return run_lru_bench(cfg);
  }
  if (cfg.structure == "ycsb" || cfg.structure == "ycsb-coarse") {
    return run_ycsb_bench(cfg);
  }
  raise(ErrorCode::UsageError, "unknown structure '" + cfg.structure + "'");
}

}  // namespace dcds::bench
