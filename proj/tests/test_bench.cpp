#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dcds/bench.hpp"

using namespace dcds;
using dcds::bench::BenchConfig;
using dcds::bench::BenchResult;
using dcds::bench::ZipfianGenerator;

TEST_CASE("zipfian rank probabilities follow the analytic mass") {
  const uint64_t n = 1000;
  const double theta = 0.4;
  ZipfianGenerator gen(n, theta, 1);
  double zeta = 0.0;
  for (uint64_t i = 1; i <= n; ++i) zeta += std::pow(double(i), -theta);
  double total = 0.0;
  for (uint64_t rank = 1; rank <= n; ++rank) {
    double expected = std::pow(double(rank), -theta) / zeta;
    CHECK(gen.rank_probability(rank) == doctest::Approx(expected).epsilon(1e-9));
    total += gen.rank_probability(rank);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  // Monotone decreasing by construction.
  CHECK(gen.rank_probability(1) > gen.rank_probability(2));
  CHECK(gen.rank_probability(2) > gen.rank_probability(1000));
}

TEST_CASE("zipfian draws are deterministic per seed and in range") {
  ZipfianGenerator a(1 << 16, 0.4, 42);
  ZipfianGenerator b(1 << 16, 0.4, 42);
  ZipfianGenerator c(1 << 16, 0.4, 43);
  bool all_equal = true;
  bool any_diff_c = false;
  for (int i = 0; i < 1000; ++i) {
    uint64_t va = a.next();
    uint64_t vb = b.next();
    uint64_t vc = c.next();
    CHECK(va < (uint64_t(1) << 16));
    if (va != vb) all_equal = false;
    if (va != vc) any_diff_c = true;
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("empirical zipfian frequencies converge to the analytic top ranks") {
  // At this sample size the per-rank standard error is ~1.5% of the
  // mass, so a 5% relative tolerance is a >3-sigma bound per rank.
  const uint64_t n = 1 << 20;
  const double theta = 0.4;
  const uint64_t draws = 30000000;
  ZipfianGenerator gen(n, theta, 42);
  std::vector<uint64_t> counts(10, 0);
  for (uint64_t i = 0; i < draws; ++i) {
    uint64_t v = gen.next();
    if (v < 10) ++counts[v];
  }
  for (uint64_t rank = 1; rank <= 10; ++rank) {
    double expected = gen.rank_probability(rank) * double(draws);
    double observed = double(counts[rank - 1]);
    CHECK(std::abs(observed - expected) / expected < 0.05);
  }
}

TEST_CASE("bench config validation") {
  BenchConfig cfg;
  cfg.validate();
  cfg.threads = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.threads = 1;
  cfg.theta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.theta = 0.4;
  cfg.read_ratio = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.read_ratio = 0.5;
  cfg.num_columns = 11;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("csv schema is stable") {
  CHECK(BenchResult::csv_header() ==
        "structure,threads,distribution,theta,read_ratio,ops,commits,aborts,"
        "seconds,throughput");
  BenchResult r;
  r.structure = "fifo";
  r.threads = 2;
  r.distribution = "uniform";
  r.theta = 0.4;
  r.read_ratio = 0.5;
  r.ops = 10;
  r.commits = 10;
  r.aborts = 1;
  r.seconds = 0.5;
  r.throughput = 20.0;
  std::string row = r.csv_row();
  CHECK(row.substr(0, 5) == "fifo,");
  CHECK(std::count(row.begin(), row.end(), ',') == 9);
}

TEST_CASE("small bench runs commit every operation") {
  for (const char* structure : {"fifo", "dll", "lru", "lru-coarse"}) {
    CAPTURE(structure);
    BenchConfig cfg;
    cfg.structure = structure;
    cfg.threads = 2;
    cfg.ops_per_thread = 500;
    cfg.capacity = 64;
    cfg.key_domain = 1 << 12;
    BenchResult r = dcds::bench::run_bench(cfg);
    CHECK(r.ops == 1000);
    CHECK(r.commits == 1000);  // retries hide aborts
    CHECK(r.throughput > 0.0);
  }
}

TEST_CASE("ycsb bench passes its torn-row sanity checks") {
  BenchConfig cfg;
  cfg.structure = "ycsb";
  cfg.threads = 2;
  cfg.ops_per_thread = 300;
  cfg.ycsb_records_per_worker = 64;
  BenchResult r = dcds::bench::run_bench(cfg);
  CHECK(r.commits == 600);
  CHECK(r.distribution == "uniform");
}

TEST_CASE("zipf distribution is recorded in the result") {
  BenchConfig cfg;
  cfg.structure = "lru";
  cfg.threads = 1;
  cfg.ops_per_thread = 200;
  cfg.capacity = 32;
  cfg.key_domain = 1 << 10;
  cfg.zipfian = true;
  BenchResult r = dcds::bench::run_bench(cfg);
  CHECK(r.distribution == "zipf");
  CHECK(r.theta == doctest::Approx(0.4));
}

TEST_CASE("unique namespaces never repeat") {
  std::string a = dcds::bench::unique_namespace("t");
  std::string b = dcds::bench::unique_namespace("t");
  CHECK(a != b);
  CHECK(a.rfind("t", 0) == 0);
}
