#include <doctest.h>

#include <atomic>
#include <chrono>
#include <deque>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include "dcds/analysis.hpp"
#include "dcds/catalog.hpp"
#include "dcds/cc_injector.hpp"
#include "dcds/executor.hpp"
#include "dcds/optimizer.hpp"

using namespace dcds;

namespace {

std::string fresh_ns(const std::string& tag) {
  static std::atomic<uint64_t> counter{0};
  return "ex_test_" + tag + "_" + std::to_string(counter.fetch_add(1));
}

SpecPtr fifo_injected() {
  SpecPtr serial = optimize(catalog::fifo_mycds()).first;
  return inject_cc(serial, analyze(serial));
}

}  // namespace

TEST_CASE("fifo push/pop semantics through a transactional instance") {
  Instance inst(fifo_injected(), fresh_ns("fifo"));
  inst.invoke("push", {Value::i64(42)});
  inst.invoke("push", {Value::i64(7)});

  InvokeResult r = inst.invoke("pop", {Value::i64(0)});
  CHECK(r.ret == Value::boolean(true));
  CHECK(r.out_params.at("val") == Value::i64(42));
  r = inst.invoke("pop", {Value::i64(0)});
  CHECK(r.ret == Value::boolean(true));
  CHECK(r.out_params.at("val") == Value::i64(7));

  // Popping an empty queue returns false and leaves the out-param
  // untouched by the body's happy path.
  r = inst.invoke("pop", {Value::i64(0)});
  CHECK(r.ret == Value::boolean(false));
  inst.destroy();
}

TEST_CASE("transactional mode requires an injected spec") {
  SpecPtr serial = optimize(catalog::fifo_mycds()).first;
  CHECK_THROWS_AS(Instance(serial, fresh_ns("serialcc")), Error);
  // Serial mode accepts the serial spec.
  Instance inst(serial, fresh_ns("serial"), ExecMode::Serial);
  inst.invoke("push", {Value::i64(1)});
  CHECK(inst.invoke("pop", {Value::i64(0)}).ret == Value::boolean(true));
  inst.destroy();
}

TEST_CASE("unknown methods and bad arguments are rejected") {
  Instance inst(fifo_injected(), fresh_ns("args"));
  try {
    inst.invoke("enqueue", {Value::i64(1)});
    FAIL("expected UnknownMethod");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownMethod);
  }
  try {
    inst.invoke("push", {});
    FAIL("expected ArityOrTypeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ArityOrTypeMismatch);
  }
  try {
    inst.invoke("push", {Value::boolean(true)});
    FAIL("expected ArityOrTypeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ArityOrTypeMismatch);
  }
  inst.destroy();
}

TEST_CASE("injected conflicts retry transparently with exact effects") {
  std::string ns = fresh_ns("inject");
  Instance inst(fifo_injected(), ns);
  TxnManager& mgr = inst.txn_manager();
  mgr.inject_conflict_probability = 0.3;
  mgr.verify_rollback = true;

  std::deque<int64_t> oracle;
  std::mt19937_64 rng(99);
  uint64_t retried = 0;
  for (int i = 0; i < 2000; ++i) {
    if (rng() % 2 == 0) {
      int64_t v = int64_t(i) + 1;
      InvokeResult r = inst.invoke("push", {Value::i64(v)});
      oracle.push_back(v);
      retried += r.attempts - 1;
    } else {
      InvokeResult r = inst.invoke("pop", {Value::i64(0)});
      retried += r.attempts - 1;
      if (oracle.empty()) {
        CHECK(r.ret == Value::boolean(false));
      } else {
        CHECK(r.ret == Value::boolean(true));
        CHECK(r.out_params.at("val") == Value::i64(oracle.front()));
        oracle.pop_front();
      }
    }
  }
  mgr.inject_conflict_probability = 0.0;
  CHECK(retried > 0);  // injection really fired
  CHECK(mgr.stats().rollback_mismatches.load() == 0);
  CHECK(mgr.stats().verified_rollbacks.load() > 0);
  // Drain and confirm nothing was lost or duplicated.
  while (!oracle.empty()) {
    InvokeResult r = inst.invoke("pop", {Value::i64(0)});
    REQUIRE(r.ret == Value::boolean(true));
    CHECK(r.out_params.at("val") == Value::i64(oracle.front()));
    oracle.pop_front();
  }
  CHECK(inst.invoke("pop", {Value::i64(0)}).ret == Value::boolean(false));
  inst.destroy();
}

TEST_CASE("destroy returns every reachable node to the free list") {
  std::string ns = fresh_ns("destroy");
  Instance inst(fifo_injected(), ns);
  for (int i = 0; i < 100; ++i) inst.invoke("push", {Value::i64(i)});
  Table* nodes = inst.table_for("Node");
  REQUIRE(nodes != nullptr);
  CHECK(nodes->live_rows() == 100);
  inst.destroy();
  CHECK(nodes->live_rows() == 0);
  CHECK(nodes->free_list_size() == 100);
  try {
    inst.invoke("push", {Value::i64(1)});
    FAIL("expected InvalidState");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidState);
  }
  CHECK_THROWS_AS(inst.destroy(), Error);
}

TEST_CASE("two instances of one spec share tables but not rows") {
  std::string ns = fresh_ns("twins");
  SpecPtr cc = fifo_injected();
  Instance a(cc, ns);
  Instance b(cc, ns);
  CHECK(a.table_for("MyCDS") == b.table_for("MyCDS"));
  CHECK(a.root().raw != b.root().raw);
  a.invoke("push", {Value::i64(10)});
  b.invoke("push", {Value::i64(20)});
  CHECK(a.invoke("pop", {Value::i64(0)}).out_params.at("val") ==
        Value::i64(10));
  CHECK(b.invoke("pop", {Value::i64(0)}).out_params.at("val") ==
        Value::i64(20));
  a.destroy();
  b.destroy();
}

TEST_CASE("concurrent pushes and pops conserve the value multiset") {
  std::string ns = fresh_ns("mt");
  Instance inst(fifo_injected(), ns);
  constexpr int kThreads = 4;
  constexpr int kOps = 1000;
  std::vector<std::thread> workers;
  std::vector<std::vector<int64_t>> popped(kThreads);
  std::vector<std::vector<int64_t>> pushed(kThreads);
  for (int t = 0; t < kThreads; ++t) {
    workers.emplace_back([&, t] {
      std::mt19937_64 rng(1000 + t);
      for (int i = 0; i < kOps; ++i) {
        if (rng() % 2 == 0) {
          int64_t v = int64_t(t) * kOps + i + 1;
          inst.invoke("push", {Value::i64(v)});
          pushed[t].push_back(v);
        } else {
          InvokeResult r = inst.invoke("pop", {Value::i64(0)});
          if (r.ret.b) popped[t].push_back(r.out_params.at("val").i);
        }
      }
    });
  }
  for (auto& w : workers) w.join();

  std::multiset<int64_t> seen;
  for (const auto& v : popped) seen.insert(v.begin(), v.end());
  while (true) {
    InvokeResult r = inst.invoke("pop", {Value::i64(0)});
    if (!r.ret.b) break;
    seen.insert(r.out_params.at("val").i);
  }
  std::multiset<int64_t> expected;
  for (const auto& v : pushed) expected.insert(v.begin(), v.end());
  CHECK(seen == expected);  // nothing lost, nothing duplicated
  inst.destroy();
}

TEST_CASE("retry backoff stays within its cap") {
  auto start = std::chrono::steady_clock::now();
  for (uint64_t attempt = 1; attempt <= 30; ++attempt) {
    retry_backoff(attempt, 7);
  }
  auto elapsed = std::chrono::steady_clock::now() - start;
  // 30 capped 1ms waits plus scheduling noise.
  CHECK(elapsed < std::chrono::milliseconds(500));
}
