#include <doctest.h>

#include <set>

#include "dcds/analysis.hpp"
#include "dcds/builder.hpp"
#include "dcds/catalog.hpp"
#include "dcds/optimizer.hpp"

using namespace dcds;

namespace {

std::set<std::string> attr_names(const DataStructureSpec& s) {
  std::set<std::string> out;
  for (const auto& a : s.attributes) out.insert(a.name);
  return out;
}

std::set<std::string> fn_names(const DataStructureSpec& s) {
  std::set<std::string> out;
  for (const auto& [name, _] : s.functions) out.insert(name);
  return out;
}

bool body_writes_attr(const std::vector<Statement>& body,
                      const std::string& attr) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::Update && s.attr == attr) return true;
    if (s.kind == StmtKind::Conditional &&
        (body_writes_attr(s.then_body, attr) ||
         body_writes_attr(s.else_body, attr))) {
      return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("fifo usage specializes the doubly linked list to a singly one") {
  auto [opt, reports] = optimize(catalog::fifo_mycds());

  const DataStructureSpec& ll = *opt->composed.at("LL");
  const DataStructureSpec& node = *ll.composed.at("Node");

  CHECK(attr_names(node) == std::set<std::string>{"value", "next"});
  CHECK(fn_names(ll) == std::set<std::string>{"push_back", "pop_front"});
  std::set<std::string> node_fns = fn_names(node);
  CHECK(node_fns.count("get_prev") == 0);
  CHECK(node_fns.count("set_prev") == 0);

  // No surviving body writes prev anywhere.
  for (const auto& [_, fn] : ll.functions) {
    CHECK_FALSE(body_writes_attr(fn.body, "prev"));
  }
  CHECK(dump_spec(*opt).find("prev") == std::string::npos);
}

TEST_CASE("unused composed functions cascade through the call graph") {
  SpecPtr fifo = catalog::fifo_mycds();
  RWSetTable rw = compute_rw_sets(fifo);
  PassReport report;
  SpecPtr pruned = prune_unused_functions(fifo, rw, &report);
  std::set<std::string> removed(report.removed_functions.begin(),
                                report.removed_functions.end());
  CHECK(removed.count("LL.push_front"));
  CHECK(removed.count("LL.pop_back"));
  CHECK(removed.count("LL.empty"));
  // Node.get_prev was reachable only from the removed LL.pop_back.
  CHECK(removed.count("Node.get_prev"));
  // Exposed top-level functions are never pruned.
  CHECK(fn_names(*pruned) == fn_names(*fifo));
}

TEST_CASE("pass 1 on a spec without composed types is the identity") {
  SpecBuilder b("S");
  b.add_attribute(AttributeDecl::primitive("x", ValueType::i64(),
                                           Value::i64(0)));
  auto& f = b.create_function("f", ValueType::i64());
  f.add_temporary("t", ValueType::i64());
  f.read("x", "t");
  f.ret("t");
  SpecPtr s = b.build({"f"});
  PassReport report;
  SpecPtr out = prune_unused_functions(s, compute_rw_sets(s), &report);
  CHECK(equal(*out, *s));
  CHECK(report.removed_functions.empty());
}

TEST_CASE("unreferenced attributes are removed") {
  SpecBuilder b("S");
  b.add_attribute(AttributeDecl::primitive("x", ValueType::i64(),
                                           Value::i64(0)));
  b.add_attribute(AttributeDecl::primitive("debug_counter", ValueType::i64(),
                                           Value::i64(0)));
  auto& f = b.create_function("f", ValueType::i64());
  f.add_temporary("t", ValueType::i64());
  f.read("x", "t");
  f.update("x", "t");
  f.ret("t");
  SpecPtr s = b.build({"f"});
  PassReport report;
  SpecPtr out = remove_unused_attributes(s, compute_rw_sets(s), &report);
  CHECK(attr_names(*out) == std::set<std::string>{"x"});
  CHECK(report.removed_attributes ==
        std::vector<std::string>{"S.debug_counter"});
}

TEST_CASE("read-only primitive attributes fold to constants") {
  SpecPtr spec = catalog::lru(1024);
  auto [opt, reports] = optimize(spec);
  CHECK(attr_names(*opt).count("capacity") == 0);
  bool folded = false;
  for (const auto& r : reports) {
    for (const auto& [name, value] : r.folded_attributes) {
      if (name == "LRU.capacity") {
        folded = true;
        CHECK(value == Value::i64(1024));
      }
    }
  }
  CHECK(folded);
  // The folded constant keeps the parameterization.
  auto [opt2, reports2] = optimize(catalog::lru(2));
  bool folded2 = false;
  for (const auto& r : reports2) {
    for (const auto& [name, value] : r.folded_attributes) {
      if (name == "LRU.capacity") {
        folded2 = true;
        CHECK(value == Value::i64(2));
      }
    }
  }
  CHECK(folded2);
}

TEST_CASE("read-only pointer attributes are not folded") {
  SpecBuilder node("Node");
  node.add_attribute(AttributeDecl::primitive("value", ValueType::i64(),
                                              Value::i64(0)));
  auto& g = node.create_function("get_value", ValueType::i64());
  g.add_temporary("t", ValueType::i64());
  g.read("value", "t");
  g.ret("t");
  SpecPtr n = node.build({});

  SpecBuilder b("S");
  b.register_composed(n);
  b.add_attribute(AttributeDecl::composed_pointer("p", "Node"));
  auto& f = b.create_function("f", ValueType::record_ptr("Node"));
  f.add_temporary("t", ValueType::record_ptr("Node"));
  f.read("p", "t");
  f.ret("t");
  SpecPtr s = b.build({"f"});
  PassReport report;
  SpecPtr out = fold_readonly_attributes(s, compute_rw_sets(s), &report);
  CHECK(attr_names(*out).count("p") == 1);
  // Node.value (also read-only here) may fold; the pointer must not.
  for (const auto& [name, value] : report.folded_attributes) {
    CHECK(name != "S.p");
  }
}

TEST_CASE("write-only attributes vanish with their updates") {
  SpecBuilder b("S");
  b.add_attribute(AttributeDecl::primitive("x", ValueType::i64(),
                                           Value::i64(0)));
  b.add_attribute(AttributeDecl::primitive("stats", ValueType::i64(),
                                           Value::i64(0)));
  auto& f = b.create_function("f", ValueType::i64(),
                              {Param{"v", ValueType::i64(), false}});
  f.add_temporary("t", ValueType::i64());
  f.read("x", "t");
  f.update("x", "v");
  f.update("stats", "v");
  f.ret("t");
  SpecPtr s = b.build({"f"});
  PassReport report;
  SpecPtr out = remove_writeonly_attributes(s, compute_rw_sets(s), &report);
  CHECK(attr_names(*out) == std::set<std::string>{"x"});
  CHECK_FALSE(body_writes_attr(out->functions.at("f").body, "stats"));
  // x is read in one place and written in another; untouched.
  CHECK(body_writes_attr(out->functions.at("f").body, "x"));
}

TEST_CASE("emptied then branches are repaired with a Nop") {
  SpecBuilder b("S");
  b.add_attribute(AttributeDecl::primitive("w", ValueType::i64(),
                                           Value::i64(0)));
  auto& f = b.create_function("f", ValueType::void_t(),
                              {Param{"c", ValueType::boolean(), false},
                               Param{"v", ValueType::i64(), false}});
  auto [then_b, else_b] = f.conditional(Expression::var_ref("c"));
  f.update("w", "v", then_b);
  f.ret();
  SpecPtr s = b.build({"f"});
  PassReport report;
  SpecPtr out = remove_writeonly_attributes(s, compute_rw_sets(s), &report);
  const Statement& cond = out->functions.at("f").body[0];
  REQUIRE(cond.kind == StmtKind::Conditional);
  REQUIRE(cond.then_body.size() == 1);
  CHECK(cond.then_body[0].kind == StmtKind::Nop);
}

TEST_CASE("optimize reaches a fixed point on a 3-attribute toy spec") {
  // c is write-only (from a read of b); b is read-only; a is live.
  SpecBuilder b("Toy");
  b.add_attribute(AttributeDecl::primitive("a", ValueType::i64(),
                                           Value::i64(0)));
  b.add_attribute(AttributeDecl::primitive("b", ValueType::i64(),
                                           Value::i64(5)));
  b.add_attribute(AttributeDecl::primitive("c", ValueType::i64(),
                                           Value::i64(0)));
  auto& f = b.create_function("f", ValueType::i64(),
                              {Param{"v", ValueType::i64(), false}});
  f.add_temporary("t", ValueType::i64());
  f.add_temporary("u", ValueType::i64());
  f.read("a", "t");
  f.update("a", "v");
  f.read("b", "u");
  f.update("c", "u");
  f.ret("t");
  SpecPtr s = b.build({"f"});

  auto [opt, reports] = optimize(s);
  CHECK(attr_names(*opt) == std::set<std::string>{"a"});
  // Hand-enumerated rounds: round 1 folds b (read-only) and removes c
  // (write-only); round 2 changes nothing.
  int last_round = 0;
  for (const auto& r : reports) last_round = r.iteration;
  CHECK(last_round == 2);
  // The read of b is now a constant assignment.
  const FunctionDecl& fn = opt->functions.at("f");
  bool has_const_assign = false;
  for (const auto& st : fn.body) {
    if (st.kind == StmtKind::Assign && st.dst == "u" &&
        st.expr.kind == Expression::Kind::Constant &&
        st.expr.constant == Value::i64(5)) {
      has_const_assign = true;
    }
  }
  CHECK(has_const_assign);
}

TEST_CASE("optimize is idempotent") {
  for (const auto& entry : catalog::entries()) {
    SpecPtr once = optimize(entry.build()).first;
    SpecPtr twice = optimize(once).first;
    CAPTURE(entry.name);
    CHECK(equal(*twice, *once));
  }
}

TEST_CASE("an already-minimal spec converges in one changeless round") {
  SpecBuilder b("S");
  b.add_attribute(AttributeDecl::primitive("x", ValueType::i64(),
                                           Value::i64(0)));
  auto& f = b.create_function("f", ValueType::i64(),
                              {Param{"v", ValueType::i64(), false}});
  f.add_temporary("t", ValueType::i64());
  f.read("x", "t");
  f.update("x", "v");
  f.ret("t");
  SpecPtr s = b.build({"f"});
  auto [opt, reports] = optimize(s);
  CHECK(equal(*opt, *s));
  CHECK(reports.size() == 4);  // one round of the four passes
  for (const auto& r : reports) {
    CHECK(r.removed_functions.empty());
    CHECK(r.removed_attributes.empty());
    CHECK(r.folded_attributes.empty());
  }
}

TEST_CASE("optimizer refuses cc-injected specs") {
  auto s = clone_spec(*catalog::doubly_linked_list());
  s->cc_injected = true;
  SpecPtr frozen = s;
  CHECK_THROWS_AS(optimize(frozen), Error);
}
