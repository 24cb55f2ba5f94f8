#include <doctest.h>

#include <functional>

#include "dcds/builder.hpp"

using namespace dcds;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::UsageError;
}

// Minimal node spec: one i64 attribute with get/set accessors.
SpecPtr make_node() {
  SpecBuilder b("Node");
  b.add_attribute(AttributeDecl::primitive("value", ValueType::i64(),
                                           Value::i64(0)));
  auto& get = b.create_function("get_value", ValueType::i64());
  get.add_temporary("t", ValueType::i64());
  get.read("value", "t");
  get.ret("t");
  auto& set = b.create_function(
      "set_value", ValueType::void_t(),
      {Param{"v", ValueType::i64(), false}});
  set.update("value", "v");
  set.ret();
  return b.build({});
}

}  // namespace

TEST_CASE("builder rejects invalid spec names") {
  CHECK(code_of([] { SpecBuilder b(""); }) == ErrorCode::InvalidIdentifier);
  CHECK(code_of([] { SpecBuilder b("9x"); }) == ErrorCode::InvalidIdentifier);
}

TEST_CASE("duplicate attribute names are rejected") {
  SpecBuilder b("S");
  b.add_attribute(AttributeDecl::primitive("head", ValueType::i64(),
                                           Value::i64(0)));
  CHECK(code_of([&] {
    b.add_attribute(AttributeDecl::primitive("head", ValueType::i64(),
                                             Value::i64(0)));
  }) == ErrorCode::DuplicateAttribute);
}

TEST_CASE("default value must match the attribute type") {
  SpecBuilder b("S");
  CHECK(code_of([&] {
    b.add_attribute(AttributeDecl::primitive("x", ValueType::i64(),
                                             Value::boolean(true)));
  }) == ErrorCode::TypeError);
}

TEST_CASE("pointer attributes require a registered spec or self") {
  SpecBuilder b("LL");
  CHECK(code_of([&] {
    b.add_attribute(AttributeDecl::composed_pointer("head", "Node"));
  }) == ErrorCode::UnknownSymbol);
  b.register_composed(make_node());
  b.add_attribute(AttributeDecl::composed_pointer("head", "Node"));

  // Self-pointers need no registration (linked-list nodes).
  SpecBuilder n("Tree");
  n.add_attribute(AttributeDecl::composed_pointer("left", "Tree"));
}

TEST_CASE("embedding cycles are rejected, pointers are fine") {
  SpecPtr node = make_node();
  SpecBuilder outer("Node");  // same name as the inner spec
  CHECK(code_of([&] { outer.register_composed(node); }) ==
        ErrorCode::CyclicEmbedding);
}

TEST_CASE("statement type checking") {
  SpecBuilder b("S");
  b.add_attribute(AttributeDecl::primitive("x", ValueType::i64(),
                                           Value::i64(0)));
  auto& f = b.create_function("f", ValueType::i64());
  f.add_temporary("t", ValueType::boolean());
  CHECK(code_of([&] { f.read("x", "t"); }) == ErrorCode::TypeError);
  CHECK(code_of([&] { f.read("y", "t"); }) == ErrorCode::UnknownSymbol);
  CHECK(code_of([&] { f.read("x", "missing"); }) == ErrorCode::UnknownSymbol);
  CHECK(code_of([&] { f.ret(); }) == ErrorCode::TypeError);  // returns i64
}

TEST_CASE("duplicate temporaries and void temporaries are rejected") {
  SpecBuilder b("S");
  auto& f = b.create_function("f", ValueType::void_t());
  f.add_temporary("t", ValueType::i64());
  CHECK(code_of([&] { f.add_temporary("t", ValueType::i64()); }) ==
        ErrorCode::DuplicateVariable);
  CHECK(code_of([&] { f.add_temporary("u", ValueType::void_t()); }) ==
        ErrorCode::TypeError);
}

TEST_CASE("build validates returns on every path") {
  SpecBuilder b("S");
  auto& f = b.create_function("f", ValueType::void_t());
  f.add_temporary("c", ValueType::boolean());
  f.assign("c", Expression::constant_of(Value::boolean(true)));
  auto [then_b, else_b] = f.conditional(Expression::var_ref("c"));
  f.ret(then_b);  // else branch and tail both fall through
  CHECK(code_of([&] { b.build({"f"}); }) == ErrorCode::MissingReturn);
}

TEST_CASE("a return after the conditional satisfies both branches") {
  SpecBuilder b("S");
  auto& f = b.create_function("f", ValueType::void_t());
  f.add_temporary("c", ValueType::boolean());
  f.assign("c", Expression::constant_of(Value::boolean(false)));
  auto [then_b, else_b] = f.conditional(Expression::var_ref("c"));
  f.assign("c", Expression::constant_of(Value::boolean(true)), then_b);
  f.ret();
  SpecPtr s = b.build({"f"});
  CHECK(s->functions.size() == 1);
  CHECK_FALSE(s->cc_injected);
}

TEST_CASE("empty then branches are rejected at build") {
  SpecBuilder b("S");
  auto& f = b.create_function("f", ValueType::void_t());
  f.add_temporary("c", ValueType::boolean());
  f.assign("c", Expression::constant_of(Value::boolean(true)));
  auto [then_b, else_b] = f.conditional(Expression::var_ref("c"));
  f.ret(else_b);
  f.ret();
  CHECK(code_of([&] { b.build({}); }) == ErrorCode::EmptyThenBranch);
}

TEST_CASE("exposing an unknown function is rejected") {
  SpecBuilder b("S");
  auto& f = b.create_function("f", ValueType::void_t());
  f.ret();
  CHECK(code_of([&] { b.build({"nonexistent"}); }) ==
        ErrorCode::UnknownExposedFunction);
}

TEST_CASE("method calls type-check against the callee") {
  SpecBuilder b("LL");
  b.register_composed(make_node());
  b.add_attribute(AttributeDecl::composed_pointer("head", "Node"));
  auto& f = b.create_function("f", ValueType::void_t());
  f.add_temporary("n", ValueType::record_ptr("Node"));
  f.add_temporary("flag", ValueType::boolean());
  f.read("head", "n");
  CHECK(code_of([&] { f.method_call("n", "no_such_fn", {}); }) ==
        ErrorCode::UnknownSymbol);
  CHECK(code_of([&] { f.method_call("n", "set_value", {}); }) ==
        ErrorCode::TypeError);  // arity
  CHECK(code_of([&] { f.method_call("n", "set_value", {"flag"}); }) ==
        ErrorCode::TypeError);  // argument type
  CHECK(code_of([&] { f.method_call("flag", "set_value", {}); }) ==
        ErrorCode::TypeError);  // target is not a record ref
  f.add_temporary("v", ValueType::i64());
  f.assign("v", Expression::constant_of(Value::i64(1)));
  f.method_call("n", "set_value", {"v"});
  f.ret();
  CHECK(b.build({"f"}) != nullptr);
}

TEST_CASE("building the same declarations twice is deterministic") {
  auto build_once = [] {
    SpecBuilder b("LL");
    b.register_composed(make_node());
    b.add_attribute(AttributeDecl::composed_pointer("head", "Node"));
    auto& f = b.create_function("peek", ValueType::boolean());
    f.add_temporary("n", ValueType::record_ptr("Node"));
    f.add_temporary("r", ValueType::boolean());
    f.read("head", "n");
    f.assign("r", Expression::is_null_ptr(Expression::var_ref("n")));
    f.ret("r");
    return b.build({"peek"});
  };
  SpecPtr a = build_once();
  SpecPtr b = build_once();
  CHECK(equal(*a, *b));
  CHECK(dump_spec(*a) == dump_spec(*b));
}

TEST_CASE("builder can only build once") {
  SpecBuilder b("S");
  auto& f = b.create_function("f", ValueType::void_t());
  f.ret();
  b.build({});
  CHECK(code_of([&] { b.build({}); }) == ErrorCode::InvalidState);
}
