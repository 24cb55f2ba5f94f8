#include "dcds/catalog.hpp"

#include "dcds/builder.hpp"

namespace dcds::catalog {

namespace {

Expression var(const std::string& name) { return Expression::var_ref(name); }
Expression c_i64(int64_t v) {
  return Expression::constant_of(Value::i64(v));
}
Expression c_false() {
  return Expression::constant_of(Value::boolean(false));
}
Expression is_null(const std::string& name) {
  return Expression::is_null_ptr(var(name));
}
Expression not_of(Expression e) {
  // The expression language has no negation; compare against false.
  return Expression::eq(std::move(e), c_false());
}

/// Node type with get/set accessor pairs for every attribute. Field
/// access from the list bodies goes exclusively through these, which is
/// what lets pass 1 prune the accessors the wrapper never reaches.
SpecPtr make_node(const std::string& spec_name,
                  const std::vector<std::string>& i64_attrs) {
  SpecBuilder b(spec_name);
  for (const auto& a : i64_attrs) {
    b.add_attribute(
        AttributeDecl::primitive(a, ValueType::i64(), Value::i64(0)));
  }
  b.add_attribute(AttributeDecl::composed_pointer("next", spec_name));
  b.add_attribute(AttributeDecl::composed_pointer("prev", spec_name));

  std::set<std::string> exposed;
  auto accessors = [&](const std::string& attr, ValueType type) {
    auto& get = b.create_function("get_" + attr, type);
    get.add_temporary("t", type);
    get.read(attr, "t");
    get.ret("t");
    auto& set =
        b.create_function("set_" + attr, ValueType::void_t(), {{"v", type}});
    set.update(attr, "v");
    set.ret();
    exposed.insert("get_" + attr);
    exposed.insert("set_" + attr);
  };
  for (const auto& a : i64_attrs) accessors(a, ValueType::i64());
  accessors("next", ValueType::record_ptr(spec_name));
  accessors("prev", ValueType::record_ptr(spec_name));
  return b.build(std::move(exposed));
}

}  // namespace

SpecPtr doubly_linked_list() {
  SpecPtr node = make_node("Node", {"value"});
  SpecBuilder b("LL");
  b.register_composed(node);
  b.add_attribute(AttributeDecl::composed_pointer("head", "Node"));
  b.add_attribute(AttributeDecl::composed_pointer("tail", "Node"));
  ValueType ptr = ValueType::record_ptr("Node");

  {
    auto& f = b.create_function("push_back", ValueType::void_t(),
                                {{"val", ValueType::i64()}});
    f.add_temporary("t_node", ptr);
    f.add_temporary("t_tail", ptr);
    f.create("Node", "t_node");
    f.method_call("t_node", "set_value", {"val"});
    f.read("tail", "t_tail");
    auto [then_b, else_b] = f.conditional(is_null("t_tail"));
    f.update("head", "t_node", then_b);
    f.method_call("t_node", "set_prev", {"t_tail"}, "", else_b);
    f.method_call("t_tail", "set_next", {"t_node"}, "", else_b);
    f.update("tail", "t_node");
    f.ret();
  }
  {
    auto& f = b.create_function(
        "pop_front", ValueType::boolean(),
        {{"val", ValueType::i64(), /*by_pointer=*/true}});
    f.add_temporary("t_head", ptr);
    f.add_temporary("t_tail", ptr);
    f.add_temporary("t_next", ptr);
    f.add_temporary("t_null", ptr);
    f.add_temporary("t_val", ValueType::i64());
    f.add_temporary("r", ValueType::boolean());
    f.read("head", "t_head");
    auto [empty_b, rest_b] = f.conditional(is_null("t_head"));
    f.assign("r", c_false(), empty_b);
    f.ret("r", empty_b);
    f.method_call("t_head", "get_value", {}, "t_val");
    f.assign("val", var("t_val"));
    f.read("tail", "t_tail");
    auto [one_b, many_b] =
        f.conditional(Expression::eq(var("t_head"), var("t_tail")));
    f.update("head", "t_null", one_b);
    f.update("tail", "t_null", one_b);
    f.method_call("t_head", "get_next", {}, "t_next", many_b);
    f.method_call("t_next", "set_prev", {"t_null"}, "", many_b);
    f.update("head", "t_next", many_b);
    f.del("t_head");
    f.assign("r", Expression::constant_of(Value::boolean(true)));
    f.ret("r");
    (void)rest_b;
  }
  {
    auto& f = b.create_function("push_front", ValueType::void_t(),
                                {{"val", ValueType::i64()}});
    f.add_temporary("t_node", ptr);
    f.add_temporary("t_head", ptr);
    f.create("Node", "t_node");
    f.method_call("t_node", "set_value", {"val"});
    f.read("head", "t_head");
    auto [then_b, else_b] = f.conditional(is_null("t_head"));
    f.update("tail", "t_node", then_b);
    f.method_call("t_node", "set_next", {"t_head"}, "", else_b);
    f.method_call("t_head", "set_prev", {"t_node"}, "", else_b);
    f.update("head", "t_node");
    f.ret();
  }
  {
    auto& f = b.create_function(
        "pop_back", ValueType::boolean(),
        {{"val", ValueType::i64(), /*by_pointer=*/true}});
    f.add_temporary("t_tail", ptr);
    f.add_temporary("t_head", ptr);
    f.add_temporary("t_last", ptr);
    f.add_temporary("t_null", ptr);
    f.add_temporary("t_val", ValueType::i64());
    f.add_temporary("r", ValueType::boolean());
    f.read("tail", "t_tail");
    auto [empty_b, rest_b] = f.conditional(is_null("t_tail"));
    f.assign("r", c_false(), empty_b);
    f.ret("r", empty_b);
    f.method_call("t_tail", "get_value", {}, "t_val");
    f.assign("val", var("t_val"));
    f.read("head", "t_head");
    auto [one_b, many_b] =
        f.conditional(Expression::eq(var("t_tail"), var("t_head")));
    f.update("head", "t_null", one_b);
    f.update("tail", "t_null", one_b);
    f.method_call("t_tail", "get_prev", {}, "t_last", many_b);
    f.method_call("t_last", "set_next", {"t_null"}, "", many_b);
    f.update("tail", "t_last", many_b);
    f.del("t_tail");
    f.assign("r", Expression::constant_of(Value::boolean(true)));
    f.ret("r");
    (void)rest_b;
  }
  {
    auto& f = b.create_function("empty", ValueType::boolean());
    f.add_temporary("t_head", ptr);
    f.add_temporary("r", ValueType::boolean());
    f.read("head", "t_head");
    f.assign("r", is_null("t_head"));
    f.ret("r");
  }
  return b.build({"push_back", "pop_front", "push_front", "pop_back", "empty"});
}

SpecPtr fifo_mycds() {
  SpecPtr list = doubly_linked_list();
  SpecBuilder b("MyCDS");
  b.register_composed(list);
  b.add_attribute(AttributeDecl::composed_embedded("list", "LL"));
  {
    auto& f = b.create_function("push", ValueType::void_t(),
                                {{"val", ValueType::i64()}});
    f.method_call("list", "push_back", {"val"});
    f.ret();
  }
  {
    auto& f = b.create_function(
        "pop", ValueType::boolean(),
        {{"val", ValueType::i64(), /*by_pointer=*/true}});
    f.add_temporary("r", ValueType::boolean());
    f.method_call("list", "pop_front", {"val"}, "r");
    f.ret("r");
  }
  return b.build({"push", "pop"});
}

namespace {

/// Shared between insert and find: detach `node` (known non-null,
/// already in the list) and splice it in at the head. Emitted inline
/// because method calls cannot target the enclosing spec.
void emit_move_to_head(FunctionBuilder& f, const std::string& node,
                       const BlockHandle& block) {
  f.read("head", "t_h", block);
  f.assign("b_front", Expression::eq(var("t_h"), var(node)), block);
  auto [move_b, stay_b] = f.conditional(not_of(var("b_front")), block);
  (void)stay_b;
  f.method_call(node, "get_prev", {}, "t_p", move_b);
  f.method_call(node, "get_next", {}, "t_nx", move_b);
  f.method_call("t_p", "set_next", {"t_nx"}, "", move_b);
  auto [was_tail_b, mid_b] = f.conditional(is_null("t_nx"), move_b);
  f.update("tail", "t_p", was_tail_b);
  f.method_call("t_nx", "set_prev", {"t_p"}, "", mid_b);
  f.method_call(node, "set_prev", {"t_null"}, "", move_b);
  f.method_call(node, "set_next", {"t_h"}, "", move_b);
  f.method_call("t_h", "set_prev", {node}, "", move_b);
  f.update("head", node, move_b);
}

}  // namespace

SpecPtr lru(int64_t capacity) {
  if (capacity <= 0) {
    raise(ErrorCode::UsageError, "LRU capacity must be positive");
  }
  SpecPtr node = make_node("LRU_NODE", {"key", "value"});
  SpecBuilder b("LRU");
  b.register_composed(node);
  ValueType ptr = ValueType::record_ptr("LRU_NODE");
  b.add_attribute(AttributeDecl::composed_pointer("head", "LRU_NODE"));
  b.add_attribute(AttributeDecl::composed_pointer("tail", "LRU_NODE"));
  b.add_attribute(
      AttributeDecl::primitive("size", ValueType::i64(), Value::i64(0)));
  // Read-only; pass 3 folds it into its uses.
  b.add_attribute(AttributeDecl::primitive("capacity", ValueType::i64(),
                                           Value::i64(capacity)));
  b.add_attribute(
      AttributeDecl::key_indexed_map("map", ValueType::i64(), ptr));

  {
    auto& f = b.create_function(
        "insert", ValueType::boolean(),
        {{"key", ValueType::i64()}, {"value", ValueType::i64()}});
    for (const auto& t :
         {"t_found", "t_null", "t_h", "t_p", "t_nx", "t_tl", "t_tp",
          "t_node", "t_h2"}) {
      f.add_temporary(t, ptr);
    }
    f.add_temporary("b_front", ValueType::boolean());
    f.add_temporary("t_sz", ValueType::i64());
    f.add_temporary("t_cap", ValueType::i64());
    f.add_temporary("t_ek", ValueType::i64());
    f.add_temporary("r", ValueType::boolean());

    f.map_read("map", var("key"), "t_found");
    auto [hit_b, miss_b] = f.conditional(not_of(is_null("t_found")));
    (void)miss_b;
    emit_move_to_head(f, "t_found", hit_b);
    f.assign("r", c_false(), hit_b);
    f.ret("r", hit_b);

    // Key absent: evict from the tail when full, then insert at head.
    f.read("size", "t_sz");
    f.read("capacity", "t_cap");
    auto [full_b, room_b] =
        f.conditional(Expression::eq(var("t_sz"), var("t_cap")));
    (void)room_b;
    f.read("tail", "t_tl", full_b);
    f.method_call("t_tl", "get_key", {}, "t_ek", full_b);
    f.map_erase("map", var("t_ek"), full_b);
    f.method_call("t_tl", "get_prev", {}, "t_tp", full_b);
    f.update("tail", "t_tp", full_b);
    auto [emptied_b, still_b] = f.conditional(is_null("t_tp"), full_b);
    f.update("head", "t_null", emptied_b);
    f.method_call("t_tp", "set_next", {"t_null"}, "", still_b);
    f.del("t_tl", full_b);
    f.assign("t_sz", Expression::subtract(var("t_sz"), c_i64(1)), full_b);

    f.create("LRU_NODE", "t_node");
    f.method_call("t_node", "set_key", {"key"});
    f.method_call("t_node", "set_value", {"value"});
    f.read("head", "t_h2");
    auto [first_b, link_b] = f.conditional(is_null("t_h2"));
    f.update("tail", "t_node", first_b);
    f.method_call("t_node", "set_next", {"t_h2"}, "", link_b);
    f.method_call("t_h2", "set_prev", {"t_node"}, "", link_b);
    f.update("head", "t_node");
    f.map_insert("map", var("key"), "t_node");
    f.assign("t_sz", Expression::add(var("t_sz"), c_i64(1)));
    f.update("size", "t_sz");
    f.assign("r", Expression::constant_of(Value::boolean(true)));
    f.ret("r");
  }
  {
    auto& f = b.create_function(
        "find", ValueType::boolean(),
        {{"key", ValueType::i64()},
         {"kout", ValueType::i64(), /*by_pointer=*/true}});
    for (const auto& t : {"t_found", "t_null", "t_h", "t_p", "t_nx"}) {
      f.add_temporary(t, ptr);
    }
    f.add_temporary("b_front", ValueType::boolean());
    f.add_temporary("t_k", ValueType::i64());
    f.add_temporary("r", ValueType::boolean());

    f.map_read("map", var("key"), "t_found");
    auto [absent_b, present_b] = f.conditional(is_null("t_found"));
    (void)present_b;
    f.assign("r", c_false(), absent_b);
    f.ret("r", absent_b);
    // A hit refreshes recency, so find is deliberately non-const.
    emit_move_to_head(f, "t_found", {});
    f.method_call("t_found", "get_key", {}, "t_k");
    f.assign("kout", var("t_k"));
    f.assign("r", Expression::constant_of(Value::boolean(true)));
    f.ret("r");
  }
  return b.build({"insert", "find"});
}

SpecPtr ycsb(int64_t num_columns, int64_t num_records) {
  if (num_columns < 1 || num_columns > 10) {
    raise(ErrorCode::UsageError, "num_columns must be in 1..=10");
  }
  if (num_records <= 0) {
    raise(ErrorCode::UsageError, "num_records must be positive");
  }
  auto col_name = [](int64_t j) { return "v" + std::to_string(j); };

  SpecBuilder item("YCSB_ITEM");
  item.add_attribute(
      AttributeDecl::fixed_array("fields", ValueType::i64(),
                                 uint64_t(num_columns)));
  {
    std::vector<Param> params;
    for (int64_t j = 0; j < num_columns; ++j) {
      params.push_back({col_name(j), ValueType::i64(), /*by_pointer=*/true});
    }
    auto& f =
        item.create_function("read_all", ValueType::void_t(), params);
    for (int64_t j = 0; j < num_columns; ++j) {
      std::string t = "t" + std::to_string(j);
      f.add_temporary(t, ValueType::i64());
      f.array_read("fields", c_i64(j), t);
      f.assign(col_name(j), var(t));
    }
    f.ret();
  }
  {
    std::vector<Param> params;
    for (int64_t j = 0; j < num_columns; ++j) {
      params.push_back({col_name(j), ValueType::i64()});
    }
    auto& f =
        item.create_function("write_all", ValueType::void_t(), params);
    for (int64_t j = 0; j < num_columns; ++j) {
      f.array_update("fields", c_i64(j), col_name(j));
    }
    f.ret();
  }
  SpecPtr item_spec = item.build({"read_all", "write_all"});

  SpecBuilder b("YCSB");
  b.register_composed(item_spec);
  b.add_attribute(AttributeDecl::fixed_array(
      "records", ValueType::record_ptr("YCSB_ITEM"), uint64_t(num_records)));
  {
    std::vector<Param> params{{"idx", ValueType::i64()}};
    for (int64_t j = 0; j < num_columns; ++j) {
      params.push_back({col_name(j), ValueType::i64(), /*by_pointer=*/true});
    }
    auto& f = b.create_function("read_record", ValueType::void_t(), params);
    f.add_temporary("t_rec", ValueType::record_ptr("YCSB_ITEM"));
    f.array_read("records", var("idx"), "t_rec");
    std::vector<std::string> args;
    for (int64_t j = 0; j < num_columns; ++j) args.push_back(col_name(j));
    f.method_call("t_rec", "read_all", args);
    f.ret();
  }
  {
    std::vector<Param> params{{"idx", ValueType::i64()}};
    for (int64_t j = 0; j < num_columns; ++j) {
      params.push_back({col_name(j), ValueType::i64()});
    }
    auto& f = b.create_function("update_record", ValueType::void_t(), params);
    f.add_temporary("t_rec", ValueType::record_ptr("YCSB_ITEM"));
    f.array_read("records", var("idx"), "t_rec");
    std::vector<std::string> args;
    for (int64_t j = 0; j < num_columns; ++j) args.push_back(col_name(j));
    f.method_call("t_rec", "write_all", args);
    f.ret();
  }
  return b.build({"read_record", "update_record"});
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {"dll", [] { return doubly_linked_list(); }},
      {"fifo", [] { return fifo_mycds(); }},
      {"lru", [] { return lru(1024); }},
      {"ycsb", [] { return ycsb(10, 1000); }},
  };
  return list;
}

SpecPtr build_structure(const std::string& name, const Params& params) {
  if (name == "dll" || name == "fifo") return fifo_mycds();
  if (name == "lru" || name == "lru-coarse") return lru(params.lru_capacity);
  if (name == "ycsb" || name == "ycsb-coarse") {
    return ycsb(params.ycsb_columns, params.ycsb_records);
  }
  raise(ErrorCode::UsageError, "unknown structure '" + name + "'");
}

}  // namespace dcds::catalog
