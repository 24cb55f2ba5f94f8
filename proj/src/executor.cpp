#include "dcds/executor.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <thread>

namespace dcds {

namespace {

std::string key_string(const Value& v) {
  switch (v.type.tag) {
    case TypeTag::I8:
    case TypeTag::I16:
    case TypeTag::I32:
    case TypeTag::I64:
      return std::to_string(v.i);
    case TypeTag::Bool:
      return v.b ? "1" : "0";
    case TypeTag::FixedString:
      return v.s;
    case TypeTag::RecordPtr:
      return std::to_string(v.ref.raw);
    default:
      raise(ErrorCode::TypeError, "unusable map key type " +
                                      v.type.to_string());
  }
}

bool value_eq(const Value& a, const Value& b) {
  if (a.type.is_integer() && b.type.is_integer()) return a.i == b.i;
  switch (a.type.tag) {
    case TypeTag::F64: return a.f == b.f;
    case TypeTag::Bool: return a.b == b.b;
    case TypeTag::FixedString: return a.s == b.s;
    case TypeTag::RecordPtr: return a.ref == b.ref;
    default: return false;
  }
}

}  // namespace

void retry_backoff(uint64_t attempt, uint64_t seed) {
  using namespace std::chrono;
  // Base 1us doubled per attempt, capped at 1ms, with uniform jitter.
  uint64_t shift = attempt < 10 ? attempt : 10;
  uint64_t max_us = std::min<uint64_t>(uint64_t(1) << shift, 1000);
  thread_local std::mt19937_64 rng(std::random_device{}());
  rng.seed(rng() ^ seed ^ attempt);
  std::uniform_int_distribution<uint64_t> dist(1, max_us);
  auto until = steady_clock::now() + microseconds(dist(rng));
  // sleep_for granularity is far coarser than the cap, so spin/yield.
  while (steady_clock::now() < until) std::this_thread::yield();
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Instance::Instance(SpecPtr spec, std::string ns, ExecMode mode)
    : spec_(std::move(spec)), ns_(std::move(ns)), mode_(mode),
      manager_(&get_or_create_txn_manager(ns_)) {
  if (mode_ == ExecMode::Transactional && !spec_->cc_injected) {
    raise(ErrorCode::NotInjected,
          "transactional execution needs a cc-injected spec");
  }
  for (const SpecPtr& s : all_specs(spec_)) {
    Layout layout;
    layout.spec = s;
    TableSchema schema;
    for (const AttributeDecl& attr : s->attributes) {
      Binding binding;
      binding.attr = &attr;
      binding.column = schema.columns.size();
      switch (attr.kind) {
        case AttrKind::Primitive:
          schema.add(attr.name, attr.type);
          break;
        case AttrKind::ComposedEmbedded:
        case AttrKind::ComposedPointer:
          schema.add(attr.name, ValueType::record_ptr(attr.spec_name));
          break;
        case AttrKind::FixedArray:
          if (attr.type.is_record_ptr()) {
            // One base pointer to a contiguous block of element rows.
            schema.add(attr.name, attr.type);
          } else {
            for (uint64_t i = 0; i < attr.length; ++i) {
              schema.add(attr.name + "#" + std::to_string(i), attr.type);
            }
          }
          break;
        case AttrKind::KeyIndexedMap:
          if (!attr.value_type.is_record_ptr()) {
            raise(ErrorCode::TypeError,
                  "map attribute '" + attr.name + "' must map to records");
          }
          schema.add(attr.name, ValueType::i64());
          break;
      }
      layout.bindings.emplace(attr.name, binding);
    }
    layout.table =
        TableRegistry::instance().get_or_create(ns_, s->name, schema);
    layouts_.emplace(s->name, std::move(layout));
  }
  // Binding::attr points into the stored SpecPtrs, which layouts_ keeps
  // alive through layout.spec.
  root_ = materialize(layout_of(spec_->name), nullptr);
}

Instance::~Instance() = default;

const Instance::Layout& Instance::layout_of(const std::string& name) const {
  auto it = layouts_.find(name);
  if (it == layouts_.end()) {
    raise(ErrorCode::UnknownSymbol, "no layout for spec '" + name + "'");
  }
  return it->second;
}

Table* Instance::table_for(const std::string& spec_name) const {
  return layout_of(spec_name).table;
}

RecordRef Instance::materialize(const Layout& layout, TransactionContext* txn) {
  RecordRef ref = insert_record(*layout.table, {}, txn);
  for (const AttributeDecl& attr : layout.spec->attributes) {
    const Binding& binding = layout.bindings.at(attr.name);
    switch (attr.kind) {
      case AttrKind::Primitive:
        if (attr.default_value.type.tag != TypeTag::Void) {
          write_field(ref, binding.column, attr.default_value, txn, false);
        }
        break;
      case AttrKind::ComposedEmbedded: {
        RecordRef inner = materialize(layout_of(attr.spec_name), txn);
        write_field(ref, binding.column,
                    Value::record(attr.spec_name, inner), txn, false);
        break;
      }
      case AttrKind::ComposedPointer:
        break;  // null
      case AttrKind::FixedArray: {
        if (!attr.type.is_record_ptr()) break;  // zero-filled elements
        if (txn != nullptr) {
          raise(ErrorCode::InvalidState,
                "record arrays are allocated at construction time only");
        }
        const Layout& elem = layout_of(attr.type.record_spec);
        for (const AttributeDecl& ea : elem.spec->attributes) {
          if (ea.kind != AttrKind::Primitive &&
              !(ea.kind == AttrKind::FixedArray && !ea.type.is_record_ptr())) {
            raise(ErrorCode::InvalidState,
                  "array element spec '" + elem.spec->name +
                      "' must hold primitive state only");
          }
        }
        RecordRef base = elem.table->allocate_block(attr.length);
        for (uint64_t i = 0; i < attr.length; ++i) {
          RecordRef er = RecordRef::make(base.table_id(), base.offset() + i);
          for (const AttributeDecl& ea : elem.spec->attributes) {
            if (ea.kind == AttrKind::Primitive &&
                ea.default_value.type.tag != TypeTag::Void) {
              write_field(er, elem.bindings.at(ea.name).column,
                          ea.default_value, nullptr, false);
            }
          }
        }
        write_field(ref, binding.column,
                    Value::record(attr.type.record_spec, base), txn, false);
        break;
      }
      case AttrKind::KeyIndexedMap: {
        KeyIndex* index = TableRegistry::instance().create_key_index();
        {
          std::lock_guard<std::mutex> guard(indexes_mutex_);
          owned_indexes_.push_back(index);
        }
        write_field(ref, binding.column, Value::i64(int64_t(index->id())),
                    txn, false);
        break;
      }
    }
  }
  return ref;
}

// ---------------------------------------------------------------------------
// Interpretation
// ---------------------------------------------------------------------------

Value Instance::eval(const Expression& expr, const Frame& frame) const {
  switch (expr.kind) {
    case Expression::Kind::Constant:
      return expr.constant;
    case Expression::Kind::VarRef: {
      auto it = frame.vars.find(expr.var);
      if (it == frame.vars.end()) {
        raise(ErrorCode::UnknownSymbol, "variable '" + expr.var + "'");
      }
      return it->second;
    }
    case Expression::Kind::Add:
    case Expression::Kind::Subtract: {
      Value a = eval(*expr.lhs, frame);
      Value b = eval(*expr.rhs, frame);
      bool add = expr.kind == Expression::Kind::Add;
      if (a.type.tag == TypeTag::F64) {
        return Value::f64(add ? a.f + b.f : a.f - b.f);
      }
      return Value::of_int(a.type, add ? a.i + b.i : a.i - b.i);
    }
    case Expression::Kind::Eq:
      return Value::boolean(
          value_eq(eval(*expr.lhs, frame), eval(*expr.rhs, frame)));
    case Expression::Kind::IsNullPtr:
      return Value::boolean(eval(*expr.lhs, frame).ref.is_null());
  }
  raise(ErrorCode::InvalidState, "unreachable expression kind");
}

RecordRef Instance::resolve_target(const Layout& layout,
                                   const std::string& target, RecordRef self,
                                   const Frame& frame,
                                   TransactionContext* txn) const {
  if (target == kSelfTarget) return self;
  auto it = frame.vars.find(target);
  if (it != frame.vars.end()) {
    if (!it->second.type.is_record_ptr()) {
      raise(ErrorCode::TypeError, "'" + target + "' is not a record pointer");
    }
    return it->second.ref;
  }
  const AttributeDecl* attr = layout.spec->find_attribute(target);
  if (attr != nullptr && attr->kind == AttrKind::ComposedEmbedded) {
    return read_field(self, layout.bindings.at(target).column, txn, false).ref;
  }
  raise(ErrorCode::UnknownSymbol, "target '" + target + "'");
}

std::optional<Value> Instance::run_body(const Layout& layout,
                                        const FunctionDecl& fn,
                                        const std::vector<Statement>& body,
                                        RecordRef self, Frame& frame,
                                        TransactionContext* txn) {
  for (const Statement& s : body) {
    switch (s.kind) {
      case StmtKind::Read: {
        const Binding& b = layout.bindings.at(s.attr);
        switch (b.attr->kind) {
          case AttrKind::Primitive:
            frame.vars[s.dst] = read_field(self, b.column, txn);
            break;
          case AttrKind::ComposedEmbedded:
            // Embedded references never change after construction.
            frame.vars[s.dst] = read_field(self, b.column, txn, false);
            break;
          case AttrKind::ComposedPointer:
            frame.vars[s.dst] = read_field(self, b.column, txn);
            break;
          default:
            raise(ErrorCode::TypeError,
                  "attribute '" + s.attr + "' is not scalar-readable");
        }
        break;
      }
      case StmtKind::Update: {
        const Binding& b = layout.bindings.at(s.attr);
        if (b.attr->kind != AttrKind::Primitive &&
            b.attr->kind != AttrKind::ComposedPointer) {
          raise(ErrorCode::TypeError,
                "attribute '" + s.attr + "' is not scalar-writable");
        }
        write_field(self, b.column, frame.vars.at(s.src), txn);
        break;
      }
      case StmtKind::ArrayRead: {
        const Binding& b = layout.bindings.at(s.attr);
        int64_t idx = eval(s.expr, frame).i;
        if (idx < 0 || uint64_t(idx) >= b.attr->length) {
          raise(ErrorCode::IndexOutOfBounds,
                "index " + std::to_string(idx) + " in array '" + s.attr + "'");
        }
        if (b.attr->type.is_record_ptr()) {
          RecordRef base = read_field(self, b.column, txn, false).ref;
          RecordRef elem = array_element_ref(base, idx, b.attr->length);
          frame.vars[s.dst] =
              Value::record(b.attr->type.record_spec, elem);
        } else {
          frame.vars[s.dst] = read_field(self, b.column + size_t(idx), txn);
        }
        break;
      }
      case StmtKind::ArrayUpdate: {
        const Binding& b = layout.bindings.at(s.attr);
        if (b.attr->type.is_record_ptr()) {
          raise(ErrorCode::TypeError,
                "record array '" + s.attr + "' elements are not assignable");
        }
        int64_t idx = eval(s.expr, frame).i;
        if (idx < 0 || uint64_t(idx) >= b.attr->length) {
          raise(ErrorCode::IndexOutOfBounds,
                "index " + std::to_string(idx) + " in array '" + s.attr + "'");
        }
        write_field(self, b.column + size_t(idx), frame.vars.at(s.src), txn);
        break;
      }
      case StmtKind::MapRead:
      case StmtKind::MapContains:
      case StmtKind::MapUpdate:
      case StmtKind::MapInsert:
      case StmtKind::MapErase: {
        const Binding& b = layout.bindings.at(s.attr);
        int64_t index_id = read_field(self, b.column, txn, false).i;
        KeyIndex* index =
            TableRegistry::instance().key_index_by_id(uint64_t(index_id));
        if (index == nullptr) {
          raise(ErrorCode::InvalidState,
                "map attribute '" + s.attr + "' has no index");
        }
        std::string key = key_string(eval(s.expr, frame));
        if (s.kind == StmtKind::MapRead) {
          auto found = index_lookup(*index, key);
          frame.vars[s.dst] = Value::record(
              b.attr->value_type.record_spec,
              found ? *found : RecordRef::null());
        } else if (s.kind == StmtKind::MapContains) {
          frame.vars[s.dst] =
              Value::boolean(index_lookup(*index, key).has_value());
        } else if (s.kind == StmtKind::MapInsert) {
          index_insert(*index, key, frame.vars.at(s.src).ref, txn);
        } else if (s.kind == StmtKind::MapUpdate) {
          if (index_erase(*index, key, txn)) {
            index_insert(*index, key, frame.vars.at(s.src).ref, txn);
          }
        } else {
          index_erase(*index, key, txn);
        }
        break;
      }
      case StmtKind::Conditional: {
        bool cond = eval(s.expr, frame).b;
        auto ret = run_body(layout, fn, cond ? s.then_body : s.else_body,
                            self, frame, txn);
        if (ret) return ret;
        break;
      }
      case StmtKind::Create: {
        const Layout& inner = layout_of(s.type_name);
        frame.vars[s.dst] =
            Value::record(s.type_name, materialize(inner, txn));
        break;
      }
      case StmtKind::Delete: {
        Value v = frame.vars.at(s.src);
        const Layout& inner = layout_of(v.type.record_spec);
        // Embedded children go with their owner.
        std::function<void(const Layout&, RecordRef)> drop =
            [&](const Layout& l, RecordRef r) {
              for (const AttributeDecl& attr : l.spec->attributes) {
                if (attr.kind != AttrKind::ComposedEmbedded) continue;
                RecordRef child =
                    read_field(r, l.bindings.at(attr.name).column, txn, false)
                        .ref;
                if (!child.is_null()) drop(layout_of(attr.spec_name), child);
              }
              delete_record(r, txn);
            };
        drop(inner, v.ref);
        break;
      }
      case StmtKind::MethodCall: {
        RecordRef target = resolve_target(layout, s.target, self, frame, txn);
        if (target.is_null()) {
          raise(ErrorCode::InvalidRef,
                "method call through null pointer '" + s.target + "'");
        }
        std::string callee_spec = method_call_target_spec(*layout.spec, fn, s);
        const Layout& inner = layout_of(callee_spec);
        const FunctionDecl* callee = inner.spec->find_function(s.fn);
        if (callee == nullptr) {
          raise(ErrorCode::UnknownMethod,
                callee_spec + " has no function '" + s.fn + "'");
        }
        Frame sub;
        for (size_t i = 0; i < callee->params.size(); ++i) {
          sub.vars[callee->params[i].name] = frame.vars.at(s.args[i]);
        }
        for (const auto& [tname, ttype] : callee->temporaries) {
          sub.vars[tname] = Value::zero_of(ttype);
        }
        Value result = run_function(inner, *callee, target, sub, txn);
        // Composed calls run in the caller's transaction, so out
        // parameters propagate to the caller right away.
        for (size_t i = 0; i < callee->params.size(); ++i) {
          if (callee->params[i].by_pointer) {
            frame.vars[s.args[i]] = sub.vars.at(callee->params[i].name);
          }
        }
        if (s.has_value) frame.vars[s.dst] = std::move(result);
        break;
      }
      case StmtKind::Return:
        if (s.has_value) return frame.vars.at(s.src);
        return Value::void_v();
      case StmtKind::Assign:
        frame.vars[s.dst] = eval(s.expr, frame);
        break;
      case StmtKind::Nop:
        break;
      case StmtKind::AcquireShared:
      case StmtKind::AcquireExclusive:
      case StmtKind::Upgrade: {
        if (txn == nullptr) break;
        RecordRef target = resolve_target(layout, s.target, self, frame, txn);
        LockMode mode = s.kind == StmtKind::AcquireShared ? LockMode::Shared
                                                          : LockMode::Exclusive;
        if (manager_->try_lock(*txn, target, mode) ==
            TryLockResult::Conflict) {
          throw ConflictException{};
        }
        break;
      }
      case StmtKind::ReleaseAll:
        // Static end-of-phase marker; locks drop at end_txn (strict 2PL).
        break;
    }
  }
  return std::nullopt;
}

Value Instance::run_function(const Layout& layout, const FunctionDecl& fn,
                             RecordRef self, Frame& frame,
                             TransactionContext* txn) {
  auto ret = run_body(layout, fn, fn.body, self, frame, txn);
  return ret ? *ret : Value::void_v();
}

Value Instance::once(const FunctionDecl& fn, const std::vector<Value>& args,
                     Frame& frame, TransactionContext* txn) {
  frame.vars.clear();
  for (size_t i = 0; i < fn.params.size(); ++i) {
    frame.vars[fn.params[i].name] = args[i];
  }
  for (const auto& [tname, ttype] : fn.temporaries) {
    frame.vars[tname] = Value::zero_of(ttype);
  }
  return run_function(layout_of(spec_->name), fn, root_, frame, txn);
}

InvokeResult Instance::invoke(const std::string& fn_name,
                              const std::vector<Value>& args) {
  if (destroyed_) {
    raise(ErrorCode::InvalidState, "instance has been destroyed");
  }
  if (!spec_->exposed.count(fn_name)) {
    raise(ErrorCode::UnknownMethod,
          "'" + fn_name + "' is not an exposed function of " + spec_->name);
  }
  const FunctionDecl* fn = spec_->find_function(fn_name);
  if (fn == nullptr) {
    raise(ErrorCode::UnknownMethod, "missing function '" + fn_name + "'");
  }
  if (args.size() != fn->params.size()) {
    raise(ErrorCode::ArityOrTypeMismatch,
          fn_name + " takes " + std::to_string(fn->params.size()) +
              " arguments, got " + std::to_string(args.size()));
  }
  for (size_t i = 0; i < args.size(); ++i) {
    if (!assignable(fn->params[i].type, args[i].type)) {
      raise(ErrorCode::ArityOrTypeMismatch,
            fn_name + " argument '" + fn->params[i].name + "' expects " +
                fn->params[i].type.to_string() + ", got " +
                args[i].type.to_string());
    }
  }

  InvokeResult result;
  Frame frame;
  auto collect_out = [&]() {
    for (const Param& p : fn->params) {
      if (p.by_pointer) result.out_params[p.name] = frame.vars.at(p.name);
    }
  };

  if (mode_ == ExecMode::Serial || mode_ == ExecMode::CoarseLocked) {
    std::unique_lock<std::mutex> guard(coarse_mutex_, std::defer_lock);
    if (mode_ == ExecMode::CoarseLocked) guard.lock();
    result.ret = once(*fn, args, frame, nullptr);
    collect_out();
    return result;
  }

  for (uint64_t attempt = 0;; ++attempt) {
    auto txn = manager_->begin_txn();
    try {
      result.ret = once(*fn, args, frame, txn.get());
    } catch (const ConflictException&) {
      manager_->end_txn(*txn, TxnOutcome::Abort);
      retry_backoff(attempt,
                    std::hash<std::thread::id>{}(std::this_thread::get_id()));
      continue;
    } catch (...) {
      manager_->end_txn(*txn, TxnOutcome::Abort);
      throw;
    }
    manager_->end_txn(*txn, TxnOutcome::Commit);
    result.attempts = attempt + 1;
    // Out parameters surface only after the commit point.
    collect_out();
    return result;
  }
}

// ---------------------------------------------------------------------------
// Teardown
// ---------------------------------------------------------------------------

void Instance::destroy() {
  if (destroyed_) {
    raise(ErrorCode::InvalidState, "instance already destroyed");
  }
  destroyed_ = true;

  std::set<uint64_t> visited;
  std::vector<std::pair<std::string, RecordRef>> stack;
  auto push = [&](const std::string& spec_name, RecordRef ref) {
    if (ref.is_null()) return;
    Table* table = TableRegistry::instance().by_id(ref.table_id());
    if (table == nullptr || !table->is_live(ref.offset() - 1)) return;
    if (visited.insert(ref.raw).second) stack.emplace_back(spec_name, ref);
  };
  push(spec_->name, root_);
  while (!stack.empty()) {
    auto [spec_name, ref] = stack.back();
    stack.pop_back();
    const Layout& layout = layout_of(spec_name);
    for (const AttributeDecl& attr : layout.spec->attributes) {
      const Binding& b = layout.bindings.at(attr.name);
      switch (attr.kind) {
        case AttrKind::ComposedEmbedded:
        case AttrKind::ComposedPointer:
          push(attr.spec_name,
               read_field(ref, b.column, nullptr, false).ref);
          break;
        case AttrKind::FixedArray:
          if (attr.type.is_record_ptr()) {
            RecordRef base = read_field(ref, b.column, nullptr, false).ref;
            for (uint64_t i = 0; i < attr.length && !base.is_null(); ++i) {
              push(attr.type.record_spec,
                   RecordRef::make(base.table_id(), base.offset() + i));
            }
          }
          break;
        case AttrKind::KeyIndexedMap: {
          int64_t id = read_field(ref, b.column, nullptr, false).i;
          KeyIndex* index =
              TableRegistry::instance().key_index_by_id(uint64_t(id));
          if (index != nullptr) {
            for (RecordRef v : index->values()) {
              push(attr.value_type.record_spec, v);
            }
            index->clear();
          }
          break;
        }
        case AttrKind::Primitive:
          break;
      }
    }
  }
  for (uint64_t raw : visited) {
    RecordRef ref{raw};
    Table& table = table_of(ref);
    table.set_live(ref.offset() - 1, false);
    table.free_slot(ref.offset() - 1);
  }
}

}  // namespace dcds
