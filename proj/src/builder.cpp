#include "dcds/builder.hpp"

#include <algorithm>

namespace dcds {

namespace {

bool returns_on_all_paths(const std::vector<Statement>& body) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::Return) return true;
    if (s.kind == StmtKind::Conditional && returns_on_all_paths(s.then_body) &&
        returns_on_all_paths(s.else_body)) {
      return true;
    }
  }
  return false;
}

void check_then_branches(const std::vector<Statement>& body,
                         const std::string& fn_name) {
  for (const auto& s : body) {
    if (s.kind != StmtKind::Conditional) continue;
    if (s.then_body.empty()) {
      raise(ErrorCode::EmptyThenBranch,
            "conditional in '" + fn_name + "' has an empty then branch");
    }
    check_then_branches(s.then_body, fn_name);
    check_then_branches(s.else_body, fn_name);
  }
}

// Embedding cycles are illegal; pointer cycles are fine.
bool embeds_spec_named(const DataStructureSpec& spec, const std::string& name) {
  for (const auto& a : spec.attributes) {
    if (a.kind != AttrKind::ComposedEmbedded) continue;
    if (a.spec_name == name) return true;
    auto it = spec.composed.find(a.spec_name);
    if (it != spec.composed.end() && embeds_spec_named(*it->second, name)) {
      return true;
    }
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// FunctionBuilder
// ---------------------------------------------------------------------------

void FunctionBuilder::add_temporary(const std::string& name, ValueType type) {
  if (!is_valid_identifier(name)) {
    raise(ErrorCode::InvalidIdentifier, "temporary '" + name + "'");
  }
  if (decl_.var_type(name) != nullptr) {
    raise(ErrorCode::DuplicateVariable,
          "variable '" + name + "' in function '" + decl_.name + "'");
  }
  if (type.tag == TypeTag::Void) {
    raise(ErrorCode::TypeError, "temporary '" + name + "' cannot be void");
  }
  decl_.temporaries.emplace_back(name, std::move(type));
}

std::vector<Statement>* FunctionBuilder::resolve(const BlockHandle& block) {
  std::vector<Statement>* list = &decl_.body;
  for (const auto& step : block.path_) {
    Statement& s = (*list)[step.stmt_index];
    list = step.then_branch ? &s.then_body : &s.else_body;
  }
  return list;
}

void FunctionBuilder::append(Statement stmt, const BlockHandle& block) {
  resolve(block)->push_back(std::move(stmt));
}

ValueType FunctionBuilder::var_type_or_throw(const std::string& var) const {
  const ValueType* t = decl_.var_type(var);
  if (!t) {
    raise(ErrorCode::UnknownSymbol,
          "variable '" + var + "' in function '" + decl_.name + "'");
  }
  return *t;
}

const AttributeDecl& FunctionBuilder::attr_or_throw(
    const std::string& attr) const {
  const AttributeDecl* decl = owner_->spec_.find_attribute(attr);
  if (!decl) {
    raise(ErrorCode::UnknownSymbol, "attribute '" + attr + "' in spec '" +
                                        owner_->spec_.name + "'");
  }
  return *decl;
}

ValueType FunctionBuilder::check_expression(const Expression& expr) const {
  switch (expr.kind) {
    case Expression::Kind::Constant: return expr.constant.type;
    case Expression::Kind::VarRef: return var_type_or_throw(expr.var);
    case Expression::Kind::Add:
    case Expression::Kind::Subtract: {
      ValueType a = check_expression(*expr.lhs);
      ValueType b = check_expression(*expr.rhs);
      if (!(a == b) || !(a.is_integer() || a.tag == TypeTag::F64)) {
        raise(ErrorCode::TypeError, "arithmetic on " + a.to_string() + " and " +
                                        b.to_string());
      }
      return a;
    }
    case Expression::Kind::Eq: {
      ValueType a = check_expression(*expr.lhs);
      ValueType b = check_expression(*expr.rhs);
      if (!assignable(a, b) && !assignable(b, a)) {
        raise(ErrorCode::TypeError,
              "comparing " + a.to_string() + " and " + b.to_string());
      }
      return ValueType::boolean();
    }
    case Expression::Kind::IsNullPtr: {
      ValueType a = check_expression(*expr.lhs);
      if (!a.is_record_ptr()) {
        raise(ErrorCode::TypeError, "is_null on " + a.to_string());
      }
      return ValueType::boolean();
    }
  }
  raise(ErrorCode::TypeError, "malformed expression");
}

void FunctionBuilder::read(const std::string& attr, const std::string& dst,
                           const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  ValueType dst_t = var_type_or_throw(dst);
  ValueType src_t;
  switch (a.kind) {
    case AttrKind::Primitive: src_t = a.type; break;
    case AttrKind::ComposedPointer:
    case AttrKind::ComposedEmbedded:
      src_t = ValueType::record_ptr(a.spec_name);
      break;
    default:
      raise(ErrorCode::TypeError,
            "attribute '" + attr + "' requires indexed access");
  }
  if (!assignable(dst_t, src_t)) {
    raise(ErrorCode::TypeError, "read " + attr + " (" + src_t.to_string() +
                                    ") into " + dst_t.to_string());
  }
  Statement s;
  s.kind = StmtKind::Read;
  s.attr = attr;
  s.dst = dst;
  append(std::move(s), block);
}

void FunctionBuilder::update(const std::string& attr, const std::string& src,
                             const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  ValueType src_t = var_type_or_throw(src);
  ValueType dst_t;
  switch (a.kind) {
    case AttrKind::Primitive: dst_t = a.type; break;
    case AttrKind::ComposedPointer:
      dst_t = ValueType::record_ptr(a.spec_name);
      break;
    default:
      raise(ErrorCode::TypeError, "attribute '" + attr + "' is not updatable");
  }
  if (!assignable(dst_t, src_t)) {
    raise(ErrorCode::TypeError, "update " + attr + " (" + dst_t.to_string() +
                                    ") from " + src_t.to_string());
  }
  Statement s;
  s.kind = StmtKind::Update;
  s.attr = attr;
  s.src = src;
  append(std::move(s), block);
}

void FunctionBuilder::array_read(const std::string& attr, Expression index,
                                 const std::string& dst,
                                 const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  if (a.kind != AttrKind::FixedArray) {
    raise(ErrorCode::TypeError, "attribute '" + attr + "' is not an array");
  }
  if (!check_expression(index).is_integer()) {
    raise(ErrorCode::TypeError, "array index must be an integer");
  }
  if (!assignable(var_type_or_throw(dst), a.type)) {
    raise(ErrorCode::TypeError, "array_read element type mismatch");
  }
  Statement s;
  s.kind = StmtKind::ArrayRead;
  s.attr = attr;
  s.expr = std::move(index);
  s.dst = dst;
  append(std::move(s), block);
}

void FunctionBuilder::array_update(const std::string& attr, Expression index,
                                   const std::string& src,
                                   const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  if (a.kind != AttrKind::FixedArray) {
    raise(ErrorCode::TypeError, "attribute '" + attr + "' is not an array");
  }
  if (a.type.is_record_ptr()) {
    raise(ErrorCode::TypeError,
          "array of records is accessed through element references");
  }
  if (!check_expression(index).is_integer()) {
    raise(ErrorCode::TypeError, "array index must be an integer");
  }
  if (!assignable(a.type, var_type_or_throw(src))) {
    raise(ErrorCode::TypeError, "array_update element type mismatch");
  }
  Statement s;
  s.kind = StmtKind::ArrayUpdate;
  s.attr = attr;
  s.expr = std::move(index);
  s.src = src;
  append(std::move(s), block);
}

namespace {

Statement make_map_stmt(StmtKind kind, const std::string& attr, Expression key,
                        const std::string& dst, const std::string& src) {
  Statement s;
  s.kind = kind;
  s.attr = attr;
  s.expr = std::move(key);
  s.dst = dst;
  s.src = src;
  return s;
}

}  // namespace

void FunctionBuilder::map_read(const std::string& attr, Expression key,
                               const std::string& dst,
                               const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  if (a.kind != AttrKind::KeyIndexedMap) {
    raise(ErrorCode::TypeError, "attribute '" + attr + "' is not a map");
  }
  if (!assignable(a.key_type, check_expression(key))) {
    raise(ErrorCode::TypeError, "map key type mismatch");
  }
  if (!assignable(var_type_or_throw(dst), a.value_type)) {
    raise(ErrorCode::TypeError, "map_read value type mismatch");
  }
  append(make_map_stmt(StmtKind::MapRead, attr, std::move(key), dst, ""),
         block);
}

void FunctionBuilder::map_update(const std::string& attr, Expression key,
                                 const std::string& src,
                                 const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  if (a.kind != AttrKind::KeyIndexedMap) {
    raise(ErrorCode::TypeError, "attribute '" + attr + "' is not a map");
  }
  if (!assignable(a.key_type, check_expression(key))) {
    raise(ErrorCode::TypeError, "map key type mismatch");
  }
  if (!assignable(a.value_type, var_type_or_throw(src))) {
    raise(ErrorCode::TypeError, "map_update value type mismatch");
  }
  append(make_map_stmt(StmtKind::MapUpdate, attr, std::move(key), "", src),
         block);
}

void FunctionBuilder::map_contains(const std::string& attr, Expression key,
                                   const std::string& dst,
                                   const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  if (a.kind != AttrKind::KeyIndexedMap) {
    raise(ErrorCode::TypeError, "attribute '" + attr + "' is not a map");
  }
  if (!assignable(a.key_type, check_expression(key))) {
    raise(ErrorCode::TypeError, "map key type mismatch");
  }
  if (var_type_or_throw(dst).tag != TypeTag::Bool) {
    raise(ErrorCode::TypeError, "map_contains destination must be bool");
  }
  append(make_map_stmt(StmtKind::MapContains, attr, std::move(key), dst, ""),
         block);
}

void FunctionBuilder::map_insert(const std::string& attr, Expression key,
                                 const std::string& src,
                                 const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  if (a.kind != AttrKind::KeyIndexedMap) {
    raise(ErrorCode::TypeError, "attribute '" + attr + "' is not a map");
  }
  if (!assignable(a.key_type, check_expression(key))) {
    raise(ErrorCode::TypeError, "map key type mismatch");
  }
  if (!assignable(a.value_type, var_type_or_throw(src))) {
    raise(ErrorCode::TypeError, "map_insert value type mismatch");
  }
  append(make_map_stmt(StmtKind::MapInsert, attr, std::move(key), "", src),
         block);
}

void FunctionBuilder::map_erase(const std::string& attr, Expression key,
                                const BlockHandle& block) {
  const AttributeDecl& a = attr_or_throw(attr);
  if (a.kind != AttrKind::KeyIndexedMap) {
    raise(ErrorCode::TypeError, "attribute '" + attr + "' is not a map");
  }
  if (!assignable(a.key_type, check_expression(key))) {
    raise(ErrorCode::TypeError, "map key type mismatch");
  }
  append(make_map_stmt(StmtKind::MapErase, attr, std::move(key), "", ""),
         block);
}

std::pair<BlockHandle, BlockHandle> FunctionBuilder::conditional(
    Expression cond, const BlockHandle& block) {
  if (check_expression(cond).tag != TypeTag::Bool) {
    raise(ErrorCode::TypeError, "conditional requires a bool expression");
  }
  Statement s;
  s.kind = StmtKind::Conditional;
  s.expr = std::move(cond);
  std::vector<Statement>* list = resolve(block);
  size_t index = list->size();
  list->push_back(std::move(s));

  BlockHandle then_block = block;
  then_block.path_.push_back({index, true});
  BlockHandle else_block = block;
  else_block.path_.push_back({index, false});
  return {then_block, else_block};
}

void FunctionBuilder::create(const std::string& spec_name,
                             const std::string& dst,
                             const BlockHandle& block) {
  SpecPtr inner = owner_->find_composed(spec_name);
  if (!inner) {
    raise(ErrorCode::UnknownSymbol, "composed spec '" + spec_name + "'");
  }
  if (!assignable(var_type_or_throw(dst), ValueType::record_ptr(spec_name))) {
    raise(ErrorCode::TypeError, "create destination type mismatch");
  }
  Statement s;
  s.kind = StmtKind::Create;
  s.type_name = spec_name;
  s.dst = dst;
  append(std::move(s), block);
}

void FunctionBuilder::del(const std::string& src, const BlockHandle& block) {
  if (!var_type_or_throw(src).is_record_ptr()) {
    raise(ErrorCode::TypeError, "delete requires a record reference");
  }
  Statement s;
  s.kind = StmtKind::Delete;
  s.src = src;
  append(std::move(s), block);
}

void FunctionBuilder::method_call(const std::string& target,
                                  const std::string& fn,
                                  std::vector<std::string> args,
                                  const std::string& dst,
                                  const BlockHandle& block) {
  // Target is either a RecordPtr variable or an embedded attribute.
  std::string target_spec;
  if (const ValueType* vt = decl_.var_type(target)) {
    if (!vt->is_record_ptr()) {
      raise(ErrorCode::TypeError, "method call target '" + target +
                                      "' is not a record reference");
    }
    target_spec = vt->record_spec;
  } else if (const AttributeDecl* a = owner_->spec_.find_attribute(target)) {
    if (a->kind != AttrKind::ComposedEmbedded) {
      raise(ErrorCode::TypeError,
            "method call target attribute '" + target + "' is not embedded");
    }
    target_spec = a->spec_name;
  } else {
    raise(ErrorCode::UnknownSymbol, "method call target '" + target + "'");
  }

  SpecPtr callee_spec = owner_->find_composed(target_spec);
  if (!callee_spec) {
    raise(ErrorCode::UnknownSymbol, "composed spec '" + target_spec + "'");
  }
  const FunctionDecl* callee = callee_spec->find_function(fn);
  if (!callee) {
    raise(ErrorCode::UnknownSymbol,
          "function '" + fn + "' of spec '" + target_spec + "'");
  }
  if (callee->params.size() != args.size()) {
    raise(ErrorCode::TypeError, "call to '" + fn + "' expects " +
                                    std::to_string(callee->params.size()) +
                                    " arguments");
  }
  for (size_t i = 0; i < args.size(); ++i) {
    ValueType at = var_type_or_throw(args[i]);
    if (!assignable(callee->params[i].type, at)) {
      raise(ErrorCode::TypeError, "argument " + std::to_string(i) +
                                      " of call to '" + fn + "'");
    }
  }
  Statement s;
  s.kind = StmtKind::MethodCall;
  s.target = target;
  s.fn = fn;
  s.args = std::move(args);
  if (!dst.empty()) {
    if (callee->return_type.tag == TypeTag::Void) {
      raise(ErrorCode::TypeError, "'" + fn + "' returns void");
    }
    if (!assignable(var_type_or_throw(dst), callee->return_type)) {
      raise(ErrorCode::TypeError, "call result type mismatch for '" + fn + "'");
    }
    s.dst = dst;
    s.has_value = true;
  }
  append(std::move(s), block);
}

void FunctionBuilder::assign(const std::string& dst, Expression expr,
                             const BlockHandle& block) {
  ValueType et = check_expression(expr);
  if (!assignable(var_type_or_throw(dst), et)) {
    raise(ErrorCode::TypeError, "assign to '" + dst + "' of incompatible type");
  }
  Statement s;
  s.kind = StmtKind::Assign;
  s.dst = dst;
  s.expr = std::move(expr);
  append(std::move(s), block);
}

void FunctionBuilder::ret(const BlockHandle& block) {
  if (decl_.return_type.tag != TypeTag::Void) {
    raise(ErrorCode::TypeError,
          "function '" + decl_.name + "' must return a value");
  }
  Statement s;
  s.kind = StmtKind::Return;
  append(std::move(s), block);
}

void FunctionBuilder::ret(const std::string& src, const BlockHandle& block) {
  if (decl_.return_type.tag == TypeTag::Void) {
    raise(ErrorCode::TypeError, "function '" + decl_.name + "' returns void");
  }
  if (!assignable(decl_.return_type, var_type_or_throw(src))) {
    raise(ErrorCode::TypeError, "return type mismatch in '" + decl_.name + "'");
  }
  Statement s;
  s.kind = StmtKind::Return;
  s.src = src;
  s.has_value = true;
  append(std::move(s), block);
}

// ---------------------------------------------------------------------------
// SpecBuilder
// ---------------------------------------------------------------------------

SpecBuilder::SpecBuilder(const std::string& name) {
  if (!is_valid_identifier(name)) {
    raise(ErrorCode::InvalidIdentifier, "spec name '" + name + "'");
  }
  spec_.name = name;
}

SpecPtr SpecBuilder::find_composed(const std::string& spec_name) const {
  auto it = spec_.composed.find(spec_name);
  return it == spec_.composed.end() ? nullptr : it->second;
}

void SpecBuilder::add_attribute(AttributeDecl decl) {
  if (!is_valid_identifier(decl.name)) {
    raise(ErrorCode::InvalidIdentifier, "attribute '" + decl.name + "'");
  }
  if (spec_.find_attribute(decl.name)) {
    raise(ErrorCode::DuplicateAttribute, "'" + decl.name + "'");
  }
  switch (decl.kind) {
    case AttrKind::Primitive:
      if (decl.type.tag == TypeTag::Void) {
        raise(ErrorCode::TypeError, "attribute cannot be void");
      }
      if (!assignable(decl.type, decl.default_value.type)) {
        raise(ErrorCode::TypeError,
              "default value of '" + decl.name + "' has wrong type");
      }
      break;
    case AttrKind::ComposedEmbedded:
    case AttrKind::ComposedPointer: {
      // A spec may point to itself (linked-list nodes); everything else
      // must already be registered.
      bool self_ptr =
          decl.kind == AttrKind::ComposedPointer && decl.spec_name == spec_.name;
      if (!self_ptr && !find_composed(decl.spec_name)) {
        raise(ErrorCode::UnknownSymbol,
              "composed spec '" + decl.spec_name + "' is not registered");
      }
      break;
    }
    case AttrKind::FixedArray:
      if (decl.type.is_record_ptr() && !find_composed(decl.type.record_spec)) {
        raise(ErrorCode::UnknownSymbol, "array element spec '" +
                                            decl.type.record_spec +
                                            "' is not registered");
      }
      break;
    case AttrKind::KeyIndexedMap:
      if (decl.value_type.is_record_ptr() &&
          !find_composed(decl.value_type.record_spec) &&
          decl.value_type.record_spec != spec_.name) {
        raise(ErrorCode::UnknownSymbol, "map value spec '" +
                                            decl.value_type.record_spec +
                                            "' is not registered");
      }
      break;
  }
  spec_.attributes.push_back(std::move(decl));
}

void SpecBuilder::register_composed(SpecPtr inner) {
  if (!inner) {
    raise(ErrorCode::UnknownSymbol, "null composed spec");
  }
  if (inner->name == spec_.name || embeds_spec_named(*inner, spec_.name)) {
    raise(ErrorCode::CyclicEmbedding,
          "'" + inner->name + "' into '" + spec_.name + "'");
  }
  if (find_composed(inner->name)) {
    raise(ErrorCode::DuplicateAttribute,
          "composed spec '" + inner->name + "' already registered");
  }
  spec_.composed.emplace(inner->name, std::move(inner));
}

FunctionBuilder& SpecBuilder::create_function(const std::string& name,
                                              ValueType return_type,
                                              std::vector<Param> params) {
  if (!is_valid_identifier(name)) {
    raise(ErrorCode::InvalidIdentifier, "function '" + name + "'");
  }
  if (spec_.functions.count(name)) {
    raise(ErrorCode::DuplicateFunction, "'" + name + "'");
  }
  FunctionDecl decl;
  decl.name = name;
  decl.return_type = std::move(return_type);
  for (auto& p : params) {
    if (!is_valid_identifier(p.name)) {
      raise(ErrorCode::InvalidIdentifier, "parameter '" + p.name + "'");
    }
    for (const auto& q : decl.params) {
      if (q.name == p.name) {
        raise(ErrorCode::DuplicateVariable, "parameter '" + p.name + "'");
      }
    }
    decl.params.push_back(std::move(p));
  }
  // Reserve the slot in the spec so duplicate names are caught even
  // before build().
  spec_.functions.emplace(name, FunctionDecl{});
  fn_builders_.push_back(
      std::unique_ptr<FunctionBuilder>(new FunctionBuilder(this, std::move(decl))));
  return *fn_builders_.back();
}

SpecPtr SpecBuilder::build(std::set<std::string> exposed) {
  if (built_) {
    raise(ErrorCode::InvalidState, "builder '" + spec_.name + "' already built");
  }
  for (auto& fb : fn_builders_) {
    FunctionDecl& decl = fb->decl_;
    if (!returns_on_all_paths(decl.body)) {
      raise(ErrorCode::MissingReturn, "function '" + decl.name + "'");
    }
    check_then_branches(decl.body, decl.name);
    spec_.functions[decl.name] = std::move(decl);
  }
  for (const auto& e : exposed) {
    if (!spec_.functions.count(e)) {
      raise(ErrorCode::UnknownExposedFunction, "'" + e + "'");
    }
  }
  spec_.exposed = std::move(exposed);
  spec_.cc_injected = false;
  built_ = true;
  return std::make_shared<DataStructureSpec>(std::move(spec_));
}

}  // namespace dcds
