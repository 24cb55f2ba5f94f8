#include "dcds/ir.hpp"

#include <sstream>

namespace dcds {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

std::string Expression::to_string() const {
  switch (kind) {
    case Kind::Constant: return constant.to_string();
    case Kind::VarRef: return var;
    case Kind::Add: return "(" + lhs->to_string() + " + " + rhs->to_string() + ")";
    case Kind::Subtract:
      return "(" + lhs->to_string() + " - " + rhs->to_string() + ")";
    case Kind::Eq: return "(" + lhs->to_string() + " == " + rhs->to_string() + ")";
    case Kind::IsNullPtr: return "is_null(" + lhs->to_string() + ")";
  }
  return "?";
}

bool equal(const Expression& a, const Expression& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expression::Kind::Constant: return a.constant == b.constant;
    case Expression::Kind::VarRef: return a.var == b.var;
    case Expression::Kind::IsNullPtr: return equal(*a.lhs, *b.lhs);
    case Expression::Kind::Add:
    case Expression::Kind::Subtract:
    case Expression::Kind::Eq:
      return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

bool equal(const Statement& a, const Statement& b) {
  if (a.kind != b.kind || a.attr != b.attr || a.dst != b.dst ||
      a.src != b.src || a.type_name != b.type_name || a.target != b.target ||
      a.fn != b.fn || a.args != b.args || a.has_value != b.has_value) {
    return false;
  }
  if (!equal(a.expr, b.expr)) return false;
  return equal(a.then_body, b.then_body) && equal(a.else_body, b.else_body);
}

bool equal(const std::vector<Statement>& a, const std::vector<Statement>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!equal(a[i], b[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

AttributeDecl AttributeDecl::primitive(std::string name, ValueType t,
                                       Value dflt) {
  AttributeDecl d;
  d.name = std::move(name);
  d.kind = AttrKind::Primitive;
  d.type = std::move(t);
  d.default_value = std::move(dflt);
  return d;
}

AttributeDecl AttributeDecl::composed_embedded(std::string name,
                                               std::string spec_name) {
  AttributeDecl d;
  d.name = std::move(name);
  d.kind = AttrKind::ComposedEmbedded;
  d.spec_name = std::move(spec_name);
  return d;
}

AttributeDecl AttributeDecl::composed_pointer(std::string name,
                                              std::string spec_name) {
  AttributeDecl d;
  d.name = std::move(name);
  d.kind = AttrKind::ComposedPointer;
  d.spec_name = spec_name;
  d.type = ValueType::record_ptr(std::move(spec_name));
  return d;
}

AttributeDecl AttributeDecl::fixed_array(std::string name, ValueType element,
                                         uint64_t length) {
  if (length == 0) {
    raise(ErrorCode::TypeError, "FixedArray length must be positive");
  }
  AttributeDecl d;
  d.name = std::move(name);
  d.kind = AttrKind::FixedArray;
  d.type = std::move(element);
  d.length = length;
  return d;
}

AttributeDecl AttributeDecl::key_indexed_map(std::string name, ValueType key,
                                             ValueType value) {
  AttributeDecl d;
  d.name = std::move(name);
  d.kind = AttrKind::KeyIndexedMap;
  d.key_type = std::move(key);
  d.value_type = std::move(value);
  return d;
}

std::string AttributeDecl::type_string() const {
  switch (kind) {
    case AttrKind::Primitive: return type.to_string();
    case AttrKind::ComposedEmbedded: return "embedded<" + spec_name + ">";
    case AttrKind::ComposedPointer: return "ptr<" + spec_name + ">";
    case AttrKind::FixedArray:
      return "array<" + type.to_string() + ", " + std::to_string(length) + ">";
    case AttrKind::KeyIndexedMap:
      return "map<" + key_type.to_string() + ", " + value_type.to_string() +
             ">";
  }
  return "?";
}

bool equal(const AttributeDecl& a, const AttributeDecl& b) {
  return a.name == b.name && a.kind == b.kind && a.type == b.type &&
         a.default_value == b.default_value && a.spec_name == b.spec_name &&
         a.length == b.length && a.key_type == b.key_type &&
         a.value_type == b.value_type;
}

const ValueType* FunctionDecl::var_type(const std::string& var) const {
  for (const auto& p : params) {
    if (p.name == var) return &p.type;
  }
  for (const auto& t : temporaries) {
    if (t.first == var) return &t.second;
  }
  return nullptr;
}

const Param* FunctionDecl::find_param(const std::string& var) const {
  for (const auto& p : params) {
    if (p.name == var) return &p;
  }
  return nullptr;
}

bool equal(const FunctionDecl& a, const FunctionDecl& b) {
  if (a.name != b.name || !(a.return_type == b.return_type)) return false;
  if (a.params.size() != b.params.size()) return false;
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name ||
        !(a.params[i].type == b.params[i].type) ||
        a.params[i].by_pointer != b.params[i].by_pointer) {
      return false;
    }
  }
  if (a.temporaries != b.temporaries) return false;
  return equal(a.body, b.body);
}

const AttributeDecl* DataStructureSpec::find_attribute(
    const std::string& attr_name) const {
  for (const auto& a : attributes) {
    if (a.name == attr_name) return &a;
  }
  return nullptr;
}

const FunctionDecl* DataStructureSpec::find_function(
    const std::string& fn_name) const {
  auto it = functions.find(fn_name);
  return it == functions.end() ? nullptr : &it->second;
}

SpecPtr DataStructureSpec::resolve_spec(const std::string& spec_name,
                                        const SpecPtr& self) const {
  if (spec_name == name) return self;
  auto it = composed.find(spec_name);
  if (it != composed.end()) return it->second;
  for (const auto& [_, inner] : composed) {
    if (auto found = inner->resolve_spec(spec_name, inner)) return found;
  }
  return nullptr;
}

bool equal(const DataStructureSpec& a, const DataStructureSpec& b) {
  if (a.name != b.name || a.exposed != b.exposed ||
      a.cc_injected != b.cc_injected) {
    return false;
  }
  if (a.attributes.size() != b.attributes.size()) return false;
  for (size_t i = 0; i < a.attributes.size(); ++i) {
    if (!equal(a.attributes[i], b.attributes[i])) return false;
  }
  if (a.functions.size() != b.functions.size()) return false;
  for (auto ia = a.functions.begin(), ib = b.functions.begin();
       ia != a.functions.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !equal(ia->second, ib->second)) return false;
  }
  if (a.composed.size() != b.composed.size()) return false;
  for (auto ia = a.composed.begin(), ib = b.composed.begin();
       ia != a.composed.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !equal(*ia->second, *ib->second)) {
      return false;
    }
  }
  return true;
}

std::shared_ptr<DataStructureSpec> clone_spec(const DataStructureSpec& spec) {
  auto out = std::make_shared<DataStructureSpec>(spec);
  for (auto& [name, inner] : out->composed) {
    inner = clone_spec(*inner);
  }
  return out;
}

namespace {

void collect_specs(const SpecPtr& spec, std::vector<SpecPtr>& out,
                   std::set<std::string>& seen) {
  if (!seen.insert(spec->name).second) return;
  out.push_back(spec);
  for (const auto& [_, inner] : spec->composed) {
    collect_specs(inner, out, seen);
  }
}

}  // namespace

std::vector<SpecPtr> all_specs(const SpecPtr& root) {
  std::vector<SpecPtr> out;
  std::set<std::string> seen;
  collect_specs(root, out, seen);
  return out;
}

// ---------------------------------------------------------------------------
// Textual dump
// ---------------------------------------------------------------------------

namespace {

const char* stmt_kind_name(StmtKind kind) {
  switch (kind) {
    case StmtKind::Read: return "read";
    case StmtKind::Update: return "update";
    case StmtKind::ArrayRead: return "array_read";
    case StmtKind::ArrayUpdate: return "array_update";
    case StmtKind::MapRead: return "map_read";
    case StmtKind::MapUpdate: return "map_update";
    case StmtKind::MapContains: return "map_contains";
    case StmtKind::MapInsert: return "map_insert";
    case StmtKind::MapErase: return "map_erase";
    case StmtKind::Conditional: return "if";
    case StmtKind::Create: return "create";
    case StmtKind::Delete: return "delete";
    case StmtKind::MethodCall: return "call";
    case StmtKind::Return: return "return";
    case StmtKind::Assign: return "assign";
    case StmtKind::Nop: return "nop";
    case StmtKind::AcquireShared: return "LOCK_S";
    case StmtKind::AcquireExclusive: return "LOCK_X";
    case StmtKind::Upgrade: return "UPGRADE";
    case StmtKind::ReleaseAll: return "RELEASE_ALL";
  }
  return "?";
}

void dump_stmt_rec(const Statement& s, int indent, std::ostringstream& os) {
  std::string pad(size_t(indent) * 2, ' ');
  os << pad << stmt_kind_name(s.kind);
  switch (s.kind) {
    case StmtKind::Read: os << " " << s.attr << " -> " << s.dst; break;
    case StmtKind::Update: os << " " << s.attr << " <- " << s.src; break;
    case StmtKind::ArrayRead:
      os << " " << s.attr << "[" << s.expr.to_string() << "] -> " << s.dst;
      break;
    case StmtKind::ArrayUpdate:
      os << " " << s.attr << "[" << s.expr.to_string() << "] <- " << s.src;
      break;
    case StmtKind::MapRead:
      os << " " << s.attr << "[" << s.expr.to_string() << "] -> " << s.dst;
      break;
    case StmtKind::MapUpdate:
      os << " " << s.attr << "[" << s.expr.to_string() << "] <- " << s.src;
      break;
    case StmtKind::MapContains:
      os << " " << s.attr << "[" << s.expr.to_string() << "] -> " << s.dst;
      break;
    case StmtKind::MapInsert:
      os << " " << s.attr << "[" << s.expr.to_string() << "] <- " << s.src;
      break;
    case StmtKind::MapErase:
      os << " " << s.attr << "[" << s.expr.to_string() << "]";
      break;
    case StmtKind::Conditional: os << " " << s.expr.to_string(); break;
    case StmtKind::Create: os << " " << s.type_name << " -> " << s.dst; break;
    case StmtKind::Delete: os << " " << s.src; break;
    case StmtKind::MethodCall: {
      os << " " << s.target << "." << s.fn << "(";
      for (size_t i = 0; i < s.args.size(); ++i) {
        if (i) os << ", ";
        os << s.args[i];
      }
      os << ")";
      if (s.has_value) os << " -> " << s.dst;
      break;
    }
    case StmtKind::Return:
      if (s.has_value) os << " " << s.src;
      break;
    case StmtKind::Assign:
      os << " " << s.dst << " <- " << s.expr.to_string();
      break;
    case StmtKind::Nop: break;
    case StmtKind::AcquireShared:
    case StmtKind::AcquireExclusive:
    case StmtKind::Upgrade: os << " " << s.target; break;
    case StmtKind::ReleaseAll: break;
  }
  os << "\n";
  if (s.kind == StmtKind::Conditional) {
    for (const auto& t : s.then_body) dump_stmt_rec(t, indent + 1, os);
    if (!s.else_body.empty()) {
      os << pad << "else\n";
      for (const auto& e : s.else_body) dump_stmt_rec(e, indent + 1, os);
    }
  }
}

}  // namespace

std::string dump_statement(const Statement& stmt, int indent) {
  std::ostringstream os;
  dump_stmt_rec(stmt, indent, os);
  return os.str();
}

std::string dump_function(const FunctionDecl& fn, int indent) {
  std::ostringstream os;
  std::string pad(size_t(indent) * 2, ' ');
  os << pad << "fn " << fn.name << "(";
  for (size_t i = 0; i < fn.params.size(); ++i) {
    if (i) os << ", ";
    os << fn.params[i].name << (fn.params[i].by_pointer ? "*" : "") << " : "
       << fn.params[i].type.to_string();
  }
  os << ") -> " << fn.return_type.to_string() << "\n";
  for (const auto& [name, type] : fn.temporaries) {
    os << pad << "  tmp " << name << " : " << type.to_string() << "\n";
  }
  for (const auto& s : fn.body) dump_stmt_rec(s, indent + 1, os);
  return os.str();
}

std::string dump_spec(const DataStructureSpec& spec) {
  std::ostringstream os;
  os << "spec " << spec.name << (spec.cc_injected ? " [cc]" : "") << "\n";
  os << "attributes:\n";
  for (const auto& a : spec.attributes) {
    os << "  " << a.name << " : " << a.type_string();
    if (a.kind == AttrKind::Primitive) {
      os << " = " << a.default_value.to_string();
    }
    os << "\n";
  }
  os << "functions:\n";
  for (const auto& [name, fn] : spec.functions) {
    os << dump_function(fn, 1);
  }
  if (!spec.exposed.empty()) {
    os << "exposed:";
    for (const auto& e : spec.exposed) os << " " << e;
    os << "\n";
  }
  for (const auto& [name, inner] : spec.composed) {
    os << "\ncomposed " << dump_spec(*inner);
  }
  return os.str();
}

}  // namespace dcds
