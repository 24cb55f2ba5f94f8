#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dcds/types.hpp"

namespace dcds {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

/// Side-effect-free expression tree. Expressions reference only
/// temporaries, function arguments and constants, never attributes.
struct Expression {
  enum class Kind { Constant, VarRef, Add, Subtract, Eq, IsNullPtr };

  Kind kind = Kind::Constant;
  Value constant;                    // Constant
  std::string var;                   // VarRef
  std::shared_ptr<Expression> lhs;   // binary / unary operand
  std::shared_ptr<Expression> rhs;   // binary operand

  static Expression constant_of(Value v) {
    Expression e;
    e.kind = Kind::Constant;
    e.constant = std::move(v);
    return e;
  }
  static Expression var_ref(std::string name) {
    Expression e;
    e.kind = Kind::VarRef;
    e.var = std::move(name);
    return e;
  }
  static Expression binary(Kind k, Expression a, Expression b) {
    Expression e;
    e.kind = k;
    e.lhs = std::make_shared<Expression>(std::move(a));
    e.rhs = std::make_shared<Expression>(std::move(b));
    return e;
  }
  static Expression add(Expression a, Expression b) {
    return binary(Kind::Add, std::move(a), std::move(b));
  }
  static Expression subtract(Expression a, Expression b) {
    return binary(Kind::Subtract, std::move(a), std::move(b));
  }
  static Expression eq(Expression a, Expression b) {
    return binary(Kind::Eq, std::move(a), std::move(b));
  }
  static Expression is_null_ptr(Expression a) {
    Expression e;
    e.kind = Kind::IsNullPtr;
    e.lhs = std::make_shared<Expression>(std::move(a));
    return e;
  }

  std::string to_string() const;
};

bool equal(const Expression& a, const Expression& b);

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind {
  Read,          // attr -> dst
  Update,        // src -> attr
  ArrayRead,     // attr[key_or_index] -> dst
  ArrayUpdate,   // src -> attr[key_or_index]
  MapRead,       // attr[key] -> dst (null ref when absent)
  MapUpdate,     // src -> attr[key] (no-op when absent)
  MapContains,   // attr contains key -> dst (Bool)
  MapInsert,     // insert attr[key] = src (kept untouched when key exists)
  MapErase,      // erase attr[key]
  Conditional,   // cond, then_body, else_body
  Create,        // new record of type_name -> dst
  Delete,        // delete record held in src
  MethodCall,    // target.fn(args) -> dst (optional)
  Return,        // void or src
  Assign,        // expr -> dst
  Nop,           // inserted by the optimizer to keep branches non-empty
  // Concurrency-control statements, present only in cc-injected specs.
  AcquireShared,     // lock target: kSelfTarget or a RecordPtr variable
  AcquireExclusive,
  Upgrade,
  ReleaseAll,
};

/// Lock target naming the record that owns an instance's own attributes.
inline const std::string kSelfTarget = "self";

struct Statement {
  StmtKind kind = StmtKind::Nop;
  std::string attr;                  // attribute name
  std::string dst;                   // destination variable
  std::string src;                   // source variable
  Expression expr;                   // cond / index / key / assign source
  std::string type_name;             // Create: composed spec name
  std::string target;                // MethodCall target variable or
                                     // embedded attribute; lock target
  std::string fn;                    // MethodCall callee name
  std::vector<std::string> args;     // MethodCall arguments
  bool has_value = false;            // Return: returns src?  MethodCall:
                                     // result requested?
  std::vector<Statement> then_body;  // Conditional
  std::vector<Statement> else_body;  // Conditional

  bool is_lock() const {
    return kind == StmtKind::AcquireShared ||
           kind == StmtKind::AcquireExclusive || kind == StmtKind::Upgrade ||
           kind == StmtKind::ReleaseAll;
  }
};

bool equal(const Statement& a, const Statement& b);
bool equal(const std::vector<Statement>& a, const std::vector<Statement>& b);

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

enum class AttrKind {
  Primitive,
  ComposedEmbedded,
  ComposedPointer,
  FixedArray,
  KeyIndexedMap,
};

struct AttributeDecl {
  std::string name;
  AttrKind kind = AttrKind::Primitive;
  ValueType type;            // Primitive: value type; FixedArray: element
                             // type (primitive or RecordPtr)
  Value default_value;       // Primitive only
  std::string spec_name;     // ComposedEmbedded / ComposedPointer
  uint64_t length = 0;       // FixedArray
  ValueType key_type;        // KeyIndexedMap
  ValueType value_type;      // KeyIndexedMap

  static AttributeDecl primitive(std::string name, ValueType t, Value dflt);
  static AttributeDecl composed_embedded(std::string name,
                                         std::string spec_name);
  static AttributeDecl composed_pointer(std::string name,
                                        std::string spec_name);
  static AttributeDecl fixed_array(std::string name, ValueType element,
                                   uint64_t length);
  static AttributeDecl key_indexed_map(std::string name, ValueType key,
                                       ValueType value);

  std::string type_string() const;
};

bool equal(const AttributeDecl& a, const AttributeDecl& b);

struct Param {
  std::string name;
  ValueType type;
  bool by_pointer = false;  // out-parameter, written back at commit
};

struct FunctionDecl {
  std::string name;
  ValueType return_type;
  std::vector<Param> params;
  std::vector<std::pair<std::string, ValueType>> temporaries;
  std::vector<Statement> body;

  const ValueType* var_type(const std::string& var) const;
  const Param* find_param(const std::string& var) const;
};

bool equal(const FunctionDecl& a, const FunctionDecl& b);

struct DataStructureSpec {
  std::string name;
  std::vector<AttributeDecl> attributes;
  // Directly registered composed specs, by name. Nested composition is
  // reached through the inner specs' own maps.
  std::map<std::string, std::shared_ptr<const DataStructureSpec>> composed;
  std::map<std::string, FunctionDecl> functions;
  std::set<std::string> exposed;
  bool cc_injected = false;

  const AttributeDecl* find_attribute(const std::string& name) const;
  const FunctionDecl* find_function(const std::string& name) const;
  /// Resolves a spec name: this spec itself (self-pointers are legal) or
  /// a composed spec, searched recursively.
  std::shared_ptr<const DataStructureSpec> resolve_spec(
      const std::string& spec_name,
      const std::shared_ptr<const DataStructureSpec>& self) const;
};

using SpecPtr = std::shared_ptr<const DataStructureSpec>;

bool equal(const DataStructureSpec& a, const DataStructureSpec& b);

/// Deep copy, cloning composed specs as well.
std::shared_ptr<DataStructureSpec> clone_spec(const DataStructureSpec& spec);

/// Collects this spec and every (transitively) composed spec, outermost
/// first, deduplicated by name.
std::vector<SpecPtr> all_specs(const SpecPtr& root);

// ---------------------------------------------------------------------------
// Textual IR dump
// ---------------------------------------------------------------------------

std::string dump_statement(const Statement& stmt, int indent = 0);
std::string dump_function(const FunctionDecl& fn, int indent = 0);
std::string dump_spec(const DataStructureSpec& spec);

}  // namespace dcds
