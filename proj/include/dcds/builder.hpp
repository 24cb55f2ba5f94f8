#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dcds/ir.hpp"

namespace dcds {

class SpecBuilder;

/// Addresses a statement list inside a function body: the root body, or
/// a branch of a (possibly nested) conditional. Handles stay valid as
/// sibling statements are appended because they store index paths, not
/// pointers.
class BlockHandle {
 public:
  BlockHandle() = default;

  friend class FunctionBuilder;

 private:
  struct Step {
    size_t stmt_index;
    bool then_branch;
  };
  std::vector<Step> path_;
};

/// Builds one function body. Obtained from SpecBuilder::create_function;
/// statements type-check eagerly against declared temporaries, params
/// and attributes.
class FunctionBuilder {
 public:
  void add_temporary(const std::string& name, ValueType type);

  // Statement append helpers. All default to the root block; pass a
  // branch handle to append into a conditional.
  void read(const std::string& attr, const std::string& dst,
            const BlockHandle& block = {});
  void update(const std::string& attr, const std::string& src,
              const BlockHandle& block = {});
  void array_read(const std::string& attr, Expression index,
                  const std::string& dst, const BlockHandle& block = {});
  void array_update(const std::string& attr, Expression index,
                    const std::string& src, const BlockHandle& block = {});
  void map_read(const std::string& attr, Expression key, const std::string& dst,
                const BlockHandle& block = {});
  void map_update(const std::string& attr, Expression key,
                  const std::string& src, const BlockHandle& block = {});
  void map_contains(const std::string& attr, Expression key,
                    const std::string& dst, const BlockHandle& block = {});
  void map_insert(const std::string& attr, Expression key,
                  const std::string& src, const BlockHandle& block = {});
  void map_erase(const std::string& attr, Expression key,
                 const BlockHandle& block = {});
  /// Returns handles for the then/else branches.
  std::pair<BlockHandle, BlockHandle> conditional(
      Expression cond, const BlockHandle& block = {});
  void create(const std::string& spec_name, const std::string& dst,
              const BlockHandle& block = {});
  void del(const std::string& src, const BlockHandle& block = {});
  void method_call(const std::string& target, const std::string& fn,
                   std::vector<std::string> args, const std::string& dst = "",
                   const BlockHandle& block = {});
  void assign(const std::string& dst, Expression expr,
              const BlockHandle& block = {});
  void ret(const BlockHandle& block = {});
  void ret(const std::string& src, const BlockHandle& block = {});

  const std::string& name() const { return decl_.name; }

  friend class SpecBuilder;

 private:
  FunctionBuilder(SpecBuilder* owner, FunctionDecl decl)
      : owner_(owner), decl_(std::move(decl)) {}

  std::vector<Statement>* resolve(const BlockHandle& block);
  void append(Statement stmt, const BlockHandle& block);
  ValueType var_type_or_throw(const std::string& var) const;
  ValueType check_expression(const Expression& expr) const;
  const AttributeDecl& attr_or_throw(const std::string& attr) const;

  SpecBuilder* owner_;
  FunctionDecl decl_;
};

/// Entry point of the DSL: collects attributes, composed specs and
/// functions for one data structure, then validates and freezes them
/// into an immutable DataStructureSpec.
class SpecBuilder {
 public:
  explicit SpecBuilder(const std::string& name);

  void add_attribute(AttributeDecl decl);
  void register_composed(SpecPtr inner);
  FunctionBuilder& create_function(const std::string& name,
                                   ValueType return_type,
                                   std::vector<Param> params = {});

  /// Validates (explicit returns on all paths, non-empty then branches,
  /// exposed names known) and returns the immutable spec.
  SpecPtr build(std::set<std::string> exposed);

  const std::string& name() const { return spec_.name; }

  friend class FunctionBuilder;

 private:
  SpecPtr find_composed(const std::string& spec_name) const;

  DataStructureSpec spec_;
  std::vector<std::unique_ptr<FunctionBuilder>> fn_builders_;
  bool built_ = false;
};

}  // namespace dcds
