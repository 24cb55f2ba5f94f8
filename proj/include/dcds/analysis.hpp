#pragma once

#include <map>
#include <set>
#include <string>

#include "dcds/ir.hpp"

namespace dcds {

/// Per-function transitive read/write sets over qualified attribute
/// names ("Spec.attr"), plus const-function and per-call-site nascent
/// flags.
struct FunctionRWInfo {
  std::set<std::string> read_set;
  std::set<std::string> write_set;
  bool creates_or_deletes = false;
  bool is_const = false;
};

struct RWSetTable {
  // Keyed by qualified function name "Spec.fn".
  std::map<std::string, FunctionRWInfo> functions;
  // Per MethodCall / Delete site: does the target/operand hold a record
  // created in this scope and not yet stored to any shared location on
  // every path reaching the site?
  std::map<const Statement*, bool> nascent;

  const FunctionRWInfo& at(const std::string& spec_name,
                           const std::string& fn_name) const;
  bool is_const_fn(const std::string& spec_name,
                   const std::string& fn_name) const;
};

/// Fixed point over the call graph; both conditional branches
/// contribute. Does not fill is_const or nascent flags.
RWSetTable compute_rw_sets(const SpecPtr& spec);

/// Sets is_const per function: empty transitive write set and no
/// create/delete with shared visibility.
RWSetTable deduce_const(const SpecPtr& spec, RWSetTable rw);

/// All-paths dataflow over one function body. Conservative: any
/// publication (or aliasing assignment) on any path clears nascency.
std::map<const Statement*, bool> compute_nascent(const FunctionDecl& fn);

/// compute_rw_sets + deduce_const + compute_nascent for every function
/// of every (composed) spec.
RWSetTable analyze(const SpecPtr& spec);

/// Qualified names ("Spec.fn") of functions directly called from `fn`.
std::set<std::string> direct_callees(const DataStructureSpec& spec,
                                     const FunctionDecl& fn);

/// Spec name a MethodCall statement dispatches into.
std::string method_call_target_spec(const DataStructureSpec& spec,
                                    const FunctionDecl& fn,
                                    const Statement& call);

/// `fn <Spec.name> const=<bool> R={...} W={...}` lines, sorted.
std::string dump_rw_table(const SpecPtr& spec, const RWSetTable& rw);

}  // namespace dcds
