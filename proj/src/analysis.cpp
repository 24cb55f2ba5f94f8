#include "dcds/analysis.hpp"

#include <functional>
#include <optional>
#include <sstream>

namespace dcds {

namespace {

std::string qualify(const std::string& spec_name, const std::string& member) {
  return spec_name + "." + member;
}

/// Spec name of a MethodCall target within `fn` of `spec`.
std::string call_target_spec(const DataStructureSpec& spec,
                             const FunctionDecl& fn, const Statement& call) {
  if (const ValueType* vt = fn.var_type(call.target)) {
    return vt->record_spec;
  }
  if (const AttributeDecl* a = spec.find_attribute(call.target)) {
    return a->spec_name;
  }
  raise(ErrorCode::UnknownSymbol, "method call target '" + call.target + "'");
}

struct DirectInfo {
  std::set<std::string> reads;
  std::set<std::string> writes;
  bool creates_or_deletes = false;
  std::set<std::string> callees;  // qualified "Spec.fn"
};

void scan_body(const DataStructureSpec& spec, const FunctionDecl& fn,
               const std::vector<Statement>& body, DirectInfo& out) {
  for (const auto& s : body) {
    switch (s.kind) {
      case StmtKind::Read:
      case StmtKind::ArrayRead:
      case StmtKind::MapRead:
      case StmtKind::MapContains:
        out.reads.insert(qualify(spec.name, s.attr));
        break;
      case StmtKind::Update:
      case StmtKind::ArrayUpdate:
      case StmtKind::MapUpdate:
      case StmtKind::MapInsert:
      case StmtKind::MapErase:
        out.writes.insert(qualify(spec.name, s.attr));
        break;
      case StmtKind::Create:
      case StmtKind::Delete:
        out.creates_or_deletes = true;
        break;
      case StmtKind::MethodCall: {
        std::string callee_spec = call_target_spec(spec, fn, s);
        out.callees.insert(qualify(callee_spec, s.fn));
        break;
      }
      case StmtKind::Conditional:
        scan_body(spec, fn, s.then_body, out);
        scan_body(spec, fn, s.else_body, out);
        break;
      default: break;
    }
  }
}

void collect_expr_vars(const Expression& e, std::set<std::string>& out) {
  switch (e.kind) {
    case Expression::Kind::VarRef: out.insert(e.var); break;
    case Expression::Kind::Constant: break;
    case Expression::Kind::IsNullPtr: collect_expr_vars(*e.lhs, out); break;
    case Expression::Kind::Add:
    case Expression::Kind::Subtract:
    case Expression::Kind::Eq:
      collect_expr_vars(*e.lhs, out);
      collect_expr_vars(*e.rhs, out);
      break;
  }
}

using NascentSet = std::set<std::string>;

/// Walks a statement list; returns the fall-through state, or nullopt
/// when every path returns.
std::optional<NascentSet> nascent_walk(
    const std::vector<Statement>& body, NascentSet state,
    std::map<const Statement*, bool>& flags) {
  for (const auto& s : body) {
    switch (s.kind) {
      case StmtKind::Create: state.insert(s.dst); break;
      case StmtKind::Read:
      case StmtKind::ArrayRead:
      case StmtKind::MapRead:
      case StmtKind::MapContains:
        state.erase(s.dst);
        break;
      case StmtKind::Update:
      case StmtKind::ArrayUpdate:
      case StmtKind::MapUpdate:
      case StmtKind::MapInsert:
        // Stored into an attribute: published.
        state.erase(s.src);
        break;
      case StmtKind::Assign: {
        // Aliasing through an assignment both kills the destination and
        // conservatively publishes any referenced source.
        std::set<std::string> vars;
        collect_expr_vars(s.expr, vars);
        for (const auto& v : vars) state.erase(v);
        state.erase(s.dst);
        break;
      }
      case StmtKind::MethodCall: {
        flags[&s] = state.count(s.target) > 0;
        // Passing a nascent ref into a composed function counts as
        // publication; calling a method on it does not.
        for (const auto& a : s.args) state.erase(a);
        if (s.has_value) state.erase(s.dst);
        break;
      }
      case StmtKind::Delete:
        flags[&s] = state.count(s.src) > 0;
        state.erase(s.src);
        break;
      case StmtKind::Conditional: {
        auto then_state = nascent_walk(s.then_body, state, flags);
        auto else_state = nascent_walk(s.else_body, state, flags);
        if (!then_state && !else_state) return std::nullopt;
        if (!then_state) {
          state = std::move(*else_state);
        } else if (!else_state) {
          state = std::move(*then_state);
        } else {
          NascentSet merged;
          for (const auto& v : *then_state) {
            if (else_state->count(v)) merged.insert(v);
          }
          state = std::move(merged);
        }
        break;
      }
      case StmtKind::Return: return std::nullopt;
      default: break;
    }
  }
  return state;
}

}  // namespace

const FunctionRWInfo& RWSetTable::at(const std::string& spec_name,
                                     const std::string& fn_name) const {
  auto it = functions.find(qualify(spec_name, fn_name));
  if (it == functions.end()) {
    raise(ErrorCode::UnknownSymbol,
          "no rw info for '" + qualify(spec_name, fn_name) + "'");
  }
  return it->second;
}

bool RWSetTable::is_const_fn(const std::string& spec_name,
                             const std::string& fn_name) const {
  return at(spec_name, fn_name).is_const;
}

RWSetTable compute_rw_sets(const SpecPtr& spec) {
  std::map<std::string, DirectInfo> direct;
  for (const auto& s : all_specs(spec)) {
    for (const auto& [fn_name, fn] : s->functions) {
      DirectInfo info;
      scan_body(*s, fn, fn.body, info);
      direct.emplace(qualify(s->name, fn_name), std::move(info));
    }
  }

  RWSetTable table;
  for (const auto& [name, info] : direct) {
    FunctionRWInfo out;
    out.read_set = info.reads;
    out.write_set = info.writes;
    out.creates_or_deletes = info.creates_or_deletes;
    table.functions.emplace(name, std::move(out));
  }

  // Fixed point: union callee sets into callers until stable. The
  // attribute universe is finite, so this terminates.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [name, info] : table.functions) {
      for (const auto& callee : direct.at(name).callees) {
        auto it = table.functions.find(callee);
        if (it == table.functions.end()) {
          raise(ErrorCode::UnknownSymbol, "call to unknown '" + callee + "'");
        }
        const FunctionRWInfo& ci = it->second;
        for (const auto& r : ci.read_set) {
          changed |= info.read_set.insert(r).second;
        }
        for (const auto& w : ci.write_set) {
          changed |= info.write_set.insert(w).second;
        }
        if (ci.creates_or_deletes && !info.creates_or_deletes) {
          info.creates_or_deletes = true;
          changed = true;
        }
      }
    }
  }
  return table;
}

RWSetTable deduce_const(const SpecPtr& spec, RWSetTable rw) {
  (void)spec;
  for (auto& [name, info] : rw.functions) {
    info.is_const = info.write_set.empty() && !info.creates_or_deletes;
  }
  return rw;
}

std::map<const Statement*, bool> compute_nascent(const FunctionDecl& fn) {
  std::map<const Statement*, bool> flags;
  nascent_walk(fn.body, {}, flags);
  return flags;
}

RWSetTable analyze(const SpecPtr& spec) {
  RWSetTable table = deduce_const(spec, compute_rw_sets(spec));
  for (const auto& s : all_specs(spec)) {
    for (const auto& [_, fn] : s->functions) {
      auto flags = compute_nascent(fn);
      table.nascent.insert(flags.begin(), flags.end());
    }
  }
  return table;
}

std::string method_call_target_spec(const DataStructureSpec& spec,
                                    const FunctionDecl& fn,
                                    const Statement& call) {
  return call_target_spec(spec, fn, call);
}

std::set<std::string> direct_callees(const DataStructureSpec& spec,
                                     const FunctionDecl& fn) {
  DirectInfo info;
  scan_body(spec, fn, fn.body, info);
  return info.callees;
}

std::string dump_rw_table(const SpecPtr& spec, const RWSetTable& rw) {
  std::ostringstream os;
  auto join = [](const std::set<std::string>& set) {
    std::string out;
    for (const auto& s : set) {
      if (!out.empty()) out += ",";
      out += s;
    }
    return out;
  };
  for (const auto& s : all_specs(spec)) {
    for (const auto& [fn_name, fn] : s->functions) {
      const auto& info = rw.at(s->name, fn_name);
      os << "fn " << qualify(s->name, fn_name) << " const="
         << (info.is_const ? "true" : "false") << " R={" << join(info.read_set)
         << "} W={" << join(info.write_set) << "}\n";
    }
  }
  return os.str();
}

}  // namespace dcds
