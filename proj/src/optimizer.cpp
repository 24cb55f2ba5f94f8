#include "dcds/optimizer.hpp"

#include <functional>
#include <queue>
#include <sstream>

namespace dcds {

namespace {

void require_serial(const SpecPtr& spec) {
  if (spec->cc_injected) {
    raise(ErrorCode::AlreadyInjected,
          "optimizer passes run on serial specs only");
  }
}

void for_each_spec(DataStructureSpec& root,
                   const std::function<void(DataStructureSpec&)>& fn) {
  fn(root);
  for (auto& [_, inner] : root.composed) {
    for_each_spec(const_cast<DataStructureSpec&>(*inner), fn);
  }
}

/// Removes statements matched by `drop`, repairing emptied then
/// branches with a Nop so the branch invariant keeps holding.
bool filter_body(std::vector<Statement>& body,
                 const std::function<bool(const Statement&)>& drop) {
  bool changed = false;
  for (auto it = body.begin(); it != body.end();) {
    if (drop(*it)) {
      it = body.erase(it);
      changed = true;
      continue;
    }
    if (it->kind == StmtKind::Conditional) {
      changed |= filter_body(it->then_body, drop);
      changed |= filter_body(it->else_body, drop);
      if (it->then_body.empty()) {
        Statement nop;
        nop.kind = StmtKind::Nop;
        it->then_body.push_back(std::move(nop));
        changed = true;
      }
    }
    ++it;
  }
  return changed;
}

void transform_body(std::vector<Statement>& body,
                    const std::function<void(Statement&)>& fn) {
  for (auto& s : body) {
    fn(s);
    if (s.kind == StmtKind::Conditional) {
      transform_body(s.then_body, fn);
      transform_body(s.else_body, fn);
    }
  }
}

std::string qualify(const std::string& spec_name, const std::string& member) {
  return spec_name + "." + member;
}

bool in_any_read_set(const RWSetTable& rw, const std::string& qualified) {
  for (const auto& [_, info] : rw.functions) {
    if (info.read_set.count(qualified)) return true;
  }
  return false;
}

bool in_any_write_set(const RWSetTable& rw, const std::string& qualified) {
  for (const auto& [_, info] : rw.functions) {
    if (info.write_set.count(qualified)) return true;
  }
  return false;
}

}  // namespace

std::string PassReport::to_string() const {
  std::ostringstream os;
  os << "pass=" << pass << " removed_fns=[";
  for (size_t i = 0; i < removed_functions.size(); ++i) {
    if (i) os << ",";
    os << removed_functions[i];
  }
  os << "] removed_attrs=[";
  for (size_t i = 0; i < removed_attributes.size(); ++i) {
    if (i) os << ",";
    os << removed_attributes[i];
  }
  os << "]";
  if (!folded_attributes.empty()) {
    os << " folded=[";
    for (size_t i = 0; i < folded_attributes.size(); ++i) {
      if (i) os << ",";
      os << folded_attributes[i].first << "="
         << folded_attributes[i].second.to_string();
    }
    os << "]";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Pass 1: remove unused functions from composed types
// ---------------------------------------------------------------------------

SpecPtr prune_unused_functions(const SpecPtr& spec, const RWSetTable& rw,
                               PassReport* report) {
  (void)rw;
  require_serial(spec);
  auto out = clone_spec(*spec);

  // Qualified-name lookup over the cloned tree.
  std::map<std::string, const DataStructureSpec*> specs_by_name;
  for_each_spec(*out, [&](DataStructureSpec& s) {
    specs_by_name.emplace(s.name, &s);
  });

  // Usage counts of top-level functions are unknowable, so they are all
  // roots; only composed-type functions can be proven unused.
  std::set<std::string> reachable;
  std::queue<std::pair<const DataStructureSpec*, std::string>> queue;
  for (const auto& [fn_name, _] : out->functions) {
    queue.push({out.get(), fn_name});
  }
  while (!queue.empty()) {
    auto [owner, fn_name] = queue.front();
    queue.pop();
    if (!reachable.insert(qualify(owner->name, fn_name)).second) continue;
    const FunctionDecl* fn = owner->find_function(fn_name);
    for (const auto& callee : direct_callees(*owner, *fn)) {
      auto dot = callee.find('.');
      std::string callee_spec = callee.substr(0, dot);
      std::string callee_fn = callee.substr(dot + 1);
      auto it = specs_by_name.find(callee_spec);
      if (it != specs_by_name.end()) {
        queue.push({it->second, callee_fn});
      }
    }
  }

  for_each_spec(*out, [&](DataStructureSpec& s) {
    if (s.name == out->name) return;  // top level is never pruned
    for (auto it = s.functions.begin(); it != s.functions.end();) {
      if (!reachable.count(qualify(s.name, it->first))) {
        if (report) {
          report->removed_functions.push_back(qualify(s.name, it->first));
        }
        s.exposed.erase(it->first);
        it = s.functions.erase(it);
      } else {
        ++it;
      }
    }
  });
  if (report) report->pass = "prune_unused_functions";
  return out;
}

// ---------------------------------------------------------------------------
// Pass 2: remove unused attributes
// ---------------------------------------------------------------------------

SpecPtr remove_unused_attributes(const SpecPtr& spec, const RWSetTable& rw,
                                 PassReport* report) {
  require_serial(spec);
  auto out = clone_spec(*spec);

  // Embedded attributes serving as method-call targets never enter a
  // read or write set (the base reference is a construction-time
  // constant), but they are still in use.
  std::set<std::string> call_targets;
  std::function<void(const DataStructureSpec&, const std::vector<Statement>&)>
      collect = [&](const DataStructureSpec& s,
                    const std::vector<Statement>& body) {
        for (const auto& stmt : body) {
          if (stmt.kind == StmtKind::MethodCall &&
              s.find_attribute(stmt.target) != nullptr) {
            call_targets.insert(qualify(s.name, stmt.target));
          }
          if (stmt.kind == StmtKind::Conditional) {
            collect(s, stmt.then_body);
            collect(s, stmt.else_body);
          }
        }
      };
  for_each_spec(*out, [&](DataStructureSpec& s) {
    for (const auto& [_, fn] : s.functions) collect(s, fn.body);
  });

  for_each_spec(*out, [&](DataStructureSpec& s) {
    for (auto it = s.attributes.begin(); it != s.attributes.end();) {
      std::string q = qualify(s.name, it->name);
      if (!in_any_read_set(rw, q) && !in_any_write_set(rw, q) &&
          !call_targets.count(q)) {
        if (report) report->removed_attributes.push_back(q);
        it = s.attributes.erase(it);
      } else {
        ++it;
      }
    }
  });
  if (report) report->pass = "remove_unused_attributes";
  return out;
}

// ---------------------------------------------------------------------------
// Pass 3: convert read-only attributes to constants
// ---------------------------------------------------------------------------

SpecPtr fold_readonly_attributes(const SpecPtr& spec, const RWSetTable& rw,
                                 PassReport* report) {
  require_serial(spec);
  auto out = clone_spec(*spec);
  for_each_spec(*out, [&](DataStructureSpec& s) {
    std::vector<std::pair<std::string, Value>> folded;
    for (auto it = s.attributes.begin(); it != s.attributes.end();) {
      std::string q = qualify(s.name, it->name);
      // Only primitive attributes with literal defaults are
      // compile-time constants; read-only pointers stay intact.
      if (it->kind == AttrKind::Primitive && in_any_read_set(rw, q) &&
          !in_any_write_set(rw, q)) {
        folded.emplace_back(it->name, it->default_value);
        if (report) report->folded_attributes.emplace_back(q, it->default_value);
        it = s.attributes.erase(it);
      } else {
        ++it;
      }
    }
    if (folded.empty()) return;
    for (auto& [_, fn] : s.functions) {
      transform_body(fn.body, [&](Statement& stmt) {
        if (stmt.kind != StmtKind::Read) return;
        for (const auto& [attr_name, value] : folded) {
          if (stmt.attr == attr_name) {
            Statement repl;
            repl.kind = StmtKind::Assign;
            repl.dst = stmt.dst;
            repl.expr = Expression::constant_of(value);
            stmt = std::move(repl);
            return;
          }
        }
      });
    }
  });
  if (report) report->pass = "fold_readonly_attributes";
  return out;
}

// ---------------------------------------------------------------------------
// Pass 4: remove write-only attributes and their update statements
// ---------------------------------------------------------------------------

namespace {

bool is_write_stmt_on(const Statement& s, const std::string& attr) {
  switch (s.kind) {
    case StmtKind::Update:
    case StmtKind::ArrayUpdate:
    case StmtKind::MapUpdate:
    case StmtKind::MapInsert:
    case StmtKind::MapErase:
      return s.attr == attr;
    default: return false;
  }
}

}  // namespace

SpecPtr remove_writeonly_attributes(const SpecPtr& spec, const RWSetTable& rw,
                                    PassReport* report) {
  require_serial(spec);
  auto out = clone_spec(*spec);
  for_each_spec(*out, [&](DataStructureSpec& s) {
    std::vector<std::string> removed;
    for (auto it = s.attributes.begin(); it != s.attributes.end();) {
      std::string q = qualify(s.name, it->name);
      if (in_any_write_set(rw, q) && !in_any_read_set(rw, q)) {
        removed.push_back(it->name);
        if (report) report->removed_attributes.push_back(q);
        it = s.attributes.erase(it);
      } else {
        ++it;
      }
    }
    if (removed.empty()) return;
    for (auto& [_, fn] : s.functions) {
      filter_body(fn.body, [&](const Statement& stmt) {
        for (const auto& attr_name : removed) {
          if (is_write_stmt_on(stmt, attr_name)) return true;
        }
        return false;
      });
    }
  });

  // Dropping an update statement can leave a callee with no observable
  // effect at all; the call sites that write through it are then dead
  // as well (Fig.-3-style node->prev = x collapses entirely).
  RWSetTable fresh = compute_rw_sets(out);
  std::set<std::string> trivial;
  for_each_spec(*out, [&](DataStructureSpec& s) {
    for (const auto& [fn_name, fn] : s.functions) {
      const auto& info = fresh.at(s.name, fn_name);
      bool no_out_params = true;
      for (const auto& p : fn.params) {
        if (p.by_pointer) no_out_params = false;
      }
      if (info.read_set.empty() && info.write_set.empty() &&
          !info.creates_or_deletes && fn.return_type.tag == TypeTag::Void &&
          no_out_params) {
        trivial.insert(qualify(s.name, fn_name));
      }
    }
  });
  if (!trivial.empty()) {
    for_each_spec(*out, [&](DataStructureSpec& s) {
      for (auto& [_, fn] : s.functions) {
        filter_body(fn.body, [&](const Statement& stmt) {
          if (stmt.kind != StmtKind::MethodCall) return false;
          std::string callee_spec = method_call_target_spec(s, fn, stmt);
          return trivial.count(qualify(callee_spec, stmt.fn)) > 0;
        });
      }
    });
  }
  if (report) report->pass = "remove_writeonly_attributes";
  return out;
}

// ---------------------------------------------------------------------------
// Fixed-point driver
// ---------------------------------------------------------------------------

std::pair<SpecPtr, std::vector<PassReport>> optimize(const SpecPtr& spec) {
  require_serial(spec);
  using PassFn = SpecPtr (*)(const SpecPtr&, const RWSetTable&, PassReport*);
  static constexpr PassFn kPasses[] = {
      &prune_unused_functions,
      &remove_unused_attributes,
      &fold_readonly_attributes,
      &remove_writeonly_attributes,
  };

  SpecPtr current = spec;
  std::vector<PassReport> reports;
  for (int round = 1;; ++round) {
    bool changed = false;
    for (PassFn pass : kPasses) {
      RWSetTable rw = compute_rw_sets(current);
      PassReport report;
      report.iteration = round;
      SpecPtr next = pass(current, rw, &report);
      if (!equal(*next, *current)) changed = true;
      reports.push_back(std::move(report));
      current = std::move(next);
    }
    if (!changed) break;
  }
  return {current, std::move(reports)};
}

}  // namespace dcds
