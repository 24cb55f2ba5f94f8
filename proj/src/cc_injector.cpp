#include "dcds/cc_injector.hpp"

#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace dcds {

namespace {

using HeldMap = std::map<std::string, LockMode>;

bool sufficient(std::optional<LockMode> held, LockMode needed) {
  if (!held) return false;
  return needed == LockMode::Shared || *held == LockMode::Exclusive;
}

std::optional<LockMode> lookup(const HeldMap& held, const std::string& target) {
  auto it = held.find(target);
  if (it == held.end()) return std::nullopt;
  return it->second;
}

HeldMap merge_held(const HeldMap& a, const HeldMap& b) {
  HeldMap out;
  for (const auto& [target, mode] : a) {
    auto it = b.find(target);
    if (it == b.end()) continue;
    out.emplace(target, mode == LockMode::Exclusive &&
                                it->second == LockMode::Exclusive
                            ? LockMode::Exclusive
                            : LockMode::Shared);
  }
  return out;
}

/// Lock requirement of one (non-lock) statement, if any.
struct Requirement {
  std::string target;
  LockMode mode;
};

std::optional<Requirement> lock_requirement(const DataStructureSpec& spec,
                                            const FunctionDecl& fn,
                                            const Statement& s,
                                            const RWSetTable& rw) {
  switch (s.kind) {
    case StmtKind::Read: {
      const AttributeDecl* a = spec.find_attribute(s.attr);
      // Embedded references are resolved at construction and never
      // change, so reading one bypasses CC.
      if (a && a->kind == AttrKind::ComposedEmbedded) return std::nullopt;
      return Requirement{kSelfTarget, LockMode::Shared};
    }
    case StmtKind::ArrayRead: {
      const AttributeDecl* a = spec.find_attribute(s.attr);
      // Computing an element reference is pointer arithmetic on the
      // constant base pointer.
      if (a && a->type.is_record_ptr()) return std::nullopt;
      return Requirement{kSelfTarget, LockMode::Shared};
    }
    case StmtKind::MapRead:
    case StmtKind::MapContains:
      return Requirement{kSelfTarget, LockMode::Shared};
    case StmtKind::Update:
    case StmtKind::ArrayUpdate:
    case StmtKind::MapUpdate:
    case StmtKind::MapInsert:
    case StmtKind::MapErase:
      return Requirement{kSelfTarget, LockMode::Exclusive};
    case StmtKind::Delete: {
      auto it = rw.nascent.find(&s);
      if (it != rw.nascent.end() && it->second) return std::nullopt;
      return Requirement{s.src, LockMode::Exclusive};
    }
    case StmtKind::MethodCall: {
      auto it = rw.nascent.find(&s);
      if (it != rw.nascent.end() && it->second) return std::nullopt;
      std::string callee_spec = method_call_target_spec(spec, fn, s);
      bool is_const = rw.is_const_fn(callee_spec, s.fn);
      return Requirement{s.target,
                         is_const ? LockMode::Shared : LockMode::Exclusive};
    }
    default: return std::nullopt;
  }
}

/// Variable written by a statement, if any; a rebound variable no
/// longer names the record a previous acquire covered.
std::string written_var(const Statement& s) {
  switch (s.kind) {
    case StmtKind::Read:
    case StmtKind::ArrayRead:
    case StmtKind::MapRead:
    case StmtKind::MapContains:
    case StmtKind::Create:
    case StmtKind::Assign:
      return s.dst;
    case StmtKind::MethodCall: return s.has_value ? s.dst : "";
    default: return "";
  }
}

Statement make_lock(StmtKind kind, const std::string& target) {
  Statement s;
  s.kind = kind;
  s.target = target;
  return s;
}

class Injector {
 public:
  Injector(const DataStructureSpec& spec, const RWSetTable& rw)
      : spec_(spec), rw_(rw) {}

  std::vector<Statement> inject_function(const FunctionDecl& fn,
                                         bool is_transaction_scope) {
    fn_ = &fn;
    HeldMap held;
    if (!is_transaction_scope) {
      // Composed functions run under the lock their call site takes on
      // the target record.
      held.emplace(kSelfTarget, rw_.is_const_fn(spec_.name, fn.name)
                                    ? LockMode::Shared
                                    : LockMode::Exclusive);
    }
    return inject_body(fn.body, held);
  }

 private:
  std::vector<Statement> inject_body(const std::vector<Statement>& body,
                                     HeldMap& held) {
    std::vector<Statement> out;
    for (const auto& s : body) {
      if (s.kind == StmtKind::Return) {
        out.push_back(make_lock(StmtKind::ReleaseAll, ""));
        out.push_back(s);
        continue;
      }
      if (auto req = lock_requirement(spec_, *fn_, s, rw_)) {
        auto current = lookup(held, req->target);
        if (!sufficient(current, req->mode)) {
          if (current && *current == LockMode::Shared &&
              req->mode == LockMode::Exclusive) {
            out.push_back(make_lock(StmtKind::Upgrade, req->target));
          } else {
            out.push_back(make_lock(req->mode == LockMode::Shared
                                        ? StmtKind::AcquireShared
                                        : StmtKind::AcquireExclusive,
                                    req->target));
          }
          held[req->target] = req->mode;
        }
      }
      if (s.kind == StmtKind::Conditional) {
        Statement cond = s;
        HeldMap then_held = held;
        HeldMap else_held = held;
        cond.then_body = inject_body(s.then_body, then_held);
        cond.else_body = inject_body(s.else_body, else_held);
        held = merge_held(then_held, else_held);
        out.push_back(std::move(cond));
      } else {
        out.push_back(s);
      }
      std::string rebound = written_var(s);
      if (!rebound.empty()) held.erase(rebound);
    }
    return out;
  }

  const DataStructureSpec& spec_;
  const RWSetTable& rw_;
  const FunctionDecl* fn_ = nullptr;
};

void for_each_spec_mut(DataStructureSpec& root,
                       const std::function<void(DataStructureSpec&, bool)>& fn,
                       bool is_root = true) {
  fn(root, is_root);
  for (auto& [_, inner] : root.composed) {
    for_each_spec_mut(const_cast<DataStructureSpec&>(*inner), fn, false);
  }
}

void strip_locks(std::vector<Statement>& body) {
  for (auto it = body.begin(); it != body.end();) {
    if (it->is_lock()) {
      it = body.erase(it);
      continue;
    }
    if (it->kind == StmtKind::Conditional) {
      strip_locks(it->then_body);
      strip_locks(it->else_body);
    }
    ++it;
  }
}

}  // namespace

SpecPtr inject_cc(const SpecPtr& spec, const RWSetTable& rw) {
  if (spec->cc_injected) {
    raise(ErrorCode::AlreadyInjected, "spec '" + spec->name + "'");
  }
  auto out = clone_spec(*spec);
  // The rw table's nascent flags are keyed by statement identity in the
  // *input* spec, so injection walks the input bodies and writes the
  // transformed bodies into the clone.
  std::vector<const DataStructureSpec*> originals;
  {
    std::set<std::string> seen;
    std::function<void(const DataStructureSpec&)> collect =
        [&](const DataStructureSpec& s) {
          if (!seen.insert(s.name).second) return;
          originals.push_back(&s);
          for (const auto& [_, inner] : s.composed) collect(*inner);
        };
    collect(*spec);
  }
  auto find_original = [&](const std::string& name) {
    for (const auto* s : originals) {
      if (s->name == name) return s;
    }
    raise(ErrorCode::UnknownSymbol, "spec '" + name + "'");
  };

  for_each_spec_mut(*out, [&](DataStructureSpec& s, bool is_root) {
    const DataStructureSpec* original = find_original(s.name);
    Injector injector(*original, rw);
    for (auto& [fn_name, fn] : s.functions) {
      const FunctionDecl* original_fn = original->find_function(fn_name);
      fn.body = injector.inject_function(*original_fn, is_root);
    }
    s.cc_injected = true;
  });
  return out;
}

SpecPtr strip_cc(const SpecPtr& spec) {
  auto out = clone_spec(*spec);
  for_each_spec_mut(*out, [&](DataStructureSpec& s, bool) {
    for (auto& [_, fn] : s.functions) {
      strip_locks(fn.body);
    }
    s.cc_injected = false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Static protocol checks
// ---------------------------------------------------------------------------

namespace {

using Path = std::vector<const Statement*>;

void expand(const std::vector<Statement>& body, size_t index, Path prefix,
            std::vector<Path>& out,
            const std::vector<const std::vector<Statement>*>& continuations,
            const std::vector<size_t>& continuation_indices) {
  for (size_t i = index; i < body.size(); ++i) {
    const Statement& s = body[i];
    if (s.kind == StmtKind::Conditional) {
      for (const auto* branch : {&s.then_body, &s.else_body}) {
        auto conts = continuations;
        auto cont_idx = continuation_indices;
        conts.push_back(&body);
        cont_idx.push_back(i + 1);
        expand(*branch, 0, prefix, out, conts, cont_idx);
      }
      return;
    }
    prefix.push_back(&s);
    if (s.kind == StmtKind::Return) {
      out.push_back(std::move(prefix));
      return;
    }
  }
  if (continuations.empty()) {
    out.push_back(std::move(prefix));
    return;
  }
  auto conts = continuations;
  auto cont_idx = continuation_indices;
  const std::vector<Statement>* next = conts.back();
  size_t next_index = cont_idx.back();
  conts.pop_back();
  cont_idx.pop_back();
  expand(*next, next_index, std::move(prefix), out, conts, cont_idx);
}

std::vector<Path> paths_of(const std::vector<Statement>& body) {
  std::vector<Path> out;
  expand(body, 0, {}, out, {}, {});
  return out;
}

}  // namespace

std::string check_cc_protocol(const SpecPtr& spec) {
  if (!spec->cc_injected) {
    raise(ErrorCode::NotInjected, "spec '" + spec->name + "'");
  }
  RWSetTable rw = analyze(spec);
  std::ostringstream issue;

  for (const auto& s : all_specs(spec)) {
    bool is_root = s->name == spec->name;
    for (const auto& [fn_name, fn] : s->functions) {
      auto fail = [&](const std::string& what) {
        issue << s->name << "." << fn_name << ": " << what;
        return issue.str();
      };
      for (const Path& path : paths_of(fn.body)) {
        HeldMap held;
        if (!is_root) {
          held.emplace(kSelfTarget, rw.is_const_fn(s->name, fn_name)
                                        ? LockMode::Shared
                                        : LockMode::Exclusive);
        }
        bool released = false;
        int release_count = 0;
        for (size_t i = 0; i < path.size(); ++i) {
          const Statement& st = *path[i];
          switch (st.kind) {
            case StmtKind::ReleaseAll: {
              ++release_count;
              released = true;
              bool next_is_return =
                  i + 1 < path.size() && path[i + 1]->kind == StmtKind::Return;
              if (!next_is_return) {
                return fail("ReleaseAll not immediately before Return");
              }
              break;
            }
            case StmtKind::AcquireShared:
            case StmtKind::AcquireExclusive:
            case StmtKind::Upgrade: {
              if (released) return fail("acquire after ReleaseAll");
              // An upgrade on a path that already holds the lock
              // exclusively is a no-op re-request at runtime, so any
              // hold satisfies it; only an upgrade from nothing is a
              // protocol violation.
              if (st.kind == StmtKind::Upgrade && !lookup(held, st.target)) {
                return fail("upgrade of '" + st.target + "' without a hold");
              }
              held[st.target] = st.kind == StmtKind::AcquireShared
                                    ? LockMode::Shared
                                    : LockMode::Exclusive;
              break;
            }
            default: {
              if (auto req = lock_requirement(*s, fn, st, rw)) {
                if (!sufficient(lookup(held, req->target), req->mode)) {
                  return fail("statement not covered by a lock on '" +
                              req->target + "'");
                }
              }
              std::string rebound = written_var(st);
              if (!rebound.empty()) held.erase(rebound);
              break;
            }
          }
        }
        bool path_returns =
            !path.empty() && path.back()->kind == StmtKind::Return;
        if (path_returns && release_count != 1) {
          return fail("path has " + std::to_string(release_count) +
                      " ReleaseAll statements");
        }
      }
    }
  }
  return "";
}

}  // namespace dcds
