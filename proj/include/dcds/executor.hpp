#pragma once

#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dcds/analysis.hpp"
#include "dcds/ir.hpp"
#include "dcds/runtime.hpp"

namespace dcds {

/// Thrown when a NO_WAIT lock request is denied; unwinds to the
/// transaction boundary where the executor aborts and retries.
struct ConflictException : std::exception {
  const char* what() const noexcept override { return "lock conflict"; }
};

enum class ExecMode {
  Transactional,  // cc-injected spec, per-call transactions with retry
  Serial,         // no transactions, no locks (single-threaded use)
  CoarseLocked,   // serial execution under one instance-wide mutex
};

struct InvokeResult {
  Value ret;
  std::map<std::string, Value> out_params;  // by-pointer params, post-commit
  uint64_t attempts = 1;
};

/// A live data structure instance: storage allocated from namespaced
/// tables, driven by interpreting the spec's function bodies.
class Instance {
 public:
  Instance(SpecPtr spec, std::string ns = "default",
           ExecMode mode = ExecMode::Transactional);
  ~Instance();

  Instance(const Instance&) = delete;
  Instance& operator=(const Instance&) = delete;

  const SpecPtr& spec() const { return spec_; }
  ExecMode mode() const { return mode_; }
  const std::string& ns() const { return ns_; }
  RecordRef root() const { return root_; }
  TxnManager& txn_manager() { return *manager_; }

  /// Calls an exposed function. Transactional mode retries aborted
  /// attempts with randomized exponential backoff until commit;
  /// by-pointer parameter values surface only after the commit.
  InvokeResult invoke(const std::string& fn, const std::vector<Value>& args);

  /// Frees every record reachable from the root and clears owned key
  /// indexes. The instance is unusable afterwards.
  void destroy();

  Table* table_for(const std::string& spec_name) const;

 private:
  struct Binding {
    const AttributeDecl* attr = nullptr;
    size_t column = 0;  // first column of the attribute
  };
  struct Layout {
    SpecPtr spec;
    Table* table = nullptr;
    std::map<std::string, Binding> bindings;
  };
  struct Frame {
    std::map<std::string, Value> vars;
  };

  const Layout& layout_of(const std::string& spec_name) const;
  RecordRef materialize(const Layout& layout, TransactionContext* txn);
  Value run_function(const Layout& layout, const FunctionDecl& fn,
                     RecordRef self, Frame& frame, TransactionContext* txn);
  std::optional<Value> run_body(const Layout& layout, const FunctionDecl& fn,
                                const std::vector<Statement>& body,
                                RecordRef self, Frame& frame,
                                TransactionContext* txn);
  Value eval(const Expression& expr, const Frame& frame) const;
  RecordRef resolve_target(const Layout& layout, const std::string& target,
                           RecordRef self, const Frame& frame,
                           TransactionContext* txn) const;
  Value once(const FunctionDecl& fn, const std::vector<Value>& args,
             Frame& frame, TransactionContext* txn);

  SpecPtr spec_;
  std::string ns_;
  ExecMode mode_;
  TxnManager* manager_;
  std::map<std::string, Layout> layouts_;
  RecordRef root_;
  std::mutex indexes_mutex_;
  std::vector<KeyIndex*> owned_indexes_;
  std::mutex coarse_mutex_;
  bool destroyed_ = false;
};

/// Randomized exponential backoff used between transaction retries:
/// base 1us, factor 2 per attempt, capped at 1ms, uniformly jittered.
/// Spins with yields; sleep granularity is far coarser than the cap.
void retry_backoff(uint64_t attempt, uint64_t seed);

}  // namespace dcds
