#pragma once

#include <atomic>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "dcds/types.hpp"

namespace dcds {

// ---------------------------------------------------------------------------
// Row lock: reader-writer try-lock with a sharer count, so a sole
// sharer can upgrade in place. Never blocks.
// ---------------------------------------------------------------------------

class RowLock {
 public:
  bool try_shared() {
    uint32_t cur = state_.load(std::memory_order_relaxed);
    while (!(cur & kWriter)) {
      if (state_.compare_exchange_weak(cur, cur + 1,
                                       std::memory_order_acquire,
                                       std::memory_order_relaxed)) {
        return true;
      }
    }
    return false;
  }

  bool try_exclusive() {
    uint32_t expected = 0;
    return state_.compare_exchange_strong(expected, kWriter,
                                          std::memory_order_acquire,
                                          std::memory_order_relaxed);
  }

  /// Caller must hold exactly one shared reference.
  bool try_upgrade() {
    uint32_t expected = 1;
    return state_.compare_exchange_strong(expected, kWriter,
                                          std::memory_order_acquire,
                                          std::memory_order_relaxed);
  }

  void release_shared() { state_.fetch_sub(1, std::memory_order_release); }
  void release_exclusive() { state_.store(0, std::memory_order_release); }

  uint32_t raw_state() const { return state_.load(std::memory_order_relaxed); }

 private:
  static constexpr uint32_t kWriter = 0x80000000u;
  std::atomic<uint32_t> state_{0};
};

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

struct Column {
  std::string name;
  ValueType type;
  uint32_t offset = 0;  // byte offset within the record
};

struct TableSchema {
  std::vector<Column> columns;  // offsets filled by Table
  uint32_t record_size = 0;

  void add(std::string name, ValueType type) {
    columns.push_back({std::move(name), std::move(type), 0});
  }
  bool operator==(const TableSchema& other) const;
};

/// Slotted fixed-size-record storage. Offsets are slot indexes; slots
/// are reused through a free list and storage grows in chunks so
/// existing references stay stable.
class Table {
 public:
  Table(uint16_t id, std::string name, TableSchema schema,
        uint64_t chunk_rows = 4096);

  uint16_t id() const { return id_; }
  const std::string& name() const { return name_; }
  const TableSchema& schema() const { return schema_; }
  size_t column_count() const { return schema_.columns.size(); }
  const Column& column(size_t index) const;
  std::optional<size_t> column_index(const std::string& name) const;

  /// Allocates a slot (reusing freed ones first) and zeroes it.
  RecordRef allocate();
  /// Allocates `count` slots with numerically contiguous offsets (fresh
  /// slots only, never from the free list).
  RecordRef allocate_block(uint64_t count);
  void free_slot(uint64_t offset);

  bool is_live(uint64_t offset) const;
  void set_live(uint64_t offset, bool live);
  RowLock& lock_of(uint64_t offset);

  std::byte* record_data(uint64_t offset);
  const std::byte* record_data(uint64_t offset) const;

  /// Raw column bytes (no lock enforcement).
  std::string read_bytes(uint64_t offset, size_t column) const;
  void write_bytes(uint64_t offset, size_t column, const std::string& bytes);

  Value decode(uint64_t offset, size_t column) const;
  std::string encode(const Value& value, size_t column) const;

  uint64_t live_rows() const { return live_count_.load(); }
  uint64_t free_list_size() const;
  uint64_t allocated_rows() const;

 private:
  struct RowMeta {
    RowLock lock;
    std::atomic<bool> live{false};
  };
  struct Chunk {
    std::unique_ptr<std::byte[]> data;
    std::unique_ptr<RowMeta[]> meta;
  };

  void check_offset(uint64_t offset) const;

  uint16_t id_;
  std::string name_;
  TableSchema schema_;
  uint64_t chunk_rows_;

  mutable std::mutex alloc_mutex_;
  std::vector<Chunk> chunks_;       // guarded growth; reads lock-free via
                                    // chunk_count_
  std::atomic<size_t> chunk_count_{0};
  uint64_t next_fresh_ = 0;         // first never-allocated slot
  std::vector<uint64_t> free_list_;
  std::atomic<uint64_t> live_count_{0};
};

// ---------------------------------------------------------------------------
// Key index (hash map from key bytes to a record reference)
// ---------------------------------------------------------------------------

class KeyIndex {
 public:
  explicit KeyIndex(uint64_t id) : id_(id) {}

  uint64_t id() const { return id_; }

  bool insert(const std::string& key, RecordRef ref);   // false: key exists
  std::optional<RecordRef> lookup(const std::string& key) const;
  std::optional<RecordRef> erase(const std::string& key);
  size_t size() const;
  std::vector<RecordRef> values() const;
  void clear();

 private:
  uint64_t id_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, uint64_t> map_;
};

// ---------------------------------------------------------------------------
// Registry: process-wide, namespaced tables and key indexes
// ---------------------------------------------------------------------------

class TableRegistry {
 public:
  static TableRegistry& instance();

  /// Idempotent per (namespace, name); an existing table with a
  /// different schema raises SchemaConflict.
  Table* get_or_create(const std::string& ns, const std::string& name,
                       const TableSchema& schema, uint64_t chunk_rows = 4096);
  Table* find(const std::string& ns, const std::string& name);
  Table* by_id(uint16_t table_id);

  KeyIndex* create_key_index();
  KeyIndex* key_index_by_id(uint64_t id);

 private:
  TableRegistry() = default;
  mutable std::mutex mutex_;
  std::map<std::string, std::unique_ptr<Table>> tables_;  // "ns::name"
  std::vector<Table*> by_id_;
  std::vector<std::unique_ptr<KeyIndex>> indexes_;
};

// ---------------------------------------------------------------------------
// Transactions
// ---------------------------------------------------------------------------

enum class TxnStatus { Active, Committed, Aborted };
enum class TxnOutcome { Commit, Abort };
enum class TryLockResult { Acquired, Conflict };

struct UndoEntry {
  enum class Kind {
    FieldWrite,
    RecordCreate,
    RecordDelete,
    IndexInsert,
    IndexErase,
  };
  Kind kind;
  RecordRef ref;
  size_t column = 0;
  std::string old_bytes;  // FieldWrite: column image; RecordDelete: full row
  KeyIndex* index = nullptr;
  std::string key;
  RecordRef old_value;
};

class TxnManager;

struct TransactionContext {
  uint64_t id = 0;
  TxnStatus status = TxnStatus::Active;
  std::map<uint64_t, LockMode> lock_set;  // raw ref -> mode
  std::set<uint64_t> created;             // records created by this txn
  std::vector<UndoEntry> undo_log;
  std::vector<uint64_t> pending_frees;    // deleted records, freed at commit
  TxnManager* manager = nullptr;

  bool holds(RecordRef ref, LockMode mode) const;
};

/// Collects lock/transaction events for protocol-conformance tests.
struct LockTrace {
  enum class Event : char {
    AcquireShared = 'S',
    AcquireExclusive = 'X',
    Upgrade = 'U',
    ReleaseAll = 'R',
    Create = 'C',
  };
  struct Entry {
    uint64_t txn_id;
    Event event;
    uint64_t ref_raw;
  };
  std::mutex mutex;
  std::vector<Entry> entries;

  void record(uint64_t txn_id, Event event, uint64_t ref_raw) {
    std::lock_guard<std::mutex> guard(mutex);
    entries.push_back({txn_id, event, ref_raw});
  }
};

struct TxnStats {
  std::atomic<uint64_t> commits{0};
  std::atomic<uint64_t> aborts{0};
  std::atomic<uint64_t> lock_conflicts{0};
  std::atomic<uint64_t> shared_acquired{0};
  std::atomic<uint64_t> exclusive_acquired{0};
  std::atomic<uint64_t> verified_rollbacks{0};
  std::atomic<uint64_t> rollback_mismatches{0};
};

class TxnManager {
 public:
  explicit TxnManager(std::string ns) : namespace_(std::move(ns)) {}

  const std::string& ns() const { return namespace_; }
  TxnStats& stats() { return stats_; }

  std::unique_ptr<TransactionContext> begin_txn();
  TxnStatus end_txn(TransactionContext& txn, TxnOutcome outcome);

  /// NO_WAIT: returns immediately. Re-requesting a held (or weaker)
  /// mode is a no-op Acquired; upgrade succeeds only for a sole sharer.
  TryLockResult try_lock(TransactionContext& txn, RecordRef ref,
                         LockMode mode);

  // Test hooks.
  LockTrace* trace = nullptr;
  double inject_conflict_probability = 0.0;
  bool verify_rollback = false;

 private:
  void release_all(TransactionContext& txn);

  std::string namespace_;
  std::atomic<uint64_t> next_txn_id_{1};
  TxnStats stats_;
};

/// Gets or creates the transaction manager of a namespace; idempotent
/// and thread-safe.
TxnManager& get_or_create_txn_manager(const std::string& ns = "default");

// ---------------------------------------------------------------------------
// Storage operations
// ---------------------------------------------------------------------------

/// Resolves a ref to its table; raises InvalidRef for unknown tables or
/// dead slots.
Table& table_of(RecordRef ref);

/// txn may be null (serial, non-transactional execution). When enforce
/// is set and a transaction is present, the caller must hold a
/// sufficient lock or have created the record in this transaction.
Value read_field(RecordRef ref, size_t column, TransactionContext* txn,
                 bool enforce = true);
void write_field(RecordRef ref, size_t column, const Value& value,
                 TransactionContext* txn, bool enforce = true);

RecordRef insert_record(Table& table, const std::vector<Value>& init,
                        TransactionContext* txn);
void delete_record(RecordRef ref, TransactionContext* txn);

/// Element reference into a pre-allocated fixed array: plain pointer
/// arithmetic with bounds checking.
RecordRef array_element_ref(RecordRef base, int64_t index, uint64_t length);

/// Index mutations are logged for rollback; lookups are point
/// consistent and rely on the subsequent row lock for transactional
/// consistency.
bool index_insert(KeyIndex& index, const std::string& key, RecordRef ref,
                  TransactionContext* txn);
std::optional<RecordRef> index_lookup(KeyIndex& index, const std::string& key);
bool index_erase(KeyIndex& index, const std::string& key,
                 TransactionContext* txn);

}  // namespace dcds
