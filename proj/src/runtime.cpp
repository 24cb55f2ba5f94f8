#include "dcds/runtime.hpp"

#include <algorithm>
#include <random>

namespace dcds {

// ---------------------------------------------------------------------------
// TableSchema / Table
// ---------------------------------------------------------------------------

bool TableSchema::operator==(const TableSchema& other) const {
  if (columns.size() != other.columns.size()) return false;
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name != other.columns[i].name ||
        !(columns[i].type == other.columns[i].type)) {
      return false;
    }
  }
  return true;
}

Table::Table(uint16_t id, std::string name, TableSchema schema,
             uint64_t chunk_rows)
    : id_(id), name_(std::move(name)), schema_(std::move(schema)),
      chunk_rows_(chunk_rows) {
  uint32_t offset = 0;
  for (auto& col : schema_.columns) {
    col.offset = offset;
    offset += col.type.byte_width();
  }
  schema_.record_size = std::max<uint32_t>(offset, 1);
}

const Column& Table::column(size_t index) const {
  if (index >= schema_.columns.size()) {
    raise(ErrorCode::InvalidColumn,
          "table '" + name_ + "' has no column #" + std::to_string(index));
  }
  return schema_.columns[index];
}

std::optional<size_t> Table::column_index(const std::string& name) const {
  for (size_t i = 0; i < schema_.columns.size(); ++i) {
    if (schema_.columns[i].name == name) return i;
  }
  return std::nullopt;
}

RecordRef Table::allocate() {
  uint64_t offset;
  {
    std::lock_guard<std::mutex> guard(alloc_mutex_);
    if (!free_list_.empty()) {
      offset = free_list_.back();
      free_list_.pop_back();
    } else {
      offset = next_fresh_++;
      if (offset >= chunk_count_.load() * chunk_rows_) {
        Chunk chunk;
        chunk.data =
            std::make_unique<std::byte[]>(chunk_rows_ * schema_.record_size);
        chunk.meta = std::make_unique<RowMeta[]>(chunk_rows_);
        chunks_.push_back(std::move(chunk));
        chunk_count_.store(chunks_.size(), std::memory_order_release);
      }
    }
  }
  std::byte* data = record_data(offset);
  std::memset(data, 0, schema_.record_size);
  set_live(offset, true);
  live_count_.fetch_add(1, std::memory_order_relaxed);
  // Offsets are 1-based in refs so that raw 0 stays the null reference
  // even for table slot 0.
  return RecordRef::make(id_, offset + 1);
}

RecordRef Table::allocate_block(uint64_t count) {
  if (count == 0) {
    raise(ErrorCode::InvalidState, "zero-length block allocation");
  }
  uint64_t base;
  {
    std::lock_guard<std::mutex> guard(alloc_mutex_);
    base = next_fresh_;
    next_fresh_ += count;
    while (next_fresh_ > chunk_count_.load() * chunk_rows_) {
      Chunk chunk;
      chunk.data =
          std::make_unique<std::byte[]>(chunk_rows_ * schema_.record_size);
      chunk.meta = std::make_unique<RowMeta[]>(chunk_rows_);
      chunks_.push_back(std::move(chunk));
      chunk_count_.store(chunks_.size(), std::memory_order_release);
    }
  }
  for (uint64_t i = 0; i < count; ++i) {
    std::memset(record_data(base + i), 0, schema_.record_size);
    set_live(base + i, true);
  }
  live_count_.fetch_add(count, std::memory_order_relaxed);
  return RecordRef::make(id_, base + 1);
}

void Table::free_slot(uint64_t offset) {
  check_offset(offset);
  std::lock_guard<std::mutex> guard(alloc_mutex_);
  free_list_.push_back(offset);
  live_count_.fetch_sub(1, std::memory_order_relaxed);
}

void Table::check_offset(uint64_t offset) const {
  if (offset >= chunk_count_.load(std::memory_order_acquire) * chunk_rows_) {
    raise(ErrorCode::InvalidRef,
          "slot " + std::to_string(offset) + " out of range in table '" +
              name_ + "'");
  }
}

bool Table::is_live(uint64_t offset) const {
  if (offset >= chunk_count_.load(std::memory_order_acquire) * chunk_rows_) {
    return false;
  }
  return chunks_[offset / chunk_rows_]
      .meta[offset % chunk_rows_]
      .live.load(std::memory_order_acquire);
}

void Table::set_live(uint64_t offset, bool live) {
  check_offset(offset);
  chunks_[offset / chunk_rows_]
      .meta[offset % chunk_rows_]
      .live.store(live, std::memory_order_release);
}

RowLock& Table::lock_of(uint64_t offset) {
  check_offset(offset);
  return chunks_[offset / chunk_rows_].meta[offset % chunk_rows_].lock;
}

std::byte* Table::record_data(uint64_t offset) {
  check_offset(offset);
  return chunks_[offset / chunk_rows_].data.get() +
         (offset % chunk_rows_) * schema_.record_size;
}

const std::byte* Table::record_data(uint64_t offset) const {
  check_offset(offset);
  return chunks_[offset / chunk_rows_].data.get() +
         (offset % chunk_rows_) * schema_.record_size;
}

std::string Table::read_bytes(uint64_t offset, size_t column) const {
  const Column& col = this->column(column);
  const std::byte* base = record_data(offset) + col.offset;
  return std::string(reinterpret_cast<const char*>(base),
                     col.type.byte_width());
}

void Table::write_bytes(uint64_t offset, size_t column,
                        const std::string& bytes) {
  const Column& col = this->column(column);
  if (bytes.size() != col.type.byte_width()) {
    raise(ErrorCode::InvalidState, "byte image size mismatch for column '" +
                                       col.name + "'");
  }
  std::memcpy(record_data(offset) + col.offset, bytes.data(), bytes.size());
}

Value Table::decode(uint64_t offset, size_t column) const {
  const Column& col = this->column(column);
  const std::byte* base = record_data(offset) + col.offset;
  switch (col.type.tag) {
    case TypeTag::I8: {
      int8_t v;
      std::memcpy(&v, base, sizeof v);
      return Value::of_int(col.type, v);
    }
    case TypeTag::I16: {
      int16_t v;
      std::memcpy(&v, base, sizeof v);
      return Value::of_int(col.type, v);
    }
    case TypeTag::I32: {
      int32_t v;
      std::memcpy(&v, base, sizeof v);
      return Value::of_int(col.type, v);
    }
    case TypeTag::I64: {
      int64_t v;
      std::memcpy(&v, base, sizeof v);
      return Value::of_int(col.type, v);
    }
    case TypeTag::F64: {
      double v;
      std::memcpy(&v, base, sizeof v);
      return Value::f64(v);
    }
    case TypeTag::Bool: {
      return Value::boolean(*reinterpret_cast<const char*>(base) != 0);
    }
    case TypeTag::FixedString: {
      const char* chars = reinterpret_cast<const char*>(base);
      size_t len = 0;
      while (len < col.type.string_len && chars[len] != '\0') ++len;
      return Value::string(col.type.string_len, std::string(chars, len));
    }
    case TypeTag::RecordPtr: {
      uint64_t raw;
      std::memcpy(&raw, base, sizeof raw);
      Value out;
      out.type = col.type;
      out.ref = RecordRef{raw};
      return out;
    }
    case TypeTag::Void: break;
  }
  raise(ErrorCode::InvalidState, "cannot decode void column");
}

std::string Table::encode(const Value& value, size_t column) const {
  const Column& col = this->column(column);
  std::string out(col.type.byte_width(), '\0');
  switch (col.type.tag) {
    case TypeTag::I8: {
      int8_t v = static_cast<int8_t>(value.i);
      std::memcpy(out.data(), &v, sizeof v);
      break;
    }
    case TypeTag::I16: {
      int16_t v = static_cast<int16_t>(value.i);
      std::memcpy(out.data(), &v, sizeof v);
      break;
    }
    case TypeTag::I32: {
      int32_t v = static_cast<int32_t>(value.i);
      std::memcpy(out.data(), &v, sizeof v);
      break;
    }
    case TypeTag::I64: {
      std::memcpy(out.data(), &value.i, sizeof value.i);
      break;
    }
    case TypeTag::F64: {
      std::memcpy(out.data(), &value.f, sizeof value.f);
      break;
    }
    case TypeTag::Bool: {
      out[0] = value.b ? char(1) : char(0);
      break;
    }
    case TypeTag::FixedString: {
      size_t n = std::min<size_t>(value.s.size(), col.type.string_len);
      std::memcpy(out.data(), value.s.data(), n);
      break;
    }
    case TypeTag::RecordPtr: {
      std::memcpy(out.data(), &value.ref.raw, sizeof value.ref.raw);
      break;
    }
    case TypeTag::Void:
      raise(ErrorCode::InvalidState, "cannot encode void value");
  }
  return out;
}

uint64_t Table::free_list_size() const {
  std::lock_guard<std::mutex> guard(alloc_mutex_);
  return free_list_.size();
}

uint64_t Table::allocated_rows() const {
  std::lock_guard<std::mutex> guard(alloc_mutex_);
  return next_fresh_;
}

// ---------------------------------------------------------------------------
// KeyIndex
// ---------------------------------------------------------------------------

bool KeyIndex::insert(const std::string& key, RecordRef ref) {
  std::lock_guard<std::mutex> guard(mutex_);
  return map_.emplace(key, ref.raw).second;
}

std::optional<RecordRef> KeyIndex::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> guard(mutex_);
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  return RecordRef{it->second};
}

std::optional<RecordRef> KeyIndex::erase(const std::string& key) {
  std::lock_guard<std::mutex> guard(mutex_);
  auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  RecordRef out{it->second};
  map_.erase(it);
  return out;
}

size_t KeyIndex::size() const {
  std::lock_guard<std::mutex> guard(mutex_);
  return map_.size();
}

std::vector<RecordRef> KeyIndex::values() const {
  std::lock_guard<std::mutex> guard(mutex_);
  std::vector<RecordRef> out;
  out.reserve(map_.size());
  for (const auto& [_, raw] : map_) out.push_back(RecordRef{raw});
  return out;
}

void KeyIndex::clear() {
  std::lock_guard<std::mutex> guard(mutex_);
  map_.clear();
}

// ---------------------------------------------------------------------------
// TableRegistry
// ---------------------------------------------------------------------------

TableRegistry& TableRegistry::instance() {
  static TableRegistry registry;
  return registry;
}

Table* TableRegistry::get_or_create(const std::string& ns,
                                    const std::string& name,
                                    const TableSchema& schema,
                                    uint64_t chunk_rows) {
  std::lock_guard<std::mutex> guard(mutex_);
  std::string key = ns + "::" + name;
  auto it = tables_.find(key);
  if (it != tables_.end()) {
    TableSchema existing = it->second->schema();
    TableSchema wanted = schema;
    // Compare declared columns only; offsets are layout detail.
    if (!(existing == wanted)) {
      raise(ErrorCode::SchemaConflict,
            "table '" + key + "' exists with a different schema");
    }
    return it->second.get();
  }
  // Table id 0 is reserved for the null reference.
  uint16_t id = static_cast<uint16_t>(by_id_.size() + 1);
  if (id > RecordRef::kMaxTableId) {
    raise(ErrorCode::CapacityExceeded, "table id space exhausted");
  }
  auto table = std::make_unique<Table>(id, key, schema, chunk_rows);
  Table* ptr = table.get();
  by_id_.push_back(ptr);
  tables_.emplace(std::move(key), std::move(table));
  return ptr;
}

Table* TableRegistry::find(const std::string& ns, const std::string& name) {
  std::lock_guard<std::mutex> guard(mutex_);
  auto it = tables_.find(ns + "::" + name);
  return it == tables_.end() ? nullptr : it->second.get();
}

Table* TableRegistry::by_id(uint16_t table_id) {
  std::lock_guard<std::mutex> guard(mutex_);
  if (table_id == 0 || table_id > by_id_.size()) return nullptr;
  return by_id_[table_id - 1];
}

KeyIndex* TableRegistry::create_key_index() {
  std::lock_guard<std::mutex> guard(mutex_);
  uint64_t id = indexes_.size() + 1;
  indexes_.push_back(std::make_unique<KeyIndex>(id));
  return indexes_.back().get();
}

KeyIndex* TableRegistry::key_index_by_id(uint64_t id) {
  std::lock_guard<std::mutex> guard(mutex_);
  if (id == 0 || id > indexes_.size()) return nullptr;
  return indexes_[id - 1].get();
}

// ---------------------------------------------------------------------------
// Transactions
// ---------------------------------------------------------------------------

bool TransactionContext::holds(RecordRef ref, LockMode mode) const {
  if (created.count(ref.raw)) return true;
  auto it = lock_set.find(ref.raw);
  if (it == lock_set.end()) return false;
  return mode == LockMode::Shared || it->second == LockMode::Exclusive;
}

std::unique_ptr<TransactionContext> TxnManager::begin_txn() {
  auto txn = std::make_unique<TransactionContext>();
  txn->id = next_txn_id_.fetch_add(1, std::memory_order_relaxed);
  txn->manager = this;
  return txn;
}

TryLockResult TxnManager::try_lock(TransactionContext& txn, RecordRef ref,
                                   LockMode mode) {
  if (ref.is_null()) {
    raise(ErrorCode::InvalidRef, "lock request on null reference");
  }
  if (txn.created.count(ref.raw)) return TryLockResult::Acquired;

  auto it = txn.lock_set.find(ref.raw);
  if (it != txn.lock_set.end() &&
      (mode == LockMode::Shared || it->second == LockMode::Exclusive)) {
    return TryLockResult::Acquired;
  }

  if (inject_conflict_probability > 0.0) {
    thread_local std::mt19937 rng(std::random_device{}());
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    if (dist(rng) < inject_conflict_probability) {
      stats_.lock_conflicts.fetch_add(1, std::memory_order_relaxed);
      return TryLockResult::Conflict;
    }
  }

  Table* table = TableRegistry::instance().by_id(ref.table_id());
  if (table == nullptr || !table->is_live(ref.offset() - 1)) {
    raise(ErrorCode::InvalidRef,
          "lock request on dead or unknown record " + std::to_string(ref.raw));
  }
  RowLock& lock = table->lock_of(ref.offset() - 1);

  bool ok;
  LockTrace::Event event;
  if (it != txn.lock_set.end()) {
    // Shared held, exclusive requested.
    ok = lock.try_upgrade();
    event = LockTrace::Event::Upgrade;
  } else if (mode == LockMode::Shared) {
    ok = lock.try_shared();
    event = LockTrace::Event::AcquireShared;
    if (ok) stats_.shared_acquired.fetch_add(1, std::memory_order_relaxed);
  } else {
    ok = lock.try_exclusive();
    event = LockTrace::Event::AcquireExclusive;
    if (ok) stats_.exclusive_acquired.fetch_add(1, std::memory_order_relaxed);
  }
  if (!ok) {
    stats_.lock_conflicts.fetch_add(1, std::memory_order_relaxed);
    return TryLockResult::Conflict;
  }
  txn.lock_set[ref.raw] = mode;
  if (trace) trace->record(txn.id, event, ref.raw);
  return TryLockResult::Acquired;
}

void TxnManager::release_all(TransactionContext& txn) {
  for (const auto& [raw, mode] : txn.lock_set) {
    RecordRef ref{raw};
    Table* table = TableRegistry::instance().by_id(ref.table_id());
    if (table == nullptr) continue;
    RowLock& lock = table->lock_of(ref.offset() - 1);
    if (mode == LockMode::Exclusive) {
      lock.release_exclusive();
    } else {
      lock.release_shared();
    }
  }
  if (trace && !txn.lock_set.empty()) {
    trace->record(txn.id, LockTrace::Event::ReleaseAll, 0);
  }
  txn.lock_set.clear();
}

TxnStatus TxnManager::end_txn(TransactionContext& txn, TxnOutcome outcome) {
  if (txn.status != TxnStatus::Active) {
    raise(ErrorCode::InvalidState, "end_txn on a finished transaction");
  }
  if (outcome == TxnOutcome::Commit) {
    release_all(txn);
    // Deleted rows become reusable only after their lock is gone and
    // the commit has made them unreachable.
    for (uint64_t raw : txn.pending_frees) {
      RecordRef ref{raw};
      table_of(ref).free_slot(ref.offset() - 1);
    }
    txn.pending_frees.clear();
    txn.undo_log.clear();
    txn.created.clear();
    txn.status = TxnStatus::Committed;
    stats_.commits.fetch_add(1, std::memory_order_relaxed);
    return txn.status;
  }

  // Abort: replay the undo log in reverse.
  std::map<std::pair<uint64_t, size_t>, std::string> first_images;
  if (verify_rollback) {
    for (const auto& e : txn.undo_log) {
      if (e.kind == UndoEntry::Kind::FieldWrite) {
        first_images.emplace(std::make_pair(e.ref.raw, e.column), e.old_bytes);
      }
    }
  }
  for (auto it = txn.undo_log.rbegin(); it != txn.undo_log.rend(); ++it) {
    switch (it->kind) {
      case UndoEntry::Kind::FieldWrite: {
        Table* table = TableRegistry::instance().by_id(it->ref.table_id());
        table->write_bytes(it->ref.offset() - 1, it->column, it->old_bytes);
        break;
      }
      case UndoEntry::Kind::RecordCreate: {
        Table* table = TableRegistry::instance().by_id(it->ref.table_id());
        table->set_live(it->ref.offset() - 1, false);
        table->free_slot(it->ref.offset() - 1);
        txn.created.erase(it->ref.raw);
        break;
      }
      case UndoEntry::Kind::RecordDelete: {
        Table* table = TableRegistry::instance().by_id(it->ref.table_id());
        std::byte* data = table->record_data(it->ref.offset() - 1);
        std::memcpy(data, it->old_bytes.data(), it->old_bytes.size());
        table->set_live(it->ref.offset() - 1, true);
        break;
      }
      case UndoEntry::Kind::IndexInsert: {
        it->index->erase(it->key);
        break;
      }
      case UndoEntry::Kind::IndexErase: {
        it->index->insert(it->key, it->old_value);
        break;
      }
    }
  }
  if (verify_rollback) {
    for (const auto& [key, image] : first_images) {
      RecordRef ref{key.first};
      Table* table = TableRegistry::instance().by_id(ref.table_id());
      if (table->read_bytes(ref.offset() - 1, key.second) == image) {
        stats_.verified_rollbacks.fetch_add(1, std::memory_order_relaxed);
      } else {
        stats_.rollback_mismatches.fetch_add(1, std::memory_order_relaxed);
      }
    }
  }
  txn.pending_frees.clear();
  txn.undo_log.clear();
  txn.created.clear();
  release_all(txn);
  txn.status = TxnStatus::Aborted;
  stats_.aborts.fetch_add(1, std::memory_order_relaxed);
  return txn.status;
}

TxnManager& get_or_create_txn_manager(const std::string& ns) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<TxnManager>> managers;
  std::lock_guard<std::mutex> guard(mutex);
  auto it = managers.find(ns);
  if (it == managers.end()) {
    it = managers.emplace(ns, std::make_unique<TxnManager>(ns)).first;
  }
  return *it->second;
}

// ---------------------------------------------------------------------------
// Storage operations
// ---------------------------------------------------------------------------

Table& table_of(RecordRef ref) {
  if (ref.is_null()) {
    raise(ErrorCode::InvalidRef, "null reference dereferenced");
  }
  Table* table = TableRegistry::instance().by_id(ref.table_id());
  if (table == nullptr) {
    raise(ErrorCode::InvalidRef,
          "unknown table id " + std::to_string(ref.table_id()));
  }
  return *table;
}

namespace {

void enforce_access(RecordRef ref, TransactionContext* txn, LockMode mode) {
  if (txn == nullptr) return;
  if (!txn->holds(ref, mode)) {
    raise(ErrorCode::LockProtocolViolation,
          std::string(mode == LockMode::Exclusive ? "write" : "read") +
              " of record " + std::to_string(ref.raw) +
              " without a sufficient lock");
  }
}

}  // namespace

Value read_field(RecordRef ref, size_t column, TransactionContext* txn,
                 bool enforce) {
  Table& table = table_of(ref);
  if (!table.is_live(ref.offset() - 1)) {
    raise(ErrorCode::InvalidRef,
          "read of dead record " + std::to_string(ref.raw));
  }
  if (enforce) enforce_access(ref, txn, LockMode::Shared);
  return table.decode(ref.offset() - 1, column);
}

void write_field(RecordRef ref, size_t column, const Value& value,
                 TransactionContext* txn, bool enforce) {
  Table& table = table_of(ref);
  if (!table.is_live(ref.offset() - 1)) {
    raise(ErrorCode::InvalidRef,
          "write of dead record " + std::to_string(ref.raw));
  }
  if (enforce) enforce_access(ref, txn, LockMode::Exclusive);
  if (txn != nullptr && !txn->created.count(ref.raw)) {
    UndoEntry entry;
    entry.kind = UndoEntry::Kind::FieldWrite;
    entry.ref = ref;
    entry.column = column;
    entry.old_bytes = table.read_bytes(ref.offset() - 1, column);
    txn->undo_log.push_back(std::move(entry));
  }
  table.write_bytes(ref.offset() - 1, column, table.encode(value, column));
}

RecordRef insert_record(Table& table, const std::vector<Value>& init,
                        TransactionContext* txn) {
  if (init.size() > table.column_count()) {
    raise(ErrorCode::ArityOrTypeMismatch,
          "too many initial values for table '" + table.name() + "'");
  }
  RecordRef ref = table.allocate();
  for (size_t i = 0; i < init.size(); ++i) {
    if (init[i].type.tag == TypeTag::Void) continue;  // keep zeroed default
    table.write_bytes(ref.offset() - 1, i, table.encode(init[i], i));
  }
  if (txn != nullptr) {
    txn->created.insert(ref.raw);
    UndoEntry entry;
    entry.kind = UndoEntry::Kind::RecordCreate;
    entry.ref = ref;
    txn->undo_log.push_back(std::move(entry));
    if (txn->manager && txn->manager->trace) {
      txn->manager->trace->record(txn->id, LockTrace::Event::Create, ref.raw);
    }
  }
  return ref;
}

void delete_record(RecordRef ref, TransactionContext* txn) {
  Table& table = table_of(ref);
  if (!table.is_live(ref.offset() - 1)) {
    raise(ErrorCode::InvalidRef,
          "delete of dead record " + std::to_string(ref.raw));
  }
  if (txn == nullptr) {
    table.set_live(ref.offset() - 1, false);
    table.free_slot(ref.offset() - 1);
    return;
  }
  if (txn->created.count(ref.raw)) {
    // Created and deleted in the same transaction: reclaim right away;
    // nobody else can have seen the record.
    txn->created.erase(ref.raw);
    for (auto it = txn->undo_log.begin(); it != txn->undo_log.end(); ++it) {
      if (it->kind == UndoEntry::Kind::RecordCreate && it->ref == ref) {
        txn->undo_log.erase(it);
        break;
      }
    }
    table.set_live(ref.offset() - 1, false);
    table.free_slot(ref.offset() - 1);
    return;
  }
  enforce_access(ref, txn, LockMode::Exclusive);
  UndoEntry entry;
  entry.kind = UndoEntry::Kind::RecordDelete;
  entry.ref = ref;
  const std::byte* data = table.record_data(ref.offset() - 1);
  entry.old_bytes.assign(reinterpret_cast<const char*>(data),
                         table.schema().record_size);
  txn->undo_log.push_back(std::move(entry));
  table.set_live(ref.offset() - 1, false);
  txn->pending_frees.push_back(ref.raw);
}

RecordRef array_element_ref(RecordRef base, int64_t index, uint64_t length) {
  if (base.is_null()) {
    raise(ErrorCode::InvalidRef, "array access through null base");
  }
  if (index < 0 || static_cast<uint64_t>(index) >= length) {
    raise(ErrorCode::IndexOutOfBounds,
          "index " + std::to_string(index) + " outside array of length " +
              std::to_string(length));
  }
  return RecordRef::make(base.table_id(), base.offset() + uint64_t(index));
}

bool index_insert(KeyIndex& index, const std::string& key, RecordRef ref,
                  TransactionContext* txn) {
  if (!index.insert(key, ref)) return false;
  if (txn != nullptr) {
    UndoEntry entry;
    entry.kind = UndoEntry::Kind::IndexInsert;
    entry.index = &index;
    entry.key = key;
    txn->undo_log.push_back(std::move(entry));
  }
  return true;
}

std::optional<RecordRef> index_lookup(KeyIndex& index, const std::string& key) {
  return index.lookup(key);
}

bool index_erase(KeyIndex& index, const std::string& key,
                 TransactionContext* txn) {
  auto old = index.erase(key);
  if (!old) return false;
  if (txn != nullptr) {
    UndoEntry entry;
    entry.kind = UndoEntry::Kind::IndexErase;
    entry.index = &index;
    entry.key = key;
    entry.old_value = *old;
    txn->undo_log.push_back(std::move(entry));
  }
  return true;
}

}  // namespace dcds
