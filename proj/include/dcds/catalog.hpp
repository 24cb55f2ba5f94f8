#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dcds/ir.hpp"

namespace dcds::catalog {

/// Doubly linked list of I64 values: Node{value, next, prev} with
/// accessors, LL{head, tail} with push_back/pop_front/push_front/
/// pop_back/empty, all exposed.
SpecPtr doubly_linked_list();

/// FIFO wrapper (MyCDS) embedding the doubly linked list and exposing
/// only push/pop; the optimizer specializes the list down to a singly
/// linked one.
SpecPtr fifo_mycds();

/// LRU container: doubly linked recency list + key-indexed map, with a
/// fixed capacity evicted from the tail on insert.
SpecPtr lru(int64_t capacity);

/// Fixed array of num_records item rows with num_columns I64 columns
/// each; exposed read_record/update_record touch all columns of one row.
SpecPtr ycsb(int64_t num_columns, int64_t num_records);

struct Entry {
  std::string name;
  std::function<SpecPtr()> build;
};

/// Default-parameter builders for the four specs, by bench name
/// (dll, fifo, lru, ycsb).
const std::vector<Entry>& entries();

struct Params {
  int64_t lru_capacity = 1024;
  int64_t ycsb_columns = 10;
  int64_t ycsb_records = 100000;
};

/// Builds the named structure's serial spec. Knows the bench aliases:
/// dll and fifo both build the FIFO wrapper (dll is the unoptimized
/// baseline), lru-coarse builds the LRU spec.
SpecPtr build_structure(const std::string& name, const Params& params = {});

}  // namespace dcds::catalog
