#include <doctest.h>

#include <random>

#include "dcds/types.hpp"

using namespace dcds;

TEST_CASE("record ref packs table id into the top 16 bits") {
  RecordRef r = RecordRef::make(3, 7);
  CHECK(r.raw == 0x0003000000000007ull);
  CHECK(r.table_id() == 3);
  CHECK(r.offset() == 7);
}

TEST_CASE("record ref boundary values roundtrip") {
  struct Case {
    uint16_t table;
    uint64_t offset;
  };
  const Case cases[] = {
      {0, 0},
      {0, RecordRef::kMaxOffset},
      {RecordRef::kMaxTableId, 0},
      {RecordRef::kMaxTableId, RecordRef::kMaxOffset},
      {1, 1},
  };
  for (const Case& c : cases) {
    RecordRef r = RecordRef::make(c.table, c.offset);
    CHECK(r.table_id() == c.table);
    CHECK(r.offset() == c.offset);
  }
  CHECK(RecordRef::make(0xFFFF, RecordRef::kMaxOffset).raw ==
        0xFFFFFFFFFFFFFFFFull);
}

TEST_CASE("record ref random roundtrip") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 20000; ++i) {
    uint16_t table = uint16_t(rng());
    uint64_t offset = rng() & RecordRef::kOffsetMask;
    RecordRef r = RecordRef::make(table, offset);
    CHECK(r.table_id() == table);
    CHECK(r.offset() == offset);
  }
}

TEST_CASE("record ref rejects offsets beyond 48 bits") {
  CHECK_THROWS_AS(RecordRef::make(1, RecordRef::kMaxOffset + 1), Error);
}

TEST_CASE("raw zero is the null reference") {
  CHECK(RecordRef::null().is_null());
  CHECK(RecordRef{}.raw == 0);
  CHECK_FALSE(RecordRef::make(1, 1).is_null());
}

TEST_CASE("value type byte widths match storage layout") {
  CHECK(ValueType::i8().byte_width() == 1);
  CHECK(ValueType::i16().byte_width() == 2);
  CHECK(ValueType::i32().byte_width() == 4);
  CHECK(ValueType::i64().byte_width() == 8);
  CHECK(ValueType::f64().byte_width() == 8);
  CHECK(ValueType::boolean().byte_width() == 1);
  CHECK(ValueType::record_ptr("Node").byte_width() == 8);
  CHECK(ValueType::fixed_string(16).byte_width() == 16);
}

TEST_CASE("fixed string length must be positive") {
  CHECK_THROWS_AS(ValueType::fixed_string(0), Error);
}

TEST_CASE("assignability is exact on tags and ptr specs") {
  CHECK(assignable(ValueType::i64(), ValueType::i64()));
  CHECK_FALSE(assignable(ValueType::i64(), ValueType::i32()));
  CHECK(assignable(ValueType::record_ptr("Node"), ValueType::record_ptr("Node")));
  CHECK_FALSE(
      assignable(ValueType::record_ptr("Node"), ValueType::record_ptr("LL")));
  CHECK_FALSE(assignable(ValueType::boolean(), ValueType::i64()));
}

TEST_CASE("identifier validation") {
  CHECK(is_valid_identifier("LinkedList"));
  CHECK(is_valid_identifier("t_node"));
  CHECK(is_valid_identifier("_x9"));
  CHECK_FALSE(is_valid_identifier(""));
  CHECK_FALSE(is_valid_identifier("9abc"));
  CHECK_FALSE(is_valid_identifier("a-b"));
  CHECK_FALSE(is_valid_identifier("a b"));
}

TEST_CASE("zero_of yields the default of each type") {
  CHECK(Value::zero_of(ValueType::i64()) == Value::i64(0));
  CHECK(Value::zero_of(ValueType::boolean()) == Value::boolean(false));
  Value p = Value::zero_of(ValueType::record_ptr("Node"));
  CHECK(p.ref.is_null());
  CHECK(p.type.record_spec == "Node");
}
