#pragma once

#include <cstdint>
#include <string>

#include "dcds/error.hpp"

namespace dcds {

enum class TypeTag : uint8_t {
  I8,
  I16,
  I32,
  I64,
  F64,
  FixedString,
  RecordPtr,
  Bool,
  Void,
};

/// Attribute/variable type. FixedString carries its byte length,
/// RecordPtr the name of the spec it points to.
struct ValueType {
  TypeTag tag = TypeTag::Void;
  uint32_t string_len = 0;    // FixedString only
  std::string record_spec;    // RecordPtr only

  static ValueType of(TypeTag t) {
    ValueType v;
    v.tag = t;
    return v;
  }
  static ValueType i8() { return of(TypeTag::I8); }
  static ValueType i16() { return of(TypeTag::I16); }
  static ValueType i32() { return of(TypeTag::I32); }
  static ValueType i64() { return of(TypeTag::I64); }
  static ValueType f64() { return of(TypeTag::F64); }
  static ValueType boolean() { return of(TypeTag::Bool); }
  static ValueType void_t() { return of(TypeTag::Void); }
  static ValueType fixed_string(uint32_t len);
  static ValueType record_ptr(std::string spec_name);

  bool is_integer() const {
    return tag == TypeTag::I8 || tag == TypeTag::I16 || tag == TypeTag::I32 ||
           tag == TypeTag::I64;
  }
  bool is_record_ptr() const { return tag == TypeTag::RecordPtr; }

  /// Column width in bytes in the storage layer.
  uint32_t byte_width() const;

  std::string to_string() const;

  friend bool operator==(const ValueType& a, const ValueType& b) {
    return a.tag == b.tag && a.string_len == b.string_len &&
           a.record_spec == b.record_spec;
  }
};

/// Packed 64-bit physical record reference: 16-bit table id in the top
/// bits, 48-bit slot offset in the low bits. Raw value 0 is the null
/// reference (table id 0 is reserved).
struct RecordRef {
  uint64_t raw = 0;

  static constexpr uint64_t kOffsetMask = (uint64_t(1) << 48) - 1;
  static constexpr uint64_t kMaxOffset = kOffsetMask;
  static constexpr uint16_t kMaxTableId = 0xFFFF;

  static RecordRef null() { return RecordRef{}; }
  static RecordRef make(uint16_t table_id, uint64_t offset) {
    if (offset > kMaxOffset) {
      raise(ErrorCode::CapacityExceeded, "record offset exceeds 48 bits");
    }
    return RecordRef{(uint64_t(table_id) << 48) | offset};
  }

  uint16_t table_id() const { return uint16_t(raw >> 48); }
  uint64_t offset() const { return raw & kOffsetMask; }
  bool is_null() const { return raw == 0; }

  friend bool operator==(RecordRef a, RecordRef b) { return a.raw == b.raw; }
  friend bool operator<(RecordRef a, RecordRef b) { return a.raw < b.raw; }
};

/// Tagged runtime value. Integers of all widths share the i64 slot; the
/// tag records the declared width for type checks and storage encoding.
struct Value {
  ValueType type;
  int64_t i = 0;
  double f = 0.0;
  bool b = false;
  std::string s;      // FixedString payload
  RecordRef ref;

  Value() : type(ValueType::void_t()) {}

  static Value of_int(ValueType t, int64_t v) {
    Value out;
    out.type = t;
    out.i = v;
    return out;
  }
  static Value i64(int64_t v) { return of_int(ValueType::i64(), v); }
  static Value f64(double v) {
    Value out;
    out.type = ValueType::f64();
    out.f = v;
    return out;
  }
  static Value boolean(bool v) {
    Value out;
    out.type = ValueType::boolean();
    out.b = v;
    return out;
  }
  static Value string(uint32_t len, std::string payload) {
    Value out;
    out.type = ValueType::fixed_string(len);
    out.s = std::move(payload);
    return out;
  }
  static Value record(std::string spec_name, RecordRef r) {
    Value out;
    out.type = ValueType::record_ptr(std::move(spec_name));
    out.ref = r;
    return out;
  }
  static Value null_record(std::string spec_name) {
    return record(std::move(spec_name), RecordRef::null());
  }
  static Value void_v() { return Value(); }

  /// Zero/default value of a given type.
  static Value zero_of(const ValueType& t);

  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
};

enum class LockMode : uint8_t { Shared, Exclusive };

/// Type compatibility for assignment: exact tag match; RecordPtr must
/// name the same spec (or either side may be a null literal).
bool assignable(const ValueType& dst, const ValueType& src);

bool is_valid_identifier(const std::string& name);

}  // namespace dcds
