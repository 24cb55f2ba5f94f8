#include "dcds/types.hpp"

#include <cctype>
#include <sstream>

namespace dcds {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidIdentifier: return "InvalidIdentifier";
    case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorCode::DuplicateFunction: return "DuplicateFunction";
    case ErrorCode::DuplicateVariable: return "DuplicateVariable";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::CyclicEmbedding: return "CyclicEmbedding";
    case ErrorCode::MissingReturn: return "MissingReturn";
    case ErrorCode::EmptyThenBranch: return "EmptyThenBranch";
    case ErrorCode::UnknownExposedFunction: return "UnknownExposedFunction";
    case ErrorCode::AlreadyInjected: return "AlreadyInjected";
    case ErrorCode::NotInjected: return "NotInjected";
    case ErrorCode::InvalidRef: return "InvalidRef";
    case ErrorCode::InvalidColumn: return "InvalidColumn";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::LockProtocolViolation: return "LockProtocolViolation";
    case ErrorCode::SchemaConflict: return "SchemaConflict";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::ArityOrTypeMismatch: return "ArityOrTypeMismatch";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "UnknownError";
}

ValueType ValueType::fixed_string(uint32_t len) {
  if (len == 0) {
    raise(ErrorCode::TypeError, "FixedString length must be positive");
  }
  ValueType t;
  t.tag = TypeTag::FixedString;
  t.string_len = len;
  return t;
}

ValueType ValueType::record_ptr(std::string spec_name) {
  ValueType t;
  t.tag = TypeTag::RecordPtr;
  t.record_spec = std::move(spec_name);
  return t;
}

uint32_t ValueType::byte_width() const {
  switch (tag) {
    case TypeTag::I8: return 1;
    case TypeTag::I16: return 2;
    case TypeTag::I32: return 4;
    case TypeTag::I64: return 8;
    case TypeTag::F64: return 8;
    case TypeTag::Bool: return 1;
    case TypeTag::FixedString: return string_len;
    case TypeTag::RecordPtr: return 8;
    case TypeTag::Void: return 0;
  }
  return 0;
}

std::string ValueType::to_string() const {
  switch (tag) {
    case TypeTag::I8: return "i8";
    case TypeTag::I16: return "i16";
    case TypeTag::I32: return "i32";
    case TypeTag::I64: return "i64";
    case TypeTag::F64: return "f64";
    case TypeTag::Bool: return "bool";
    case TypeTag::Void: return "void";
    case TypeTag::FixedString:
      return "string[" + std::to_string(string_len) + "]";
    case TypeTag::RecordPtr: return "ptr<" + record_spec + ">";
  }
  return "?";
}

Value Value::zero_of(const ValueType& t) {
  Value v;
  v.type = t;
  if (t.tag == TypeTag::FixedString) {
    v.s = std::string();
  }
  return v;
}

std::string Value::to_string() const {
  switch (type.tag) {
    case TypeTag::I8:
    case TypeTag::I16:
    case TypeTag::I32:
    case TypeTag::I64: return std::to_string(i);
    case TypeTag::F64: {
      std::ostringstream os;
      os << f;
      return os.str();
    }
    case TypeTag::Bool: return b ? "true" : "false";
    case TypeTag::FixedString: return "\"" + s + "\"";
    case TypeTag::RecordPtr: {
      if (ref.is_null()) return "null";
      std::ostringstream os;
      os << "ref(" << ref.table_id() << "," << ref.offset() << ")";
      return os.str();
    }
    case TypeTag::Void: return "void";
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  if (!(a.type == b.type)) return false;
  switch (a.type.tag) {
    case TypeTag::I8:
    case TypeTag::I16:
    case TypeTag::I32:
    case TypeTag::I64: return a.i == b.i;
    case TypeTag::F64: return a.f == b.f;
    case TypeTag::Bool: return a.b == b.b;
    case TypeTag::FixedString: return a.s == b.s;
    case TypeTag::RecordPtr: return a.ref == b.ref;
    case TypeTag::Void: return true;
  }
  return false;
}

bool assignable(const ValueType& dst, const ValueType& src) {
  if (dst.tag != src.tag) return false;
  if (dst.tag == TypeTag::FixedString) return dst.string_len == src.string_len;
  if (dst.tag == TypeTag::RecordPtr) {
    // An empty spec name acts as the untyped null literal.
    return dst.record_spec == src.record_spec || src.record_spec.empty() ||
           dst.record_spec.empty();
  }
  return true;
}

bool is_valid_identifier(const std::string& name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') {
    return false;
  }
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

}  // namespace dcds
