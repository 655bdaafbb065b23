#include <charconv>
#include <cmath>

#include "hlweave/interp.hpp"

namespace hlweave {

namespace {

std::string format_float(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string join_repr(const std::vector<Value>& items, const std::vector<std::string>* names) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    if (names && !names->empty()) out += (*names)[i] + " = ";
    out += repr(items[i]);
  }
  return out;
}

}  // namespace

Value make_array(std::vector<Value> items) {
  auto a = std::make_shared<ArrayObj>();
  a->items = std::move(items);
  return Value(std::move(a));
}

Value make_error(std::string message) {
  auto e = std::make_shared<ErrorObj>();
  e->message = std::move(message);
  return Value(std::move(e));
}

std::string display(const Value& v) {
  if (v.is<std::string>()) return v.as<std::string>();
  return repr(v);
}

std::string repr(const Value& value) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Nil>) {
          return "nothing";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_float(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote(x);
        } else if constexpr (std::is_same_v<T, std::shared_ptr<ArrayObj>>) {
          return "[" + join_repr(x->items, nullptr) + "]";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<TupleObj>>) {
          if (x->items.size() == 1) {
            return "(" + join_repr(x->items, &x->names) + ",)";
          }
          return "(" + join_repr(x->items, &x->names) + ")";
        } else if constexpr (std::is_same_v<T, RangeVal>) {
          return std::to_string(x.lo) + ":" + std::to_string(x.hi);
        } else if constexpr (std::is_same_v<T, std::shared_ptr<MapObj>>) {
          std::string out = "Dict(";
          bool first = true;
          for (const auto& [k, val] : x->entries) {
            if (!first) out += ", ";
            first = false;
            out += quote(k) + " => " + repr(val);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<StructObj>>) {
          return x->type->name + "(" + join_repr(x->fields, nullptr) + ")";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<Closure>>) {
          return x->name.empty() ? "#lambda" : x->name;
        } else if constexpr (std::is_same_v<T, std::shared_ptr<Builtin>>) {
          return x->name;
        } else if constexpr (std::is_same_v<T, std::shared_ptr<StructType>>) {
          return x->name;
        } else if constexpr (std::is_same_v<T, std::shared_ptr<ModuleObj>>) {
          return x->name;
        } else {
          return "ErrorException(" + quote(x->message) + ")";
        }
      },
      value.v);
}

std::string type_name(const Value& value) {
  static const char* names[] = {"Nothing", "Int64",   "Float64",  "Bool",     "String",
                                "Array",   "Tuple",   "Range",    "Dict",     "Struct",
                                "Function", "Function", "DataType", "Module", "ErrorException"};
  if (value.is<std::shared_ptr<StructObj>>()) return value.as<std::shared_ptr<StructObj>>()->type->name;
  return names[value.v.index()];
}

bool values_equal(const Value& a, const Value& b) {
  auto number = [](const Value& v) -> std::optional<double> {
    if (v.is<std::int64_t>()) return static_cast<double>(v.as<std::int64_t>());
    if (v.is<double>()) return v.as<double>();
    return std::nullopt;
  };
  if (a.is<std::int64_t>() && b.is<std::int64_t>()) {
    return a.as<std::int64_t>() == b.as<std::int64_t>();
  }
  auto na = number(a);
  auto nb = number(b);
  if (na && nb) return *na == *nb;
  if (a.v.index() != b.v.index()) return false;
  if (a.is<Nil>()) return true;
  if (a.is<bool>()) return a.as<bool>() == b.as<bool>();
  if (a.is<std::string>()) return a.as<std::string>() == b.as<std::string>();
  if (a.is<RangeVal>()) {
    return a.as<RangeVal>().lo == b.as<RangeVal>().lo && a.as<RangeVal>().hi == b.as<RangeVal>().hi;
  }
  auto seq_equal = [](const std::vector<Value>& x, const std::vector<Value>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!values_equal(x[i], y[i])) return false;
    }
    return true;
  };
  if (a.is<std::shared_ptr<ArrayObj>>()) {
    return seq_equal(a.as<std::shared_ptr<ArrayObj>>()->items, b.as<std::shared_ptr<ArrayObj>>()->items);
  }
  if (a.is<std::shared_ptr<TupleObj>>()) {
    const auto& x = *a.as<std::shared_ptr<TupleObj>>();
    const auto& y = *b.as<std::shared_ptr<TupleObj>>();
    return x.names == y.names && seq_equal(x.items, y.items);
  }
  if (a.is<std::shared_ptr<MapObj>>()) {
    const auto& x = a.as<std::shared_ptr<MapObj>>()->entries;
    const auto& y = b.as<std::shared_ptr<MapObj>>()->entries;
    if (x.size() != y.size()) return false;
    for (const auto& [k, v] : x) {
      auto it = y.find(k);
      if (it == y.end() || !values_equal(v, it->second)) return false;
    }
    return true;
  }
  if (a.is<std::shared_ptr<StructObj>>()) {
    const auto& x = *a.as<std::shared_ptr<StructObj>>();
    const auto& y = *b.as<std::shared_ptr<StructObj>>();
    return x.type == y.type && seq_equal(x.fields, y.fields);
  }
  if (a.is<std::shared_ptr<ErrorObj>>()) {
    return a.as<std::shared_ptr<ErrorObj>>()->message == b.as<std::shared_ptr<ErrorObj>>()->message;
  }
  // Functions, types and modules compare by identity.
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::shared_ptr<Closure>> ||
                      std::is_same_v<T, std::shared_ptr<Builtin>> ||
                      std::is_same_v<T, std::shared_ptr<StructType>> ||
                      std::is_same_v<T, std::shared_ptr<ModuleObj>>) {
          return x == std::get<T>(b.v);
        } else {
          return false;
        }
      },
      a.v);
}

std::string HlException::display_message(const Value& v) {
  if (v.is<std::shared_ptr<ErrorObj>>()) return v.as<std::shared_ptr<ErrorObj>>()->message;
  return display(v);
}

const Value* Environment::lookup(const std::string& name) const {
  for (const Environment* e = this; e != nullptr; e = e->parent_.get()) {
    auto it = e->vars_.find(name);
    if (it != e->vars_.end()) return &it->second;
  }
  return nullptr;
}

void Environment::define(const std::string& name, Value value) {
  vars_[name] = std::move(value);
}

void Environment::assign(const std::string& name, Value value) {
  for (Environment* e = this; e != nullptr; e = e->parent_.get()) {
    auto it = e->vars_.find(name);
    if (it != e->vars_.end()) {
      it->second = std::move(value);
      return;
    }
    if (e->kind_ != ScopeKind::Local) break;
  }
  vars_[name] = std::move(value);
}

}  // namespace hlweave
