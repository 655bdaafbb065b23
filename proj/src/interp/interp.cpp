#include <chrono>
#include <cmath>

#include "hlweave/interp.hpp"

namespace hlweave {

namespace {

constexpr int kMaxDepth = 1000;

struct ReturnSignal {
  Value value;
};

using Kwargs = std::vector<std::pair<std::string, Value>>;

bool is_number(const Value& v) { return v.is<std::int64_t>() || v.is<double>(); }

double as_double(const Value& v) {
  return v.is<std::int64_t>() ? static_cast<double>(v.as<std::int64_t>()) : v.as<double>();
}

}  // namespace

struct Interpreter::Impl {
  explicit Impl(Interpreter& owner) : self(owner) {
    global = make_env(ScopeKind::Global, nullptr);
    install_builtins();
  }

  ~Impl() { release_envs(); }

  Interpreter& self;
  EnvPtr global;
  std::string out;
  std::vector<std::string> counter_trace;
  std::vector<double> sleeps;
  std::int64_t tick = 0;
  std::vector<std::weak_ptr<Environment>> envs;
  std::vector<SourceLoc> call_stack;
  SourceLoc here;
  int depth = 0;

  EnvPtr make_env(ScopeKind kind, EnvPtr parent) {
    auto env = std::make_shared<Environment>(kind, std::move(parent));
    envs.push_back(env);
    return env;
  }

  // Closures and their environments reference each other; clearing every
  // environment we created breaks those cycles.
  void release_envs() {
    for (auto& w : envs) {
      if (auto e = w.lock()) e->clear();
    }
    envs.clear();
  }

  [[noreturn]] void raise_value(Value v) {
    auto stack = call_stack;
    stack.push_back(here);
    throw HlException(std::move(v), std::move(stack), here);
  }

  [[noreturn]] void raise(const std::string& message) { raise_value(make_error(message)); }

  void builtin(const std::string& name, BuiltinFn fn) {
    global->define(name, Value(std::make_shared<Builtin>(Builtin{name, std::move(fn)})));
  }

  void expect_args(const std::string& name, const std::vector<Value>& args, std::size_t lo,
                   std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      raise("MethodError: wrong number of arguments to " + name + " (" +
            std::to_string(args.size()) + ")");
    }
  }

  Value arith(const std::string& op, const Value& a, const Value& b) {
    if (op == "*" && a.is<std::string>() && b.is<std::string>()) {
      return Value(a.as<std::string>() + b.as<std::string>());
    }
    if (!is_number(a) || !is_number(b)) {
      raise("MethodError: no method matching " + op + "(" + type_name(a) + ", " + type_name(b) +
            ")");
    }
    if (op == "/") return Value(as_double(a) / as_double(b));
    if (a.is<std::int64_t>() && b.is<std::int64_t>()) {
      std::int64_t x = a.as<std::int64_t>();
      std::int64_t y = b.as<std::int64_t>();
      if (op == "+") return Value(x + y);
      if (op == "-") return Value(x - y);
      return Value(x * y);
    }
    double x = as_double(a);
    double y = as_double(b);
    if (op == "+") return Value(x + y);
    if (op == "-") return Value(x - y);
    return Value(x * y);
  }

  bool less(const Value& a, const Value& b) {
    if (is_number(a) && is_number(b)) {
      if (a.is<std::int64_t>() && b.is<std::int64_t>()) {
        return a.as<std::int64_t>() < b.as<std::int64_t>();
      }
      return as_double(a) < as_double(b);
    }
    if (a.is<std::string>() && b.is<std::string>()) return a.as<std::string>() < b.as<std::string>();
    raise("MethodError: no method matching isless(" + type_name(a) + ", " + type_name(b) + ")");
  }

  void install_builtins() {
    global->define("nothing", Value(Nil{}));
    for (std::string op : {"+", "*", "/"}) {
      builtin(op, [this, op](Interpreter&, std::vector<Value>& args, Kwargs&) {
        expect_args(op, args, 2, 2);
        return arith(op, args[0], args[1]);
      });
    }
    builtin("-", [this](Interpreter&, std::vector<Value>& args, Kwargs&) {
      expect_args("-", args, 1, 2);
      if (args.size() == 2) return arith("-", args[0], args[1]);
      return arith("-", Value(std::int64_t{0}), args[0]);
    });
    builtin("<", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("<", a, 2, 2);
      return Value(less(a[0], a[1]));
    });
    builtin(">", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args(">", a, 2, 2);
      return Value(less(a[1], a[0]));
    });
    builtin("<=", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("<=", a, 2, 2);
      return Value(!less(a[1], a[0]));
    });
    builtin(">=", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args(">=", a, 2, 2);
      return Value(!less(a[0], a[1]));
    });
    builtin("==", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("==", a, 2, 2);
      return Value(values_equal(a[0], a[1]));
    });
    builtin("!=", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("!=", a, 2, 2);
      return Value(!values_equal(a[0], a[1]));
    });
    builtin("!", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("!", a, 1, 1);
      return Value(!truth(a[0]));
    });
    builtin("print", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      for (const auto& v : a) out += display(v);
      return Value(Nil{});
    });
    builtin("println", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      for (const auto& v : a) out += display(v);
      out += '\n';
      return Value(Nil{});
    });
    builtin("string", [](Interpreter&, std::vector<Value>& a, Kwargs&) {
      std::string s;
      for (const auto& v : a) s += display(v);
      return Value(std::move(s));
    });
    builtin("push!", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      if (a.empty() || !a[0].is<std::shared_ptr<ArrayObj>>()) raise("push! expects an array");
      auto& items = a[0].as<std::shared_ptr<ArrayObj>>()->items;
      items.insert(items.end(), a.begin() + 1, a.end());
      return a[0];
    });
    builtin("pop!", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("pop!", a, 1, 1);
      if (!a[0].is<std::shared_ptr<ArrayObj>>()) raise("pop! expects an array");
      auto& items = a[0].as<std::shared_ptr<ArrayObj>>()->items;
      if (items.empty()) raise("ArgumentError: array must be non-empty");
      Value v = items.back();
      items.pop_back();
      return v;
    });
    builtin("length", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("length", a, 1, 1);
      const Value& v = a[0];
      std::int64_t n = 0;
      if (v.is<std::shared_ptr<ArrayObj>>()) {
        n = static_cast<std::int64_t>(v.as<std::shared_ptr<ArrayObj>>()->items.size());
      } else if (v.is<std::shared_ptr<TupleObj>>()) {
        n = static_cast<std::int64_t>(v.as<std::shared_ptr<TupleObj>>()->items.size());
      } else if (v.is<std::shared_ptr<MapObj>>()) {
        n = static_cast<std::int64_t>(v.as<std::shared_ptr<MapObj>>()->entries.size());
      } else if (v.is<std::string>()) {
        n = static_cast<std::int64_t>(v.as<std::string>().size());
      } else if (v.is<RangeVal>()) {
        n = std::max<std::int64_t>(0, v.as<RangeVal>().hi - v.as<RangeVal>().lo + 1);
      } else {
        raise("MethodError: no method matching length(" + type_name(v) + ")");
      }
      return Value(n);
    });
    builtin("error", [this](Interpreter&, std::vector<Value>& a, Kwargs&) -> Value {
      std::string msg;
      for (const auto& v : a) msg += display(v);
      raise(msg);
    });
    builtin("throw", [this](Interpreter&, std::vector<Value>& a, Kwargs&) -> Value {
      expect_args("throw", a, 1, 1);
      raise_value(a[0]);
    });
    builtin("sleep", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("sleep", a, 1, 1);
      if (!is_number(a[0])) raise("sleep expects a number");
      sleeps.push_back(as_double(a[0]));
      return Value(Nil{});
    });
    builtin("mynow", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("mynow", a, 0, 0);
      return Value(++tick);
    });
    builtin("myfetch", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("myfetch", a, 1, 1);
      return Value("fetched:" + display(a[0]));
    });
    builtin("counter!", [this](Interpreter&, std::vector<Value>& a, Kwargs&) {
      expect_args("counter!", a, 0, 1);
      counter_trace.push_back(a.empty() ? std::string() : display(a[0]));
      return Value(static_cast<std::int64_t>(counter_trace.size()));
    });
    builtin("mkmap", [this](Interpreter&, std::vector<Value>& a, Kwargs& kw) {
      if (a.size() % 2 != 0) raise("mkmap expects key/value pairs");
      auto m = std::make_shared<MapObj>();
      for (std::size_t i = 0; i < a.size(); i += 2) m->entries[display(a[i])] = a[i + 1];
      for (auto& [k, v] : kw) m->entries[k] = v;
      return Value(std::move(m));
    });
  }

  bool truth(const Value& v) {
    if (!v.is<bool>()) raise("TypeError: non-boolean (" + type_name(v) + ") used in boolean context");
    return v.as<bool>();
  }

  // ---- evaluation -------------------------------------------------------

  Value eval_block(const Node& block, const EnvPtr& env) {
    Value last;
    for (const auto& stmt : block.children) {
      if (stmt.is(NodeKind::LineInfo)) {
        here = stmt.loc;
        continue;
      }
      last = eval(stmt, env);
    }
    return last;
  }

  Value eval(const Node& n, const EnvPtr& env) {
    switch (n.kind) {
      case NodeKind::Block:
        return eval_block(n, env);
      case NodeKind::LineInfo:
        here = n.loc;
        return Value();
      case NodeKind::Symbol: {
        const Value* v = env->lookup(n.text());
        if (!v) raise("UndefVarError: `" + n.text() + "` not defined");
        return *v;
      }
      case NodeKind::IntLit:
        return Value(n.int_value());
      case NodeKind::FloatLit:
        return Value(n.float_value());
      case NodeKind::BoolLit:
        return Value(n.bool_value());
      case NodeKind::StringLit:
        return Value(n.text());
      case NodeKind::StringInterp: {
        std::string s;
        for (const auto& part : n.children) {
          s += part.is(NodeKind::StringLit) ? part.text() : display(eval(part, env));
        }
        return Value(std::move(s));
      }
      case NodeKind::ArrayLit: {
        std::vector<Value> items;
        for (const auto& c : n.children) items.push_back(eval(c, env));
        return make_array(std::move(items));
      }
      case NodeKind::TupleLit: {
        auto t = std::make_shared<TupleObj>();
        bool named = !n.children.empty() && n.children[0].is(NodeKind::Assign);
        for (const auto& c : n.children) {
          if (named) {
            t->names.push_back(c.children[0].text());
            t->items.push_back(eval(c.children[1], env));
          } else {
            t->items.push_back(eval(c, env));
          }
        }
        return Value(std::move(t));
      }
      case NodeKind::MapLit: {
        auto m = std::make_shared<MapObj>();
        for (std::size_t i = 0; i + 1 < n.children.size(); i += 2) {
          std::string key = display(eval(n.children[i], env));
          m->entries[key] = eval(n.children[i + 1], env);
        }
        return Value(std::move(m));
      }
      case NodeKind::Range: {
        Value lo = eval(n.children[0], env);
        Value hi = eval(n.children[1], env);
        if (!lo.is<std::int64_t>() || !hi.is<std::int64_t>()) raise("range bounds must be integers");
        return Value(RangeVal{lo.as<std::int64_t>(), hi.as<std::int64_t>()});
      }
      case NodeKind::AndAnd: {
        Value l = eval(n.children[0], env);
        if (!truth(l)) return l;
        return eval(n.children[1], env);
      }
      case NodeKind::OrOr: {
        Value l = eval(n.children[0], env);
        if (truth(l)) return l;
        return eval(n.children[1], env);
      }
      case NodeKind::Assign: {
        Value v = eval(n.children[1], env);
        env->assign(n.children[0].text(), v);
        return v;
      }
      case NodeKind::OpAssign:
        return eval_op_assign(n, env);
      case NodeKind::IndexAssign: {
        Value base = eval(n.children[0], env);
        Value idx = eval(n.children[1], env);
        Value v = eval(n.children[2], env);
        store_index(base, idx, v);
        return v;
      }
      case NodeKind::FieldAssign: {
        Value base = eval(n.children[0], env);
        Value v = eval(n.children[2], env);
        store_field(base, n.children[1].text(), v);
        return v;
      }
      case NodeKind::IndexRef:
        return load_index(eval(n.children[0], env), eval(n.children[1], env));
      case NodeKind::FieldRef:
        return load_field(eval(n.children[0], env), n.children[1].text());
      case NodeKind::Call:
        return eval_call(n, env);
      case NodeKind::MacroCall:
        return eval_macro(n, env);
      case NodeKind::FunctionDef:
      case NodeKind::ShortFuncDef: {
        auto c = std::make_shared<Closure>(
            Closure{n.children[0].text(), n.children[1], n.children[2], env});
        env->define(c->name, Value(c));
        return Value(std::move(c));
      }
      case NodeKind::Lambda:
        return Value(std::make_shared<Closure>(Closure{"", n.children[0], n.children[1], env}));
      case NodeKind::StructDef:
        return eval_struct(n, env);
      case NodeKind::Module: {
        auto m = std::make_shared<ModuleObj>();
        m->name = n.children[0].text();
        m->env = make_env(ScopeKind::Module, env);
        env->define(m->name, Value(m));
        eval_block(n.children[1], m->env);
        return Value(Nil{});
      }
      case NodeKind::If: {
        if (truth(eval(n.children[0], env))) return eval(n.children[1], env);
        if (n.children[2].is(NodeKind::Empty)) return Value(Nil{});
        return eval(n.children[2], env);
      }
      case NodeKind::For:
        eval_for(n, 0, env);
        return Value(Nil{});
      case NodeKind::Let: {
        EnvPtr inner = make_env(ScopeKind::Local, env);
        for (std::size_t i = 0; i + 1 < n.children.size(); ++i) {
          const Node& b = n.children[i];
          inner->define(b.children[0].text(), eval(b.children[1], inner));
        }
        return eval(n.children.back(), inner);
      }
      case NodeKind::TryCatchFinally:
        return eval_try(n, env);
      case NodeKind::Throw:
        raise_value(eval(n.children[0], env));
      case NodeKind::Return:
        throw ReturnSignal{n.children.empty() ? Value(Nil{}) : eval(n.children[0], env)};
      case NodeKind::AttrAnnot:
        return eval(n.children[1], env);
      case NodeKind::Include:
        raise("include must be resolved before running");
      case NodeKind::Aj:
        throw Error("cannot evaluate an un-emitted join point", n.loc);
      default:
        throw Error("cannot evaluate " + std::string(kind_name(n.kind)) + " node", n.loc);
    }
  }

  Value eval_op_assign(const Node& n, const EnvPtr& env) {
    const Node& target = n.children[0];
    if (target.is(NodeKind::Symbol)) {
      Value v = arith("+", eval(target, env), eval(n.children[1], env));
      env->assign(target.text(), v);
      return v;
    }
    if (target.is(NodeKind::IndexRef)) {
      Value base = eval(target.children[0], env);
      Value idx = eval(target.children[1], env);
      Value v = arith("+", load_index(base, idx), eval(n.children[1], env));
      store_index(base, idx, v);
      return v;
    }
    if (target.is(NodeKind::FieldRef)) {
      Value base = eval(target.children[0], env);
      const std::string& field = target.children[1].text();
      Value v = arith("+", load_field(base, field), eval(n.children[1], env));
      store_field(base, field, v);
      return v;
    }
    raise("invalid += target");
  }

  std::size_t checked_index(const Value& idx, std::size_t size) {
    if (!idx.is<std::int64_t>()) raise("index must be an integer, got " + type_name(idx));
    std::int64_t i = idx.as<std::int64_t>();
    if (i < 1 || static_cast<std::size_t>(i) > size) {
      raise("BoundsError: attempt to access " + std::to_string(size) + "-element collection at index [" +
            std::to_string(i) + "]");
    }
    return static_cast<std::size_t>(i - 1);
  }

  Value load_index(const Value& base, const Value& idx) {
    if (base.is<std::shared_ptr<ArrayObj>>()) {
      const auto& items = base.as<std::shared_ptr<ArrayObj>>()->items;
      return items[checked_index(idx, items.size())];
    }
    if (base.is<std::shared_ptr<TupleObj>>()) {
      const auto& items = base.as<std::shared_ptr<TupleObj>>()->items;
      return items[checked_index(idx, items.size())];
    }
    if (base.is<std::shared_ptr<MapObj>>()) {
      const auto& entries = base.as<std::shared_ptr<MapObj>>()->entries;
      auto it = entries.find(display(idx));
      if (it == entries.end()) raise("KeyError: key " + repr(idx) + " not found");
      return it->second;
    }
    if (base.is<RangeVal>()) {
      const auto& r = base.as<RangeVal>();
      std::size_t size = r.hi >= r.lo ? static_cast<std::size_t>(r.hi - r.lo + 1) : 0;
      return Value(r.lo + static_cast<std::int64_t>(checked_index(idx, size)));
    }
    raise("MethodError: cannot index into " + type_name(base));
  }

  void store_index(const Value& base, const Value& idx, Value v) {
    if (base.is<std::shared_ptr<ArrayObj>>()) {
      auto& items = base.as<std::shared_ptr<ArrayObj>>()->items;
      items[checked_index(idx, items.size())] = std::move(v);
      return;
    }
    if (base.is<std::shared_ptr<MapObj>>()) {
      base.as<std::shared_ptr<MapObj>>()->entries[display(idx)] = std::move(v);
      return;
    }
    raise("MethodError: cannot assign into " + type_name(base));
  }

  Value load_field(const Value& base, const std::string& field) {
    if (base.is<std::shared_ptr<StructObj>>()) {
      const auto& s = *base.as<std::shared_ptr<StructObj>>();
      for (std::size_t i = 0; i < s.type->fields.size(); ++i) {
        if (s.type->fields[i] == field) return s.fields[i];
      }
    } else if (base.is<std::shared_ptr<TupleObj>>()) {
      const auto& t = *base.as<std::shared_ptr<TupleObj>>();
      for (std::size_t i = 0; i < t.names.size(); ++i) {
        if (t.names[i] == field) return t.items[i];
      }
    } else if (base.is<std::shared_ptr<ModuleObj>>()) {
      const auto& m = *base.as<std::shared_ptr<ModuleObj>>();
      if (const Value* v = m.env->lookup(field)) return *v;
      raise("UndefVarError: `" + field + "` not defined in " + m.name);
    }
    raise(type_name(base) + " has no field " + field);
  }

  void store_field(const Value& base, const std::string& field, Value v) {
    if (!base.is<std::shared_ptr<StructObj>>()) raise("cannot set field " + field + " of " + type_name(base));
    auto& s = *base.as<std::shared_ptr<StructObj>>();
    if (!s.type->is_mutable) {
      raise("setfield!: immutable struct of type " + s.type->name + " cannot be changed");
    }
    for (std::size_t i = 0; i < s.type->fields.size(); ++i) {
      if (s.type->fields[i] == field) {
        s.fields[i] = std::move(v);
        return;
      }
    }
    raise(s.type->name + " has no field " + field);
  }

  Value eval_call(const Node& n, const EnvPtr& env) {
    Value callee = eval(n.children[0], env);
    std::vector<Value> args;
    Kwargs kwargs;
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      const Node& a = n.children[i];
      if (a.is(NodeKind::Assign)) {
        kwargs.emplace_back(a.children[0].text(), eval(a.children[1], env));
      } else {
        args.push_back(eval(a, env));
      }
    }
    SourceLoc site = here;
    call_stack.push_back(site);
    Value result = call(callee, std::move(args), std::move(kwargs));
    call_stack.pop_back();
    here = site;
    return result;
  }

  Value eval_macro(const Node& n, const EnvPtr& env) {
    const std::string& name = n.children[0].text();
    if (name == "@time") {
      auto start = std::chrono::steady_clock::now();
      Value v = n.children.size() > 1 ? eval(n.children[1], env) : Value(Nil{});
      auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
      out += "time: " + std::to_string(ns) + " ns\n";
      return v;
    }
    if (name == "@isdefined") return Value(env->is_defined(n.children[1].text()));
    raise("unsupported macro " + name);
  }

  Value eval_struct(const Node& n, const EnvPtr& env) {
    auto type = std::make_shared<StructType>();
    type->name = n.children[0].text();
    type->is_mutable = n.children[1].bool_value();
    type->env = env;
    for (const auto& member : block_statements(n.children[2])) {
      if (member.is(NodeKind::Field)) {
        type->fields.push_back(member.children[0].text());
      } else if (member.is(NodeKind::Symbol)) {
        type->fields.push_back(member.text());
      } else if (member.is(NodeKind::FunctionDef) || member.is(NodeKind::ShortFuncDef)) {
        type->constructors.push_back(member);
      }
    }
    env->define(type->name, Value(type));
    return Value(Nil{});
  }

  void eval_for(const Node& n, std::size_t clause, const EnvPtr& env) {
    if (clause + 1 == n.children.size()) {
      eval(n.children.back(), env);
      return;
    }
    const Node& iter = n.children[clause];
    const std::string& var = iter.children[0].text();
    Value seq = eval(iter.children[1], env);
    auto step = [&](Value item) {
      EnvPtr inner = make_env(ScopeKind::Local, env);
      inner->define(var, std::move(item));
      eval_for(n, clause + 1, inner);
    };
    if (seq.is<RangeVal>()) {
      RangeVal r = seq.as<RangeVal>();
      for (std::int64_t i = r.lo; i <= r.hi; ++i) step(Value(i));
    } else if (seq.is<std::shared_ptr<ArrayObj>>()) {
      auto items = seq.as<std::shared_ptr<ArrayObj>>()->items;
      for (auto& item : items) step(item);
    } else if (seq.is<std::shared_ptr<TupleObj>>()) {
      auto items = seq.as<std::shared_ptr<TupleObj>>()->items;
      for (auto& item : items) step(item);
    } else {
      raise("MethodError: cannot iterate over " + type_name(seq));
    }
  }

  Value eval_try(const Node& n, const EnvPtr& env) {
    const Node& catch_var = n.children[1];
    const Node& catch_body = n.children[2];
    const Node& finally_body = n.children[3];
    auto run_finally = [&] {
      if (!finally_body.is(NodeKind::Empty)) eval(finally_body, make_env(ScopeKind::Local, env));
    };
    Value result;
    try {
      std::size_t stack_depth = call_stack.size();
      int saved_depth = depth;
      try {
        result = eval(n.children[0], make_env(ScopeKind::Local, env));
      } catch (const HlException& e) {
        call_stack.resize(stack_depth);
        depth = saved_depth;
        if (catch_body.is(NodeKind::Empty)) throw;
        EnvPtr inner = make_env(ScopeKind::Local, env);
        if (!catch_var.is(NodeKind::Empty)) inner->define(catch_var.text(), e.value());
        result = eval(catch_body, inner);
      }
    } catch (...) {
      run_finally();
      throw;
    }
    run_finally();
    return result;
  }

  // ---- calls ------------------------------------------------------------

  Value call(const Value& callee, std::vector<Value> args, Kwargs kwargs) {
    if (callee.is<std::shared_ptr<Builtin>>()) {
      const auto& b = *callee.as<std::shared_ptr<Builtin>>();
      return b.fn(self, args, kwargs);
    }
    if (callee.is<std::shared_ptr<Closure>>()) {
      return call_closure(*callee.as<std::shared_ptr<Closure>>(), args, kwargs, nullptr);
    }
    if (callee.is<std::shared_ptr<StructType>>()) {
      return construct(callee.as<std::shared_ptr<StructType>>(), args, kwargs);
    }
    raise("MethodError: objects of type " + type_name(callee) + " are not callable");
  }

  Value construct(const std::shared_ptr<StructType>& type, std::vector<Value>& args,
                  Kwargs& kwargs) {
    auto make_new = [this, type](Interpreter&, std::vector<Value>& a, Kwargs&) {
      if (a.size() != type->fields.size()) {
        raise("MethodError: new(" + type->name + ") expects " +
              std::to_string(type->fields.size()) + " values, got " + std::to_string(a.size()));
      }
      auto obj = std::make_shared<StructObj>();
      obj->type = type;
      obj->fields = a;
      return Value(std::move(obj));
    };
    if (type->constructors.empty()) {
      std::vector<Value> a = args;
      Kwargs none;
      return make_new(self, a, none);
    }
    for (const auto& ctor : type->constructors) {
      if (!accepts(ctor.children[1], args.size())) continue;
      Closure c{ctor.children[0].text(), ctor.children[1], ctor.children[2], type->env};
      return call_closure(c, args, kwargs,
                          std::make_shared<Builtin>(Builtin{"new", make_new}));
    }
    raise("MethodError: no constructor " + type->name + " taking " + std::to_string(args.size()) +
          " arguments");
  }

  static bool accepts(const Node& params, std::size_t argc) {
    std::size_t required = 0;
    std::size_t optional = 0;
    bool variadic = false;
    for (const auto& p : params.children) {
      if (p.is(NodeKind::Param)) {
        (p.children[2].is(NodeKind::Empty) ? required : optional)++;
      } else if (p.is(NodeKind::VarParam)) {
        variadic = true;
      }
    }
    return argc >= required && (variadic || argc <= required + optional);
  }

  Value call_closure(const Closure& c, std::vector<Value>& args, Kwargs& kwargs,
                     std::shared_ptr<Builtin> new_fn) {
    const std::string shown = c.name.empty() ? "#lambda" : c.name;
    if (!accepts(c.params, args.size())) {
      raise("MethodError: no method matching " + shown + " with " + std::to_string(args.size()) +
            " arguments");
    }
    if (depth >= kMaxDepth) raise("StackOverflowError");
    EnvPtr fenv = make_env(ScopeKind::Function, c.env);
    if (new_fn) fenv->define("new", Value(std::move(new_fn)));

    std::size_t required = 0;
    for (const auto& p : c.params.children) {
      if (p.is(NodeKind::Param) && p.children[2].is(NodeKind::Empty)) ++required;
    }
    std::size_t optional_budget = args.size() > required ? args.size() - required : 0;
    std::size_t next = 0;
    std::vector<bool> kw_used(kwargs.size(), false);
    for (const auto& p : c.params.children) {
      const std::string& name = p.children[0].text();
      switch (p.kind) {
        case NodeKind::Param:
          if (p.children[2].is(NodeKind::Empty)) {
            fenv->define(name, args[next++]);
          } else if (optional_budget > 0 && next < args.size()) {
            --optional_budget;
            fenv->define(name, args[next++]);
          } else {
            fenv->define(name, eval(p.children[2], fenv));
          }
          break;
        case NodeKind::VarParam: {
          auto t = std::make_shared<TupleObj>();
          while (next < args.size()) t->items.push_back(args[next++]);
          fenv->define(name, Value(std::move(t)));
          break;
        }
        case NodeKind::KwParam: {
          bool found = false;
          for (std::size_t i = 0; i < kwargs.size(); ++i) {
            if (!kw_used[i] && kwargs[i].first == name) {
              fenv->define(name, kwargs[i].second);
              kw_used[i] = true;
              found = true;
              break;
            }
          }
          if (!found) {
            if (p.children[2].is(NodeKind::Empty)) {
              raise("UndefKeywordError: keyword argument `" + name + "` not assigned");
            }
            fenv->define(name, eval(p.children[2], fenv));
          }
          break;
        }
        case NodeKind::KwVarParam: {
          auto t = std::make_shared<TupleObj>();
          for (std::size_t i = 0; i < kwargs.size(); ++i) {
            if (kw_used[i]) continue;
            kw_used[i] = true;
            t->names.push_back(kwargs[i].first);
            t->items.push_back(kwargs[i].second);
          }
          fenv->define(name, Value(std::move(t)));
          break;
        }
        default:
          break;
      }
    }
    for (std::size_t i = 0; i < kwargs.size(); ++i) {
      if (!kw_used[i]) raise("MethodError: " + shown + " got unsupported keyword argument `" + kwargs[i].first + "`");
    }

    ++depth;
    Value result;
    try {
      result = eval(c.body, fenv);
    } catch (ReturnSignal& r) {
      result = std::move(r.value);
    } catch (...) {
      --depth;
      throw;
    }
    --depth;
    return result;
  }

  // ---- entry ------------------------------------------------------------

  std::optional<Value> resolve_entry(const std::string& entry) {
    std::string path = entry;
    if (path.rfind("Main.", 0) == 0) path = path.substr(5);
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      std::size_t dot = path.find('.', start);
      parts.push_back(path.substr(start, dot - start));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    EnvPtr scope = global;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const Value* v = scope->lookup(parts[i]);
      if (!v) return std::nullopt;
      if (i + 1 == parts.size()) return *v;
      if (!v->is<std::shared_ptr<ModuleObj>>()) return std::nullopt;
      scope = v->as<std::shared_ptr<ModuleObj>>()->env;
    }
    return std::nullopt;
  }

  RunResult run(const Node& program, const std::string& entry) {
    RunResult result;
    try {
      eval(program, global);
      auto fn = resolve_entry(entry);
      if (!fn || !(fn->is<std::shared_ptr<Closure>>() || fn->is<std::shared_ptr<Builtin>>())) {
        result.error = RunError{RunError::Kind::Entry, "entry function `" + entry + "` not found", {}};
      } else {
        result.value = call(*fn, {}, {});
      }
    } catch (const HlException& e) {
      result.value = Value();
      result.error = RunError{RunError::Kind::Runtime, e.message(), e.stack()};
    } catch (const ReturnSignal& r) {
      result.value = r.value;
    }
    result.stdout_text = out;
    result.counter_trace = counter_trace;
    result.sleeps = sleeps;
    return result;
  }
};

Interpreter::Interpreter() : impl_(std::make_unique<Impl>(*this)) {}
Interpreter::~Interpreter() = default;

RunResult Interpreter::run(const Node& program, const std::string& entry) {
  return impl_->run(program, entry);
}

Value Interpreter::eval_expr(const Node& node, const EnvPtr& env) {
  try {
    return impl_->eval(node, env);
  } catch (ReturnSignal& r) {
    return std::move(r.value);
  }
}

EnvPtr Interpreter::global_env() const { return impl_->global; }
const std::string& Interpreter::output() const { return impl_->out; }
void Interpreter::write(const std::string& text) { impl_->out += text; }

Value Interpreter::call(const Value& callee, std::vector<Value> args,
                        std::vector<std::pair<std::string, Value>> kwargs) {
  return impl_->call(callee, std::move(args), std::move(kwargs));
}

void Interpreter::raise(const std::string& message) { impl_->raise(message); }
std::int64_t Interpreter::next_tick() { return ++impl_->tick; }

std::int64_t Interpreter::bump_counter(std::string label) {
  impl_->counter_trace.push_back(std::move(label));
  return static_cast<std::int64_t>(impl_->counter_trace.size());
}

void Interpreter::record_sleep(double seconds) { impl_->sleeps.push_back(seconds); }

RunResult run(const Node& program, const std::string& entry) {
  Interpreter interp;
  return interp.run(program, entry);
}

}  // namespace hlweave
