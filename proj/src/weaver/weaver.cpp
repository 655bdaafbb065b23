#include "hlweave/weaver.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace hlweave {

namespace fs = std::filesystem;

std::optional<std::string> DiskLoader::read(const std::string& path) const {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> MemoryLoader::read(const std::string& path) const {
  auto it = files.find(path);
  if (it == files.end()) return std::nullopt;
  return it->second;
}

// ---- pre-weave ---------------------------------------------------------------

namespace {

class PreWeaver {
 public:
  explicit PreWeaver(const FileLoader& loader) : loader_(loader) {}

  Node run(const Node& n) {
    if (n.is(NodeKind::Block)) {
      Node out(NodeKind::Block, n.loc);
      out.attrs = n.attrs;
      for (const auto& c : n.children) {
        if (c.is(NodeKind::Include)) {
          Node inlined = include(c);
          // The included file's statements replace the include and its LineInfo.
          if (!out.children.empty() && out.children.back().is(NodeKind::LineInfo)) {
            out.children.pop_back();
          }
          for (auto& s : inlined.children) out.children.push_back(std::move(s));
        } else {
          out.children.push_back(run(c));
        }
      }
      return out;
    }
    if (n.is(NodeKind::Include)) return include(n);
    if (n.is(NodeKind::AttrAnnot)) {
      Node inner = run(n.children[1]);
      inner.attrs.insert(inner.attrs.begin(), n.children[0].text());
      return inner;
    }
    Node out = n;
    for (auto& c : out.children) c = run(c);
    return out;
  }

 private:
  Node include(const Node& inc) {
    const Node& arg = inc.children[0];
    if (!arg.is(NodeKind::StringLit)) {
      throw Error("include expects a string literal path", inc.loc);
    }
    std::string path =
        (fs::path(inc.loc.file).parent_path() / arg.text()).lexically_normal().generic_string();
    if (std::find(stack_.begin(), stack_.end(), path) != stack_.end()) {
      std::string chain;
      for (const auto& p : stack_) chain += p + " -> ";
      throw Error("include cycle: " + chain + path, inc.loc);
    }
    auto text = loader_.read(path);
    if (!text) throw Error("cannot read included file '" + path + "'", inc.loc);
    stack_.push_back(path);
    Node out = run(parse(*text, path));
    stack_.pop_back();
    return out;
  }

  const FileLoader& loader_;
  std::vector<std::string> stack_;
};

}  // namespace

Node pre_weave(const Node& program, const FileLoader& loader) {
  return PreWeaver(loader).run(program);
}

// ---- weave -------------------------------------------------------------------

Node weave(const Node& program, const std::vector<Aspect>& aspects) {
  std::map<NodePath, std::vector<WeaveEntry>> sites;
  for (const auto& a : aspects) {
    for (auto& m : scan(a.pointcut, program)) {
      SourceLoc origin{a.file, a.line, a.pointcut.description};
      sites[m.path].push_back(WeaveEntry{std::move(m.jp), a.advice, a.name, std::move(origin)});
    }
  }
  Node out = program;
  // Deepest and latest sites first, so wrapping never shifts a pending path.
  for (auto it = sites.rbegin(); it != sites.rend(); ++it) {
    Node& target = node_at(out, it->first);
    auto payload = std::make_shared<AjPayload>();
    payload->entries = std::move(it->second);
    Node aj(NodeKind::Aj, {std::move(target)}, payload->entries.front().jp.loc);
    aj.aj = std::move(payload);
    target = std::move(aj);
  }
  return out;
}

// ---- emit --------------------------------------------------------------------

namespace {

using Stmts = std::vector<Node>;  // LineInfo / statement pairs

struct Emitted {
  Node node;
  Stmts prefix{};  // statements that must run before `node`, at statement level
  Stmts suffix{};  // statements that must run after it; only definitions produce these
};

bool is_pure(const Node& n) {
  switch (n.kind) {
    case NodeKind::Symbol:
    case NodeKind::IntLit:
    case NodeKind::FloatLit:
    case NodeKind::BoolLit:
    case NodeKind::StringLit:
    case NodeKind::LineInfo:
    case NodeKind::Empty:
      return true;
    default:
      return false;
  }
}

// Can code that must run before child `i` move in front of the whole parent
// without reordering anything observable?
bool transparent(const Node& parent, std::size_t i) {
  switch (parent.kind) {
    case NodeKind::Call:
    case NodeKind::ArrayLit:
    case NodeKind::TupleLit:
    case NodeKind::MapLit:
    case NodeKind::StringInterp:
    case NodeKind::Range:
    case NodeKind::IndexRef:
      return true;
    case NodeKind::Assign:
      return i == 1;
    case NodeKind::Return:
    case NodeKind::Throw:
    case NodeKind::FieldRef:
      return i == 0;
    default:
      return false;
  }
}

Node as_block(Stmts stmts, const SourceLoc& loc) {
  Node b(NodeKind::Block, std::move(stmts), loc);
  return b;
}

void push(Stmts& out, SourceLoc li, Node stmt) {
  out.push_back(Node::line_info(std::move(li)));
  out.push_back(std::move(stmt));
}

// Appends the statements of `n` if it is a Block, otherwise `n` itself.
void push_flat(Stmts& out, const SourceLoc& li, Node n) {
  if (n.is(NodeKind::Block)) {
    for (auto& c : n.children) out.push_back(std::move(c));
  } else {
    push(out, li, std::move(n));
  }
}

Node materialize(Stmts prefix, Node node, Stmts suffix = {}) {
  if (prefix.empty() && suffix.empty()) return node;
  SourceLoc loc = node.loc;
  push(prefix, SourceLoc{loc.file, loc.line, {}}, std::move(node));
  for (auto& s : suffix) prefix.push_back(std::move(s));
  return as_block(std::move(prefix), loc);
}

bool is_definition(const Node& n) {
  return n.is(NodeKind::FunctionDef) || n.is(NodeKind::ShortFuncDef) ||
         n.is(NodeKind::StructDef) || n.is(NodeKind::Module);
}

Node call(Node callee, std::vector<Node> args) {
  std::vector<Node> kids;
  kids.push_back(std::move(callee));
  for (auto& a : args) kids.push_back(std::move(a));
  return Node(NodeKind::Call, std::move(kids));
}

Node assign(const std::string& name, Node value) {
  return Node(NodeKind::Assign, {Node::symbol(name), std::move(value)});
}

// A one-statement body becomes the lambda's expression.
Node single_or_block(Node body) {
  auto stmts = block_statements(body);
  if (stmts.size() == 1) return stmts[0];
  return body;
}

struct Applied {
  const AdviceTemplate* tmpl;
  const WeaveEntry* entry;
};

class Emitter {
 public:
  explicit Emitter(std::vector<Warning>* warnings) : warnings_(warnings) {}

  // With `hoist` false, prefixes produced below `n` stay inside the child
  // they came from instead of moving in front of `n`.
  Emitted node(const Node& n, bool hoist = true) {
    if (n.is(NodeKind::Aj)) {
      if (!n.aj) throw Error("Aj node without payload", n.loc);
      // The site's own arguments may be pre-evaluated, so nothing below it
      // may move out of them.
      return elaborate(*n.aj, node(n.children[0], false));
    }
    Node out = n;
    out.children.clear();
    if (n.is(NodeKind::Block)) {
      for (const auto& c : n.children) {
        if (c.is(NodeKind::LineInfo)) {
          out.children.push_back(c);
          continue;
        }
        Emitted e = node(c);
        if (!e.prefix.empty()) {
          std::optional<Node> li;
          if (!out.children.empty() && out.children.back().is(NodeKind::LineInfo)) {
            li = std::move(out.children.back());
            out.children.pop_back();
          }
          for (auto& p : e.prefix) out.children.push_back(std::move(p));
          out.children.push_back(li ? std::move(*li) : Node::line_info(e.node.loc));
        }
        out.children.push_back(std::move(e.node));
        for (auto& x : e.suffix) out.children.push_back(std::move(x));
      }
      return {std::move(out), {}, {}};
    }
    Stmts prefix;
    bool pure_so_far = true;
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      Emitted e = binding_position(n, i) ? binding(n, n.children[i], hoist) : node(n.children[i]);
      if (!e.suffix.empty()) {
        e.node = materialize(std::move(e.prefix), std::move(e.node), std::move(e.suffix));
        e.prefix.clear();
      }
      if (!e.prefix.empty()) {
        if (hoist && pure_so_far && transparent(n, i)) {
          for (auto& p : e.prefix) prefix.push_back(std::move(p));
        } else {
          e.node = materialize(std::move(e.prefix), std::move(e.node));
        }
      }
      pure_so_far = pure_so_far && is_pure(e.node);
      out.children.push_back(std::move(e.node));
    }
    return {std::move(out), std::move(prefix), {}};
  }

 private:
  static bool binding_position(const Node& parent, std::size_t i) {
    const Node& c = parent.children[i];
    return c.is(NodeKind::Assign) && (parent.is(NodeKind::Let) || parent.is(NodeKind::TupleLit) ||
                                      (parent.is(NodeKind::Call) && i > 0));
  }

  // `name = value` inside a let, a named tuple or a keyword argument: only the
  // value is code, and a let binding must stay an assignment.
  Emitted binding(const Node& parent, const Node& assign_node, bool hoist) {
    Emitted r = node(assign_node.children[1], hoist);
    Node a = assign_node;
    if (parent.is(NodeKind::Let) || !r.suffix.empty()) {
      a.children[1] = materialize(std::move(r.prefix), std::move(r.node), std::move(r.suffix));
      return {std::move(a), {}, {}};
    }
    a.children[1] = std::move(r.node);
    return {std::move(a), std::move(r.prefix), {}};
  }

  Emitted elaborate(const AjPayload& payload, Emitted inner) {
    std::vector<Applied> applied;
    for (const auto& e : payload.entries) {
      for (const auto& t : e.advice.templates) {
        if (t.kind != AdviceKind::Nothing) applied.push_back({&t, &e});
      }
    }
    Node orig = std::move(inner.node);
    orig.attrs.clear();
    if (payload.entries.empty()) throw Error("join point without advice", orig.loc);
    if (applied.empty()) return {materialize(std::move(inner.prefix), std::move(orig)), {}};
    const WeaveEntry& first = payload.entries.front();

    if (first.jp.kind == JPKind::ExecFunc && orig.is(NodeKind::FunctionDef)) {
      Node& body = orig.children[2];
      auto stmts = block_statements(body);
      Node core = stmts.size() == 1 ? stmts[0] : body;
      Emitted r = elaborate_core(applied, first, core, orig, true, {});
      Stmts out = std::move(r.prefix);
      push_flat(out, SourceLoc{core.loc.file, core.loc.line, {}}, std::move(r.node));
      body.children = std::move(out);
      return {std::move(orig), std::move(inner.prefix)};
    }

    if (is_definition(orig)) return elaborate_definition(applied, first, std::move(orig), std::move(inner.prefix));

    return elaborate_core(applied, first, orig, orig, false, std::move(inner.prefix));
  }

  // Definitions cannot sit inside try or let without changing where their
  // name is bound, so advice around them becomes neighbouring statements.
  Emitted elaborate_definition(const std::vector<Applied>& applied, const WeaveEntry& first,
                               Node def, Stmts prefix) {
    JoinPoint jp = make_join_point(first.jp.kind, def, first.jp.pointcut_description, first.jp.name);
    jp.loc = first.jp.loc;
    Stmts front, back, suffix;
    std::vector<const Applied*> arounds;
    for (const auto& a : applied) {
      AdviceKind k = a.tmpl->kind;
      JoinPoint j = jp;
      j.pointcut_description = a.entry->jp.pointcut_description;
      if (k == AdviceKind::AppendF || k == AdviceKind::AppendB) {
        if (!def.is(NodeKind::StructDef) && !def.is(NodeKind::Module)) continue;
        Stmts& dst = k == AdviceKind::AppendF ? front : back;
        for (auto& s : block_statements(instantiate(*a.tmpl, j, def))) {
          if (def.is(NodeKind::StructDef) && s.is(NodeKind::Symbol)) {
            SourceLoc loc = s.loc;
            s = Node(NodeKind::Field, {std::move(s), Node::empty()}, loc);
          }
          if (def.is(NodeKind::StructDef) && !s.is(NodeKind::Field) &&
              !s.is(NodeKind::FunctionDef) && !s.is(NodeKind::ShortFuncDef)) {
            throw AdviceError("only fields and constructors can be appended to struct " +
                                  jp.name + ", got " + std::string(kind_name(s.kind)),
                              s.loc);
          }
          push(dst, a.entry->origin, std::move(s));
        }
      } else if (is_before(k)) {
        std::vector<std::pair<std::string, Node>> ps;
        if (takes_args(k)) ps.emplace_back("arg", args_record(jp));
        push(prefix, a.entry->origin, invoke(a, jp, def, std::move(ps)));
      } else if (is_after_returning(k) || is_after(k)) {
        std::vector<std::pair<std::string, Node>> ps;
        if (is_after_returning(k)) ps.emplace_back("result", Node::symbol("nothing"));
        if (takes_args(k)) ps.emplace_back("arg", args_record(jp));
        push(suffix, a.entry->origin, invoke(a, jp, def, std::move(ps)));
      } else if (k == AdviceKind::Around) {
        arounds.push_back(&a);
      }
      // Throwing advice never fires: evaluating a definition does not throw.
    }
    if (!front.empty() || !back.empty()) {
      Node& body = def.children.back();
      Stmts merged = std::move(front);
      for (auto& c : body.children) merged.push_back(std::move(c));
      for (auto& c : back) merged.push_back(std::move(c));
      body.children = std::move(merged);
    }
    for (const Applied* a : arounds) {
      JoinPoint j = jp;
      j.pointcut_description = a->entry->jp.pointcut_description;
      def = single_or_block(instantiate(*a->tmpl, j, def));
    }
    if (def.is(NodeKind::Block)) {
      // A multi-statement around result: all but the last become statements before it.
      auto stmts = block_statements(def);
      Node last = stmts.back();
      stmts.pop_back();
      for (auto& st : stmts) push(prefix, SourceLoc{st.loc.file, st.loc.line, {}}, std::move(st));
      def = std::move(last);
    }
    return {std::move(def), std::move(prefix), std::move(suffix)};
  }

  std::string fresh(const std::string& base) {
    if (!used_.count(base)) return base;
    for (int k = 1;; ++k) {
      std::string name = base + "_" + std::to_string(k);
      if (!used_.count(name)) return name;
    }
  }

  Node invoke(const Applied& a, const JoinPoint& jp, const Node& original,
              std::vector<std::pair<std::string, Node>> params) {
    JoinPoint j = jp;
    j.pointcut_description = a.entry->jp.pointcut_description;
    Node body = single_or_block(instantiate(*a.tmpl, j, original));
    Node ps(NodeKind::Params);
    std::vector<Node> actuals;
    for (auto& [name, value] : params) {
      ps.children.push_back(
          Node(NodeKind::Param, {Node::symbol(name), Node::empty(), Node::empty()}));
      actuals.push_back(std::move(value));
    }
    return call(Node(NodeKind::Lambda, {std::move(ps), std::move(body)}), std::move(actuals));
  }

  static Node args_record(const JoinPoint& jp) {
    Node args(NodeKind::ArrayLit, jp.arg_exprs);
    Node kargs(NodeKind::MapLit);
    for (const auto& [k, v] : jp.kw_exprs) {
      kargs.children.push_back(Node::string_lit(k));
      kargs.children.push_back(v);
    }
    return Node(NodeKind::TupleLit, {assign("args", std::move(args)), assign("kargs", std::move(kargs))});
  }

  // Replaces the argument expressions of `core` with the given symbols.
  static Node rewrite_args(Node core, const std::vector<Node>& args,
                           const std::vector<Node>& kwargs) {
    std::size_t ai = 0, ki = 0;
    switch (core.kind) {
      case NodeKind::Call:
        for (std::size_t i = 1; i < core.children.size(); ++i) {
          Node& c = core.children[i];
          if (c.is(NodeKind::Assign)) {
            c.children[1] = kwargs[ki++];
          } else {
            c = args[ai++];
          }
        }
        break;
      case NodeKind::AndAnd:
      case NodeKind::OrOr:
        core.children[0] = args[0];
        core.children[1] = args[1];
        break;
      case NodeKind::Assign:
      case NodeKind::OpAssign:
        core.children[1] = args[0];
        break;
      case NodeKind::IndexRef:
        core.children[1] = args[0];
        break;
      case NodeKind::IndexAssign:
        core.children[1] = args[0];
        core.children[2] = args[1];
        break;
      case NodeKind::FieldAssign:
        core.children[2] = args[0];
        break;
      default:
        break;
    }
    return core;
  }

  static bool atomic(const Node& n) { return is_pure(n) && !n.is(NodeKind::LineInfo); }

  Emitted elaborate_core(const std::vector<Applied>& applied, const WeaveEntry& first, Node core,
                         const Node& site, bool in_function, Stmts child_prefix) {
    std::vector<Applied> befores, around, afterr, aftert, after, appendf, appendb;
    bool wants_args = false;
    for (const auto& a : applied) {
      AdviceKind k = a.tmpl->kind;
      if (takes_args(k)) wants_args = true;
      if (is_replace(k) && contains_hole(a.tmpl->body, "@arg_expr")) wants_args = true;
      if (is_before(k)) befores.push_back(a);
      else if (k == AdviceKind::Around) around.push_back(a);
      else if (is_after_returning(k)) afterr.push_back(a);
      else if (is_after_throwing(k)) aftert.push_back(a);
      else if (is_after(k)) after.push_back(a);
      else if (k == AdviceKind::AppendF) appendf.push_back(a);
      else if (k == AdviceKind::AppendB) appendb.push_back(a);
    }

    used_.clear();
    walk(core, [&](const Node& n, const NodePath&) {
      if (n.is(NodeKind::Symbol)) used_.insert(n.text());
    });

    JoinPoint jp = make_join_point(first.jp.kind, in_function ? site : core,
                                   first.jp.pointcut_description, first.jp.name);
    jp.loc = first.jp.loc;
    SourceLoc here{jp.loc.file, jp.loc.line, {}};

    bool pre_eval = false;
    if (wants_args && !in_function) {
      for (const auto& e : jp.arg_exprs) pre_eval = pre_eval || !atomic(e);
      for (const auto& [k, e] : jp.kw_exprs) pre_eval = pre_eval || !atomic(e);
    }
    bool has_try = !aftert.empty() || !after.empty();
    bool capture = !afterr.empty() || !appendb.empty();
    bool let_capture = capture && !has_try && !pre_eval && !in_function;
    bool wrapped = has_try || pre_eval || let_capture;

    if (!child_prefix.empty() && (wrapped || capture || !around.empty())) {
      core = materialize(std::move(child_prefix), std::move(core));
      child_prefix.clear();
    }

    std::vector<Node> bindings;
    if (pre_eval) {
      if ((core.is(NodeKind::AndAnd) || core.is(NodeKind::OrOr)) && warnings_) {
        warnings_->push_back(
            {jp.loc, "pre-evaluating the operands of a short-circuit expression makes both of "
                     "them run (" + first.jp.pointcut_description + ")"});
      }
      std::vector<Node> args, kwargs;
      for (std::size_t i = 0; i < jp.arg_exprs.size(); ++i) {
        std::string name = fresh("arg" + std::to_string(i + 1));
        used_.insert(name);
        bindings.push_back(assign(name, jp.arg_exprs[i]));
        args.push_back(Node::symbol(name));
      }
      for (std::size_t i = 0; i < jp.kw_exprs.size(); ++i) {
        std::string name = fresh("kwarg" + std::to_string(i + 1));
        used_.insert(name);
        bindings.push_back(assign(name, jp.kw_exprs[i].second));
        kwargs.push_back(Node::symbol(name));
      }
      core = rewrite_args(std::move(core), args, kwargs);
      for (std::size_t i = 0; i < args.size(); ++i) jp.arg_exprs[i] = args[i];
      for (std::size_t i = 0; i < kwargs.size(); ++i) jp.kw_exprs[i].second = kwargs[i];
    }

    std::string resulttmp = fresh("resulttmp");
    used_.insert(resulttmp);
    std::string evar = fresh("e");

    auto with_args = [&](const Applied& a, std::vector<std::pair<std::string, Node>> ps) {
      if (takes_args(a.tmpl->kind)) ps.emplace_back("arg", args_record(jp));
      return ps;
    };

    Stmts pre;
    for (const auto& a : befores) {
      push(pre, a.entry->origin, invoke(a, jp, core, with_args(a, {})));
    }
    for (const auto& a : appendf) {
      for (auto& s : block_statements(instantiate(*a.tmpl, jp, core))) {
        push(pre, a.entry->origin, std::move(s));
      }
    }

    for (const auto& a : around) {
      JoinPoint j = jp;
      j.pointcut_description = a.entry->jp.pointcut_description;
      core = single_or_block(instantiate(*a.tmpl, j, core));
    }

    Stmts post;
    for (const auto& a : afterr) {
      push(post, a.entry->origin,
           invoke(a, jp, core, with_args(a, {{"result", Node::symbol(resulttmp)}})));
    }
    for (const auto& a : appendb) {
      for (auto& s : block_statements(instantiate(*a.tmpl, jp, core))) {
        push(post, a.entry->origin, std::move(s));
      }
    }

    Stmts body = std::move(pre);
    if (let_capture) {
      Stmts inner = std::move(post);
      push(inner, here, Node::symbol(resulttmp));
      push(body, here,
           Node(NodeKind::Let, {assign(resulttmp, core), as_block(std::move(inner), here)}, here));
    } else if (capture) {
      push(body, here, assign(resulttmp, core));
      for (auto& s : post) body.push_back(std::move(s));
      push(body, here, Node::symbol(resulttmp));
    } else {
      push(body, here, core);
    }

    if (!wrapped && !capture) {
      // Only statement-level insertions: the core stays where it was.
      Node c = std::move(body.back());
      body.pop_back();
      body.pop_back();
      for (auto& p : child_prefix) body.push_back(std::move(p));
      return {std::move(c), std::move(body)};
    }

    if (has_try) {
      Stmts handler;
      for (const auto& a : aftert) {
        push(handler, a.entry->origin,
             invoke(a, jp, core, with_args(a, {{"exception", Node::symbol(evar)}})));
      }
      Node var = Node::empty();
      Node catch_block = Node::empty();
      if (!aftert.empty()) {
        push(handler, here, Node(NodeKind::Throw, {Node::symbol(evar)}, here));
        var = Node::symbol(evar);
        catch_block = as_block(std::move(handler), here);
      }
      Node finally_block = Node::empty();
      if (!after.empty()) {
        Stmts fin;
        for (const auto& a : after) push(fin, a.entry->origin, invoke(a, jp, core, with_args(a, {})));
        finally_block = as_block(std::move(fin), here);
      }
      Node t(NodeKind::TryCatchFinally,
             {as_block(std::move(body), here), std::move(var), std::move(catch_block),
              std::move(finally_block)},
             here);
      body.clear();
      push(body, here, std::move(t));
    }

    // Outside the try, so catch and finally advice see the bindings.
    if (pre_eval) {
      std::vector<Node> kids = std::move(bindings);
      kids.push_back(as_block(std::move(body), here));
      Node let(NodeKind::Let, std::move(kids), here);
      body.clear();
      push(body, here, std::move(let));
    }
    Stmts prefix;
    if (wrapped && site.is(NodeKind::Assign)) {
      const std::string& x = site.children[0].text();
      Node guard(NodeKind::If,
                 {call(Node::symbol("!"), {Node(NodeKind::MacroCall,
                                                {Node::symbol("@isdefined"), Node::symbol(x)})}),
                  as_block({Node::line_info(here), assign(x, Node::symbol("nothing"))}, here),
                  Node::empty()},
                 here);
      push(prefix, here, std::move(guard));
    }
    Node result = body.size() == 2 ? std::move(body[1]) : as_block(std::move(body), here);
    return {std::move(result), std::move(prefix)};
  }

  static bool contains_hole(const Node& n, std::string_view hole) {
    bool found = false;
    walk(n, [&](const Node& x, const NodePath&) {
      if (x.is(NodeKind::MacroCall) && x.children[0].text() == hole) found = true;
    });
    return found;
  }

  std::vector<Warning>* warnings_;
  std::set<std::string> used_;
};

}  // namespace

Node emit(const Node& program, std::vector<Warning>* warnings) {
  Emitted e = Emitter(warnings).node(program);
  return materialize(std::move(e.prefix), std::move(e.node));
}

Node weave_chain(const Node& program, const std::vector<std::vector<Aspect>>& passes,
                 std::vector<Warning>* warnings) {
  Node cur = program;
  for (const auto& aspects : passes) cur = emit(weave(cur, aspects), warnings);
  return cur;
}

}  // namespace hlweave
