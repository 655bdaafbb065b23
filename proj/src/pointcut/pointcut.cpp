#include "hlweave/pointcut.hpp"

#include <algorithm>
#include <cctype>

#include "hlweave/pcxpath.hpp"

namespace hlweave {

std::string NamePattern::describe() const {
  if (mode == Mode::Exact) return ":" + text;
  return "\"" + text + "\"";
}

bool match_name(const NamePattern& pattern, std::string_view candidate) {
  if (pattern.mode == NamePattern::Mode::Exact) return candidate == pattern.text;
  return candidate.find(pattern.text) != std::string_view::npos;
}

std::string ArgMatcher::describe() const {
  static const char* prefixes[] = {"A", "VA", "KA", "KVA"};
  std::string s = prefixes[static_cast<int>(role)] + type_name;
  if (symbol) s += "(:" + *symbol + ")";
  return s;
}

std::optional<ArgMatcher> parse_arg_matcher(std::string_view token) {
  ArgMatcher m;
  std::string_view rest;
  for (auto [prefix, role] : {std::pair{"KVA", ArgMatcher::Role::VariadicKeyword},
                              std::pair{"KA", ArgMatcher::Role::Keyword},
                              std::pair{"VA", ArgMatcher::Role::Variadic},
                              std::pair{"A", ArgMatcher::Role::Positional}}) {
    std::string_view p = prefix;
    if (token.substr(0, p.size()) == p && token.size() > p.size() &&
        std::isupper(static_cast<unsigned char>(token[p.size()]))) {
      m.role = role;
      rest = token.substr(p.size());
      break;
    }
  }
  if (rest.empty()) return std::nullopt;
  std::size_t paren = rest.find('(');
  m.type_name = std::string(rest.substr(0, paren));
  if (!is_identifier(m.type_name)) return std::nullopt;
  if (paren != std::string_view::npos) {
    std::string_view inner = rest.substr(paren + 1);
    if (inner.empty() || inner.back() != ')') return std::nullopt;
    inner.remove_suffix(1);
    if (!inner.empty()) {
      if (inner[0] != ':' || !is_identifier(inner.substr(1))) return std::nullopt;
      m.symbol = std::string(inner.substr(1));
    }
  }
  if (m.role == ArgMatcher::Role::Keyword && !m.symbol) return std::nullopt;
  if (m.role == ArgMatcher::Role::VariadicKeyword && m.type_name != "Any") return std::nullopt;
  return m;
}

namespace {

bool matcher_accepts(const ArgMatcher& m, const Node& param, bool ignore_types) {
  const std::string& name = param.children[0].text();
  if (m.symbol && *m.symbol != name) return false;
  if (ignore_types || m.type_name == "Any") return true;
  const Node& type = param.children[1];
  return type.is(NodeKind::Symbol) && type.text() == m.type_name;
}

bool match_args_impl(const std::vector<ArgMatcher>& matchers, const Node& params,
                     bool ignore_types) {
  auto pick_params = [&](NodeKind kind) {
    std::vector<const Node*> out;
    for (const auto& p : params.children) {
      if (p.is(kind)) out.push_back(&p);
    }
    return out;
  };
  auto pick_matchers = [&](ArgMatcher::Role role) {
    std::vector<const ArgMatcher*> out;
    for (const auto& m : matchers) {
      if (m.role == role) out.push_back(&m);
    }
    return out;
  };
  auto in_order = [&](NodeKind kind, ArgMatcher::Role role) {
    auto ps = pick_params(kind);
    auto ms = pick_matchers(role);
    if (ps.size() != ms.size()) return false;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!matcher_accepts(*ms[i], *ps[i], ignore_types)) return false;
    }
    return true;
  };
  if (!in_order(NodeKind::Param, ArgMatcher::Role::Positional)) return false;
  if (!in_order(NodeKind::VarParam, ArgMatcher::Role::Variadic)) return false;
  if (!in_order(NodeKind::KwVarParam, ArgMatcher::Role::VariadicKeyword)) return false;

  // Keyword matchers pair with keyword params by symbol, not position.
  auto ps = pick_params(NodeKind::KwParam);
  auto ms = pick_matchers(ArgMatcher::Role::Keyword);
  if (ps.size() != ms.size()) return false;
  std::vector<bool> used(ps.size(), false);
  for (const ArgMatcher* m : ms) {
    bool found = false;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!used[i] && matcher_accepts(*m, *ps[i], ignore_types)) {
        used[i] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::string root_name(const Node& n) {
  const Node* cur = &n;
  while (cur->is(NodeKind::IndexRef) || cur->is(NodeKind::FieldRef)) cur = &cur->children[0];
  return cur->is(NodeKind::Symbol) ? cur->text() : std::string();
}

std::string callee_name(const Node& callee) {
  if (callee.is(NodeKind::Symbol)) return callee.text();
  if (callee.is(NodeKind::FieldRef)) return callee.children[1].text();
  return {};
}

// Syntactic positions that look like join points but are not evaluated as
// one: keyword arguments, named-tuple fields, let bindings, lvalues, callees.
bool binding_position(const Node* parent, std::size_t index, NodeKind kind) {
  if (!parent) return false;
  if (kind == NodeKind::Assign) {
    if (parent->is(NodeKind::Call) && index > 0) return true;
    if (parent->is(NodeKind::TupleLit)) return true;
    if (parent->is(NodeKind::Let) && index + 1 < parent->children.size()) return true;
  }
  if (kind == NodeKind::IndexRef || kind == NodeKind::FieldRef) {
    if (parent->is(NodeKind::OpAssign) && index == 0) return true;
    if (parent->is(NodeKind::Call) && index == 0) return true;
  }
  return false;
}

bool site_matches(const Pointcut& pc, const Node& n, const Node* parent, std::size_t index,
                  std::string* name) {
  auto check = [&](std::string candidate) {
    if (!match_name(pc.pattern, candidate)) return false;
    *name = std::move(candidate);
    return true;
  };
  switch (pc.kind) {
    case PointcutKind::ExecFunc:
      if (!n.is(NodeKind::FunctionDef)) return false;
      if (pc.arg_matchers && !match_args(*pc.arg_matchers, n.children[1])) return false;
      return check(n.children[0].text());
    case PointcutKind::Module:
      return n.is(NodeKind::Module) && check(n.children[0].text());
    case PointcutKind::Struct:
      return n.is(NodeKind::StructDef) && check(n.children[0].text());
    case PointcutKind::CallFunc:
      return n.is(NodeKind::Call) && check(callee_name(n.children[0]));
    case PointcutKind::Assign:
      if (binding_position(parent, index, n.kind)) return false;
      if (n.is(NodeKind::Assign)) return check(n.children[0].text());
      return n.is(NodeKind::OpAssign) && n.children[0].is(NodeKind::Symbol) &&
             check(n.children[0].text());
    case PointcutKind::AssignAry:
      if (n.is(NodeKind::IndexAssign)) return check(root_name(n.children[0]));
      return n.is(NodeKind::OpAssign) && n.children[0].is(NodeKind::IndexRef) &&
             check(root_name(n.children[0]));
    case PointcutKind::AssignSt:
      if (n.is(NodeKind::FieldAssign)) return check(root_name(n.children[0]));
      return n.is(NodeKind::OpAssign) && n.children[0].is(NodeKind::FieldRef) &&
             check(root_name(n.children[0]));
    case PointcutKind::RefAry:
      return n.is(NodeKind::IndexRef) && !binding_position(parent, index, n.kind) &&
             check(root_name(n.children[0]));
    case PointcutKind::RefSt:
      return n.is(NodeKind::FieldRef) && !binding_position(parent, index, n.kind) &&
             check(root_name(n.children[0]));
    case PointcutKind::Attr:
      for (const auto& a : n.attrs) {
        if (match_name(pc.pattern, a)) {
          *name = a;
          return true;
        }
      }
      return false;
    case PointcutKind::XPath:
      return false;
  }
  return false;
}

JPKind kind_for_pointcut(PointcutKind k) {
  switch (k) {
    case PointcutKind::ExecFunc:
      return JPKind::ExecFunc;
    case PointcutKind::Module:
      return JPKind::Module;
    case PointcutKind::Struct:
      return JPKind::Struct;
    case PointcutKind::CallFunc:
      return JPKind::CallFunc;
    case PointcutKind::Assign:
    case PointcutKind::AssignAry:
    case PointcutKind::AssignSt:
      return JPKind::Assign;
    case PointcutKind::RefAry:
    case PointcutKind::RefSt:
      return JPKind::Ref;
    default:
      return JPKind::Default;
  }
}

JPKind jp_kind_for_attr(const Node& n) {
  if (n.is(NodeKind::Call)) return JPKind::CallFunc;
  if (n.is(NodeKind::Assign)) return JPKind::Assign;
  return JPKind::Default;
}

template <typename F>
void walk_with_parent(const Node& n, const Node* parent, std::size_t index, NodePath& path,
                      F&& visit) {
  visit(n, parent, index, path);
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    path.push_back(i);
    walk_with_parent(n.children[i], &n, i, path, visit);
    path.pop_back();
  }
}

}  // namespace

bool match_args(const std::vector<ArgMatcher>& matchers, const Node& params) {
  return match_args_impl(matchers, params, false);
}

Pointcut Pointcut::make(PointcutKind kind, NamePattern pattern,
                        std::optional<std::vector<ArgMatcher>> matchers) {
  Pointcut pc;
  pc.kind = kind;
  pc.pattern = std::move(pattern);
  pc.arg_matchers = std::move(matchers);
  pc.description = std::string(pointcut_kind_name(kind)) + "(" + pc.pattern.describe();
  if (pc.arg_matchers) {
    pc.description += ", [";
    for (std::size_t i = 0; i < pc.arg_matchers->size(); ++i) {
      if (i > 0) pc.description += ", ";
      pc.description += (*pc.arg_matchers)[i].describe();
    }
    pc.description += "]";
  }
  pc.description += ")";
  return pc;
}

Pointcut Pointcut::make_xpath(std::string query) {
  Pointcut pc;
  pc.kind = PointcutKind::XPath;
  pc.xpath = std::move(query);
  pc.description = "PCXPath(\"" + pc.xpath + "\")";
  return pc;
}

std::string_view pointcut_kind_name(PointcutKind kind) {
  static constexpr std::string_view names[] = {
      "PCExecFunc", "PCModule", "PCStruct", "PCCallFunc", "PCAssign", "PCAssignAry",
      "PCAssignSt", "PCRefAry", "PCRefSt",  "PCAttr",     "PCXPath"};
  return names[static_cast<int>(kind)];
}

std::string_view jp_kind_name(JPKind kind) {
  static constexpr std::string_view names[] = {"JPExecFunc", "JPModule", "JPStruct", "JPCallFunc",
                                               "JPAssign",   "JPRef",    "JPDefault"};
  return names[static_cast<int>(kind)];
}

JPKind jp_kind_for_node(const Node& n) {
  switch (n.kind) {
    case NodeKind::FunctionDef:
      return JPKind::ExecFunc;
    case NodeKind::Module:
      return JPKind::Module;
    case NodeKind::StructDef:
      return JPKind::Struct;
    case NodeKind::Call:
      return JPKind::CallFunc;
    case NodeKind::Assign:
    case NodeKind::OpAssign:
    case NodeKind::IndexAssign:
    case NodeKind::FieldAssign:
      return JPKind::Assign;
    case NodeKind::IndexRef:
    case NodeKind::FieldRef:
      return JPKind::Ref;
    default:
      return JPKind::Default;
  }
}

JoinPoint make_join_point(JPKind kind, const Node& n, std::string description,
                          std::string fallback_name) {
  JoinPoint jp;
  jp.kind = kind;
  jp.original = n;
  jp.pointcut_description = std::move(description);
  jp.loc = n.loc;
  switch (n.kind) {
    case NodeKind::FunctionDef:
      jp.name = n.children[0].text();
      for (const auto& p : n.children[1].children) {
        if (p.is(NodeKind::Param) || p.is(NodeKind::VarParam)) {
          jp.arg_exprs.push_back(p.children[0]);
        } else {
          jp.kw_exprs.emplace_back(p.children[0].text(), p.children[0]);
        }
      }
      break;
    case NodeKind::Module:
    case NodeKind::StructDef:
      jp.name = n.children[0].text();
      break;
    case NodeKind::Call:
      jp.name = callee_name(n.children[0]);
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        const Node& a = n.children[i];
        if (a.is(NodeKind::Assign)) {
          jp.kw_exprs.emplace_back(a.children[0].text(), a.children[1]);
        } else {
          jp.arg_exprs.push_back(a);
        }
      }
      break;
    case NodeKind::AndAnd:
    case NodeKind::OrOr:
      jp.arg_exprs = {n.children[0], n.children[1]};
      break;
    case NodeKind::Assign:
      jp.name = n.children[0].text();
      jp.arg_exprs = {n.children[1]};
      break;
    case NodeKind::OpAssign:
      jp.name = root_name(n.children[0]);
      jp.arg_exprs = {n.children[1]};
      break;
    case NodeKind::IndexRef:
      jp.name = root_name(n.children[0]);
      jp.arg_exprs = {n.children[1]};
      break;
    case NodeKind::FieldRef:
      jp.name = root_name(n.children[0]);
      break;
    case NodeKind::IndexAssign:
      jp.name = root_name(n.children[0]);
      jp.arg_exprs = {n.children[1], n.children[2]};
      break;
    case NodeKind::FieldAssign:
      jp.name = root_name(n.children[0]);
      jp.arg_exprs = {n.children[2]};
      break;
    default:
      break;
  }
  if (jp.name.empty()) jp.name = std::move(fallback_name);
  return jp;
}

std::vector<Match> scan(const Pointcut& pc, const Node& program) {
  std::vector<Match> out;
  if (pc.kind == PointcutKind::XPath) {
    XmlNode doc = project(program);
    for (const XmlNode* x : select(parse_query(pc.xpath), doc)) {
      if (!x->origin) continue;
      const Node& n = node_at(program, *x->origin);
      std::string name = x->attr("name").value_or("");
      out.push_back({*x->origin, make_join_point(jp_kind_for_node(n), n, pc.description, name)});
    }
    std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) { return a.path < b.path; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Match& a, const Match& b) { return a.path == b.path; }),
              out.end());
    return out;
  }
  NodePath path;
  walk_with_parent(program, nullptr, 0, path,
                   [&](const Node& n, const Node* parent, std::size_t index, const NodePath& p) {
                     std::string name;
                     if (!site_matches(pc, n, parent, index, &name)) return;
                     JPKind kind = pc.kind == PointcutKind::Attr ? jp_kind_for_attr(n)
                                                                 : kind_for_pointcut(pc.kind);
                     out.push_back({p, make_join_point(kind, n, pc.description, name)});
                   });
  return out;
}

std::vector<NearMiss> near_misses(const Pointcut& pc, const Node& program) {
  std::vector<NearMiss> out;
  if (pc.kind != PointcutKind::ExecFunc || !pc.arg_matchers) return out;
  walk(program, [&](const Node& n, const NodePath& p) {
    if (!n.is(NodeKind::FunctionDef) || !match_name(pc.pattern, n.children[0].text())) return;
    const Node& params = n.children[1];
    if (match_args_impl(*pc.arg_matchers, params, false)) return;
    if (match_args_impl(*pc.arg_matchers, params, true)) {
      out.push_back({p, n.children[0].text(), n.loc});
    }
  });
  return out;
}

}  // namespace hlweave
