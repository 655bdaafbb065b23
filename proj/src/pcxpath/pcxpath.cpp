#include "hlweave/pcxpath.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace hlweave {

namespace {

// Optional boolean attributes: omitted from the dump when false, but still
// visible to queries through their default.
bool has_false_default(std::string_view tag, std::string_view attribute) {
  return (tag == "module" && attribute == "bare") || (tag == "call" && attribute == "parallel") ||
         (tag == "struct" && attribute == "mutable") ||
         (tag == "for" && attribute == "comprehension");
}

class Projector {
 public:
  void node(const Node& n, NodePath& path, std::vector<XmlNode>& out) {
    std::size_t first = out.size();
    project(n, path, out);
    if (!n.attrs.empty() && out.size() > first) add_attr(out[first], n.attrs);
  }

 private:
  static void add_attr(XmlNode& x, const std::vector<std::string>& attrs) {
    std::string joined;
    for (const auto& a : attrs) joined += (joined.empty() ? "" : ",") + a;
    for (auto& [k, v] : x.attributes) {
      if (k == "attr") {
        v += "," + joined;
        return;
      }
    }
    x.attributes.emplace_back("attr", joined);
  }

  void child(const Node& n, std::size_t i, NodePath& path, std::vector<XmlNode>& out) {
    path.push_back(i);
    node(n.children[i], path, out);
    path.pop_back();
  }

  void children(const Node& n, std::size_t from, NodePath& path, std::vector<XmlNode>& out) {
    for (std::size_t i = from; i < n.children.size(); ++i) child(n, i, path, out);
  }

  XmlNode element(std::string tag, const NodePath& path) {
    XmlNode x;
    x.tag = std::move(tag);
    x.origin = path;
    return x;
  }

  struct Chain {
    std::string name;
    std::string ref;
    std::vector<NodePath> side;  // relative paths of expressions to hoist
  };

  // Decomposes an index/field access chain into its root name, the `%`
  // encoding of the accesses, and the sub-expressions evaluated along the way.
  static Chain chain(const Node& n) {
    Chain c;
    std::vector<std::string> suffix;
    std::vector<NodePath> indices;
    const Node* cur = &n;
    NodePath rel;
    while (cur->is(NodeKind::IndexRef) || cur->is(NodeKind::FieldRef)) {
      if (cur->is(NodeKind::FieldRef)) {
        suffix.push_back("." + cur->children[1].text());
      } else {
        suffix.push_back("[]");
        NodePath idx = rel;
        idx.push_back(1);
        indices.push_back(idx);
      }
      rel.push_back(0);
      cur = &cur->children[0];
    }
    if (cur->is(NodeKind::Symbol)) {
      c.name = cur->text();
    } else {
      c.side.push_back(rel);
    }
    if (!suffix.empty()) {
      c.ref = "%";
      for (auto it = suffix.rbegin(); it != suffix.rend(); ++it) c.ref += *it;
    }
    c.side.insert(c.side.end(), indices.rbegin(), indices.rend());
    return c;
  }

  void hoist(const Node& base, const std::vector<NodePath>& rels, NodePath& path,
             std::vector<XmlNode>& out) {
    for (const auto& rel : rels) {
      std::size_t depth = path.size();
      path.insert(path.end(), rel.begin(), rel.end());
      node(node_at(base, rel), path, out);
      path.resize(depth);
    }
  }

  void project(const Node& n, NodePath& path, std::vector<XmlNode>& out) {
    switch (n.kind) {
      case NodeKind::Module: {
        XmlNode x = element("module", path);
        x.attributes.emplace_back("name", n.children[0].text());
        children(n, 1, path, x.children);
        out.push_back(std::move(x));
        return;
      }
      case NodeKind::FunctionDef: {
        XmlNode x = element("function", path);
        x.attributes.emplace_back("name", n.children[0].text());
        std::string args;
        for (const auto& p : n.children[1].children) {
          args += (args.empty() ? "" : ",") + p.children[0].text();
        }
        if (!args.empty()) x.attributes.emplace_back("args", args);
        children(n, 1, path, x.children);
        out.push_back(std::move(x));
        return;
      }
      case NodeKind::StructDef: {
        XmlNode x = element("struct", path);
        x.attributes.emplace_back("name", n.children[0].text());
        if (n.children[1].bool_value()) x.attributes.emplace_back("mutable", "true");
        children(n, 2, path, x.children);
        out.push_back(std::move(x));
        return;
      }
      case NodeKind::For: {
        XmlNode x = element("for", path);
        x.attributes.emplace_back("iterc", std::to_string(n.children.size() - 1));
        children(n, 0, path, x.children);
        out.push_back(std::move(x));
        return;
      }
      case NodeKind::Call: {
        XmlNode x = element("call", path);
        const Node& callee = n.children[0];
        std::vector<NodePath> side;
        std::string name;
        std::string ref;
        if (callee.is(NodeKind::Symbol) || callee.is(NodeKind::IndexRef) ||
            callee.is(NodeKind::FieldRef)) {
          Chain c = chain(callee);
          name = c.name;
          ref = c.ref;
          for (auto& rel : c.side) {
            rel.insert(rel.begin(), 0);
            side.push_back(rel);
          }
        } else {
          side.push_back({0});
        }
        std::size_t argc = 0;
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          if (n.children[i].is(NodeKind::Assign)) {
            side.push_back({i, 1});
          } else {
            ++argc;
            side.push_back({i});
          }
        }
        x.attributes.emplace_back("name", name);
        if (!ref.empty()) x.attributes.emplace_back("ref", ref);
        x.attributes.emplace_back("argc", std::to_string(argc));
        out.push_back(std::move(x));
        hoist(n, side, path, out);
        return;
      }
      case NodeKind::IndexRef:
      case NodeKind::FieldRef: {
        XmlNode x = element("ref", path);
        Chain c = chain(n);
        x.attributes.emplace_back("name", c.name);
        if (!c.ref.empty()) x.attributes.emplace_back("ref", c.ref);
        out.push_back(std::move(x));
        hoist(n, c.side, path, out);
        return;
      }
      case NodeKind::Assign:
      case NodeKind::OpAssign:
      case NodeKind::IndexAssign:
      case NodeKind::FieldAssign: {
        XmlNode x = element("assign", path);
        Chain c;
        std::vector<NodePath> side;
        if (n.is(NodeKind::IndexAssign) || n.is(NodeKind::FieldAssign)) {
          c = chain(n.children[0]);
          c.ref = (c.ref.empty() ? "%" : c.ref) +
                  (n.is(NodeKind::IndexAssign) ? "[]" : "." + n.children[1].text());
          for (auto& rel : c.side) {
            rel.insert(rel.begin(), 0);
            side.push_back(rel);
          }
          if (n.is(NodeKind::IndexAssign)) side.push_back({1});
          side.push_back({2});
        } else {
          c = chain(n.children[0]);
          for (auto& rel : c.side) {
            rel.insert(rel.begin(), 0);
            side.push_back(rel);
          }
          side.push_back({1});
        }
        x.attributes.emplace_back("name", c.name);
        if (!c.ref.empty()) x.attributes.emplace_back("ref", c.ref);
        if (n.is(NodeKind::OpAssign)) x.attributes.emplace_back("op", "+=");
        out.push_back(std::move(x));
        hoist(n, side, path, out);
        return;
      }
      case NodeKind::MacroCall: {
        const std::string& name = n.children[0].text();
        if (name != "@time") return;
        XmlNode x = element("macrocall", path);
        x.attributes.emplace_back("name", name);
        out.push_back(std::move(x));
        children(n, 1, path, out);
        return;
      }
      case NodeKind::Let:
      case NodeKind::TupleLit: {
        // Bindings and named fields are not assignments; only their values are.
        std::vector<NodePath> side;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (n.children[i].is(NodeKind::Assign)) {
            side.push_back({i, 1});
          } else {
            side.push_back({i});
          }
        }
        hoist(n, side, path, out);
        return;
      }
      case NodeKind::AttrAnnot: {
        std::size_t first = out.size();
        child(n, 1, path, out);
        if (out.size() > first) add_attr(out[first], {n.children[0].text()});
        return;
      }
      default:
        children(n, 0, path, out);
        return;
    }
  }
};

void escape_into(std::string& out, const std::string& s) {
  for (char c : s) {
    if (c == '&') {
      out += "&amp;";
    } else if (c == '"') {
      out += "&quot;";
    } else {
      out += c;
    }
  }
}

void dump_into(std::string& out, const XmlNode& x, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "<" + x.tag;
  for (const auto& [k, v] : x.attributes) {
    out += " " + k + "=\"";
    escape_into(out, v);
    out += "\"";
  }
  if (x.children.empty()) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  for (const auto& c : x.children) dump_into(out, c, depth + 1);
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "</" + x.tag + ">\n";
}

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  Query run() {
    Query q;
    skip_space();
    while (pos_ < text_.size()) {
      q.steps.push_back(step());
      skip_space();
    }
    if (q.steps.empty()) fail("empty query");
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw QueryError(msg, static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view s) {
    skip_space();
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view s) {
    if (!eat(s)) fail("expected '" + std::string(s) + "'");
  }

  std::string name() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            text_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  // Keyword lookahead that does not consume a prefix of a longer name.
  bool keyword(std::string_view kw) {
    skip_space();
    if (text_.substr(pos_, kw.size()) != kw) return false;
    std::size_t end = pos_ + kw.size();
    if (end < text_.size() &&
        (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      return false;
    }
    pos_ = end;
    return true;
  }

  std::string literal() {
    skip_space();
    if (pos_ >= text_.size() || (text_[pos_] != '\'' && text_[pos_] != '"')) {
      fail("expected a quoted literal");
    }
    char quote = text_[pos_++];
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != quote) ++pos_;
    if (pos_ >= text_.size()) fail("unterminated literal");
    std::string s(text_.substr(start, pos_ - start));
    ++pos_;
    return s;
  }

  Step step() {
    Step s;
    if (eat("//")) {
      s.axis = Step::Axis::Descendant;
    } else if (eat("/")) {
      s.axis = Step::Axis::Child;
    } else {
      fail("expected '/' or '//'");
    }
    s.tag = eat("*") ? "*" : name();
    while (eat("[")) {
      s.predicates.push_back(or_pred());
      expect("]");
    }
    return s;
  }

  Pred or_pred() {
    Pred left = and_pred();
    while (keyword("or")) {
      Pred p;
      p.op = Pred::Op::Or;
      p.operands = {std::move(left), and_pred()};
      left = std::move(p);
    }
    return left;
  }

  Pred and_pred() {
    Pred left = unary();
    while (keyword("and")) {
      Pred p;
      p.op = Pred::Op::And;
      p.operands = {std::move(left), unary()};
      left = std::move(p);
    }
    return left;
  }

  Pred unary() {
    if (keyword("not")) {
      expect("(");
      Pred p;
      p.op = Pred::Op::Not;
      p.operands = {or_pred()};
      expect(")");
      return p;
    }
    if (keyword("contains")) {
      expect("(");
      expect("@");
      Pred p;
      p.op = Pred::Op::Contains;
      p.attribute = name();
      expect(",");
      p.literal = literal();
      expect(")");
      return p;
    }
    if (eat("(")) {
      Pred p = or_pred();
      expect(")");
      return p;
    }
    expect("@");
    Pred p;
    p.op = Pred::Op::Eq;
    p.attribute = name();
    expect("=");
    p.literal = literal();
    return p;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool holds(const Pred& p, const XmlNode& x) {
  switch (p.op) {
    case Pred::Op::Eq: {
      auto v = x.attr(p.attribute);
      return v && *v == p.literal;
    }
    case Pred::Op::Contains: {
      auto v = x.attr(p.attribute);
      return v && v->find(p.literal) != std::string::npos;
    }
    case Pred::Op::Not:
      return !holds(p.operands[0], x);
    case Pred::Op::And:
      return holds(p.operands[0], x) && holds(p.operands[1], x);
    case Pred::Op::Or:
      return holds(p.operands[0], x) || holds(p.operands[1], x);
  }
  return false;
}

void index_nodes(const XmlNode& x, std::map<const XmlNode*, std::size_t>& order) {
  order.emplace(&x, order.size());
  for (const auto& c : x.children) index_nodes(c, order);
}

void descendants(const XmlNode& x, std::vector<const XmlNode*>& out) {
  for (const auto& c : x.children) {
    out.push_back(&c);
    descendants(c, out);
  }
}

}  // namespace

std::optional<std::string> XmlNode::attr(std::string_view name) const {
  for (const auto& [k, v] : attributes) {
    if (k == name) return v;
  }
  if (has_false_default(tag, name)) return std::string("false");
  return std::nullopt;
}

XmlNode project(const Node& program) {
  XmlNode root;
  root.tag = "joinpoint";
  NodePath path;
  Projector().node(program, path, root.children);
  return root;
}

std::string dump_xml(const XmlNode& doc) {
  std::string out;
  dump_into(out, doc, 0);
  return out;
}

Query parse_query(std::string_view text) { return QueryParser(text).run(); }

std::vector<const XmlNode*> select(const Query& query, const XmlNode& doc) {
  std::map<const XmlNode*, std::size_t> order;
  index_nodes(doc, order);
  // The context starts at a virtual document node whose only child is `doc`.
  std::vector<const XmlNode*> context;
  bool at_root = true;
  for (const auto& step : query.steps) {
    std::vector<const XmlNode*> candidates;
    if (at_root) {
      candidates.push_back(&doc);
      if (step.axis == Step::Axis::Descendant) descendants(doc, candidates);
    } else {
      for (const XmlNode* c : context) {
        if (step.axis == Step::Axis::Child) {
          for (const auto& k : c->children) candidates.push_back(&k);
        } else {
          descendants(*c, candidates);
        }
      }
    }
    at_root = false;
    std::set<const XmlNode*> seen;
    std::vector<const XmlNode*> next;
    for (const XmlNode* c : candidates) {
      if (step.tag != "*" && c->tag != step.tag) continue;
      bool ok = std::all_of(step.predicates.begin(), step.predicates.end(),
                            [&](const Pred& p) { return holds(p, *c); });
      if (ok && seen.insert(c).second) next.push_back(c);
    }
    std::sort(next.begin(), next.end(),
              [&](const XmlNode* a, const XmlNode* b) { return order.at(a) < order.at(b); });
    context = std::move(next);
  }
  return context;
}

}  // namespace hlweave
