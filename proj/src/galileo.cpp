#include "ftmoea/galileo.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace ftmoea {

namespace {

struct Token {
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.';
}

// Splits into `;`-terminated statements, dropping comments.
std::vector<std::vector<Token>> tokenize(const std::string& text) {
  std::vector<std::vector<Token>> statements;
  std::vector<Token> current;
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
    } else if (c == ';') {
      if (current.empty()) throw ParseError(line, col, "empty statement");
      statements.push_back(std::move(current));
      current.clear();
      ++col;
      ++i;
    } else if (name_char(c)) {
      Token t{"", line, col};
      while (i < text.size() && name_char(text[i])) {
        t.text += text[i];
        ++i;
        ++col;
      }
      current.push_back(std::move(t));
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c +
                                      "'");
    }
  }
  if (!current.empty())
    throw ParseError(current.front().line, current.front().column,
                     "statement not terminated by ';'");
  return statements;
}

// `<k>of<n>` gate type, e.g. 2of3.
bool parse_vot(const std::string& s, unsigned& k, unsigned& n) {
  auto pos = s.find("of");
  if (pos == std::string::npos || pos == 0 || pos + 2 >= s.size()) return false;
  for (char c : s.substr(0, pos))
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  for (char c : s.substr(pos + 2))
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  k = static_cast<unsigned>(std::stoul(s.substr(0, pos)));
  n = static_cast<unsigned>(std::stoul(s.substr(pos + 2)));
  return true;
}

struct GateDef {
  GateKind kind;
  unsigned vot_k = 0;
  unsigned vot_n = 0;
  std::vector<Token> children;
  Token name;
};

}  // namespace

FaultTree parse_ft(const std::string& text) {
  auto statements = tokenize(text);

  std::optional<Token> toplevel;
  std::vector<std::string> declared_bes;
  bool have_declaration = false;
  std::map<std::string, GateDef> gates;
  std::vector<std::string> gate_order;

  for (auto& st : statements) {
    const Token& head = st.front();
    if (head.text == "basicevents") {
      if (have_declaration)
        throw ParseError(head.line, head.column,
                         "duplicate basicevents declaration");
      have_declaration = true;
      for (std::size_t i = 1; i < st.size(); ++i)
        declared_bes.push_back(st[i].text);
    } else if (head.text == "toplevel") {
      if (toplevel)
        throw ParseError(head.line, head.column, "duplicate toplevel");
      if (st.size() != 2)
        throw ParseError(head.line, head.column,
                         "toplevel expects exactly one gate name");
      toplevel = st[1];
    } else {
      if (st.size() < 2)
        throw ParseError(head.line, head.column,
                         "gate statement needs a type and children");
      GateDef def;
      def.name = head;
      const Token& type = st[1];
      unsigned k = 0, n = 0;
      if (type.text == "and") {
        def.kind = GateKind::And;
      } else if (type.text == "or") {
        def.kind = GateKind::Or;
      } else if (parse_vot(type.text, k, n)) {
        def.kind = GateKind::Vot;
        def.vot_k = k;
        def.vot_n = n;
        if (k < 1 || k > n)
          throw ParseError(type.line, type.column,
                           "voting gate requires 1 <= k <= n");
      } else {
        throw ParseError(type.line, type.column,
                         "unknown gate type '" + type.text + "'");
      }
      def.children.assign(st.begin() + 2, st.end());
      if (def.children.empty())
        throw ParseError(head.line, head.column, "gate has no children");
      if (def.kind == GateKind::Vot && def.children.size() != def.vot_n)
        throw ParseError(head.line, head.column,
                         "voting gate declares " + std::to_string(def.vot_n) +
                             " inputs but has " +
                             std::to_string(def.children.size()));
      if (!gates.emplace(head.text, std::move(def)).second)
        throw ParseError(head.line, head.column,
                         "gate '" + head.text + "' defined twice");
      gate_order.push_back(head.text);
    }
  }

  if (!toplevel) throw FtError("missing toplevel declaration");
  if (!gates.count(toplevel->text))
    throw ParseError(toplevel->line, toplevel->column,
                     "toplevel gate '" + toplevel->text + "' is not defined");

  // Universe: declared list, or leaf names in first-appearance order.
  std::vector<std::string> universe;
  std::map<std::string, int> be_index;
  auto add_be = [&](const std::string& name) {
    if (!be_index.count(name)) {
      be_index[name] = static_cast<int>(universe.size());
      universe.push_back(name);
    }
  };
  if (have_declaration) {
    for (const auto& name : declared_bes) {
      if (gates.count(name))
        throw FtError("'" + name + "' declared both as basic event and gate");
      add_be(name);
    }
  } else {
    for (const auto& gname : gate_order)
      for (const Token& c : gates.at(gname).children)
        if (!gates.count(c.text)) add_be(c.text);
  }

  std::vector<Node> nodes;
  std::map<std::string, int> gate_node;  // built on demand, detects cycles
  std::vector<std::string> building;

  auto build = [&](auto&& self, const Token& ref) -> int {
    auto git = gates.find(ref.text);
    if (git == gates.end()) {
      auto bit = be_index.find(ref.text);
      if (bit == be_index.end())
        throw ParseError(ref.line, ref.column,
                         "unknown node reference '" + ref.text + "'");
      Node leaf;
      leaf.is_gate = false;
      leaf.be_index = bit->second;
      nodes.push_back(leaf);
      return static_cast<int>(nodes.size() - 1);
    }
    for (const auto& b : building)
      if (b == ref.text)
        throw ParseError(ref.line, ref.column,
                         "cycle detected through gate '" + ref.text + "'");
    if (gate_node.count(ref.text))
      throw ParseError(ref.line, ref.column,
                       "gate '" + ref.text +
                           "' used more than once (structure must be a tree)");
    building.push_back(ref.text);
    const GateDef& def = git->second;
    Node g;
    g.is_gate = true;
    g.kind = def.kind;
    g.vot_k = def.vot_k;
    for (const Token& c : def.children) g.children.push_back(self(self, c));
    building.pop_back();
    nodes.push_back(std::move(g));
    int idx = static_cast<int>(nodes.size() - 1);
    gate_node[ref.text] = idx;
    return idx;
  };
  int root = build(build, *toplevel);

  for (const auto& gname : gate_order)
    if (!gate_node.count(gname)) {
      const Token& t = gates.at(gname).name;
      throw ParseError(t.line, t.column,
                       "gate '" + gname + "' not reachable from toplevel");
    }

  return FaultTree(std::move(universe), std::move(nodes), root);
}

FaultTree load_ft(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FtError("cannot open FT file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ft(ss.str());
}

std::string serialize_ft(const FaultTree& ft) {
  const auto& nodes = ft.nodes();

  // Gate names: TE for the root, G1.. for the rest, skipping BE names.
  std::set<std::string> taken(ft.universe().begin(), ft.universe().end());
  std::map<int, std::string> gate_name;
  auto fresh = [&](const std::string& preferred) {
    if (!taken.count(preferred)) {
      taken.insert(preferred);
      return preferred;
    }
    for (int i = 1;; ++i) {
      std::string cand = preferred + "_" + std::to_string(i);
      if (!taken.count(cand)) {
        taken.insert(cand);
        return cand;
      }
    }
  };

  std::vector<int> preorder;
  {
    std::vector<int> stack{ft.root()};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      if (!nodes[i].is_gate) continue;
      preorder.push_back(i);
      const auto& ch = nodes[i].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
  }
  int counter = 0;
  for (int i : preorder)
    gate_name[i] = (i == ft.root()) ? fresh("TE")
                                    : fresh("G" + std::to_string(++counter));

  // Leaves alone reconstruct the universe iff no BE is disconnected and
  // first appearance in reading order matches the stored ordering.
  bool need_declaration = !ft.disconnected().empty();
  if (!need_declaration) {
    std::vector<int> appearance;
    std::set<int> seen;
    for (int g : preorder)
      for (int c : nodes[g].children)
        if (!nodes[c].is_gate && seen.insert(nodes[c].be_index).second)
          appearance.push_back(nodes[c].be_index);
    for (std::size_t i = 0; i < appearance.size(); ++i)
      if (appearance[i] != static_cast<int>(i)) {
        need_declaration = true;
        break;
      }
    if (appearance.size() != ft.universe().size()) need_declaration = true;
  }

  std::ostringstream out;
  if (need_declaration) {
    out << "basicevents";
    for (const auto& name : ft.universe()) out << ' ' << name;
    out << ";\n";
  }
  out << "toplevel " << gate_name[ft.root()] << ";\n";
  for (int g : preorder) {
    const Node& n = nodes[g];
    out << gate_name[g] << ' ';
    switch (n.kind) {
      case GateKind::And: out << "and"; break;
      case GateKind::Or: out << "or"; break;
      case GateKind::Vot:
        out << n.vot_k << "of" << n.children.size();
        break;
    }
    for (int c : n.children)
      out << ' '
          << (nodes[c].is_gate ? gate_name[c]
                               : ft.universe()[nodes[c].be_index]);
    out << ";\n";
  }
  return out.str();
}

void save_ft(const FaultTree& ft, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FtError("cannot write FT file: " + path);
  out << serialize_ft(ft);
}

}  // namespace ftmoea
