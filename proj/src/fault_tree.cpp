#include "ftmoea/fault_tree.hpp"

#include <algorithm>
#include <bit>

namespace ftmoea {

FaultTree::FaultTree(std::vector<std::string> universe, std::vector<Node> nodes,
                     int root)
    : universe_(std::move(universe)), nodes_(std::move(nodes)), root_(root) {
  if (universe_.size() > kMaxUniverse)
    throw FtError("universe exceeds " + std::to_string(kMaxUniverse) +
                  " basic events");
  {
    std::set<std::string> seen;
    for (const auto& n : universe_)
      if (!seen.insert(n).second)
        throw FtError("duplicate basic event in universe: " + n);
  }
  if (root_ < 0 || static_cast<std::size_t>(root_) >= nodes_.size())
    throw FtError("root index out of range");
  if (!nodes_[root_].is_gate) throw FtError("root must be a gate");

  // Walk from the root: validate each node once, reject cycles and shared
  // nodes (the genotype is a tree), and count gates/leaves.
  std::vector<int> state(nodes_.size(), 0);  // 0 unseen, 1 on stack, 2 done
  std::vector<std::uint64_t> leaf_mask_stack;
  std::uint64_t connected_mask = 0;
  std::vector<int> stack{root_};
  std::vector<int> order;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    if (i < 0 || static_cast<std::size_t>(i) >= nodes_.size())
      throw FtError("child index out of range");
    if (state[i] != 0) throw FtError("node shared or cycle detected");
    state[i] = 2;
    order.push_back(i);
    const Node& n = nodes_[i];
    if (n.is_gate) {
      ++gate_count_;
      if (n.children.empty()) throw FtError("gate with no children");
      if (n.kind == GateKind::Vot) {
        if (n.vot_k < 1 || n.vot_k > n.children.size())
          throw FtError("voting gate arity mismatch");
      }
      for (int c : n.children) stack.push_back(c);
    } else {
      ++leaf_count_;
      if (n.be_index < 0 ||
          static_cast<std::size_t>(n.be_index) >= universe_.size())
        throw FtError("leaf references unknown basic event");
      connected_mask |= std::uint64_t{1} << n.be_index;
    }
  }
  std::size_t reached = order.size();
  if (reached != nodes_.size())
    throw FtError("node not reachable from root");
  if (leaf_count_ == 0) throw FtError("tree has no basic-event leaf");

  for (std::size_t i = 0; i < universe_.size(); ++i)
    if (!(connected_mask >> i & 1)) disconnected_.push_back(universe_[i]);
}

std::set<std::string> FaultTree::connected_unique_bes() const {
  std::set<std::string> out;
  for (const Node& n : nodes_)
    if (!n.is_gate) out.insert(universe_[n.be_index]);
  return out;
}

bool FaultTree::evaluate_mask(std::uint64_t assignment) const {
  // Iterative post-order would avoid recursion, but tree depth stays tiny.
  struct Eval {
    const FaultTree& ft;
    std::uint64_t a;
    bool visit(int i) const {
      const Node& n = ft.nodes_[i];
      if (!n.is_gate) return a >> n.be_index & 1;
      unsigned t = 0;
      switch (n.kind) {
        case GateKind::And:
          for (int c : n.children)
            if (!visit(c)) return false;
          return true;
        case GateKind::Or:
          for (int c : n.children)
            if (visit(c)) return true;
          return false;
        case GateKind::Vot:
          for (int c : n.children)
            if (visit(c) && ++t >= n.vot_k) return true;
          return false;
      }
      return false;
    }
  };
  return Eval{*this, assignment}.visit(root_);
}

bool FaultTree::evaluate(const std::map<std::string, bool>& assignment) const {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    auto it = assignment.find(universe_[i]);
    if (it == assignment.end())
      throw FtError("assignment missing basic event: " + universe_[i]);
    if (it->second) mask |= std::uint64_t{1} << i;
  }
  return evaluate_mask(mask);
}

const std::string& FaultTree::canonical_encoding() const {
  if (!encoding_.empty()) return encoding_;
  struct Enc {
    const FaultTree& ft;
    std::string visit(int i) const {
      const Node& n = ft.nodes_[i];
      if (!n.is_gate) return ft.universe_[n.be_index];
      std::vector<std::string> parts;
      parts.reserve(n.children.size());
      for (int c : n.children) parts.push_back(visit(c));
      std::sort(parts.begin(), parts.end());
      std::string s;
      switch (n.kind) {
        case GateKind::And: s = "(&"; break;
        case GateKind::Or: s = "(|"; break;
        case GateKind::Vot: s = "(v" + std::to_string(n.vot_k); break;
      }
      for (const auto& p : parts) {
        s += ' ';
        s += p;
      }
      s += ')';
      return s;
    }
  };
  encoding_ = Enc{*this}.visit(root_);
  return encoding_;
}

bool subsumes(CutSet small, CutSet large) { return (small & large) == small; }

void minimize_cut_sets(McsSet& sets) {
  std::sort(sets.begin(), sets.end(), [](CutSet a, CutSet b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  McsSet kept;
  for (CutSet c : sets) {
    bool absorbed = false;
    for (CutSet k : kept)
      if (subsumes(k, c)) {
        absorbed = true;
        break;
      }
    if (!absorbed) kept.push_back(c);
  }
  sets.swap(kept);
}

namespace {

// Or of the child DNFs.
void merge_or(McsSet& acc, McsSet&& more, std::size_t cap) {
  acc.insert(acc.end(), more.begin(), more.end());
  minimize_cut_sets(acc);
  if (acc.size() > cap) throw DnfCapExceeded();
}

// And of two DNFs: pairwise product.
McsSet product(const McsSet& a, const McsSet& b, std::size_t cap) {
  if (a.size() * b.size() > cap) throw DnfCapExceeded();
  McsSet out;
  out.reserve(a.size() * b.size());
  for (CutSet x : a)
    for (CutSet y : b) out.push_back(x | y);
  minimize_cut_sets(out);
  if (out.size() > cap) throw DnfCapExceeded();
  return out;
}

McsSet dnf(const FaultTree& ft, int i, std::size_t cap) {
  const Node& n = ft.nodes()[i];
  if (!n.is_gate) return {std::uint64_t{1} << n.be_index};
  std::vector<McsSet> kids;
  kids.reserve(n.children.size());
  for (int c : n.children) kids.push_back(dnf(ft, c, cap));
  switch (n.kind) {
    case GateKind::Or: {
      McsSet acc;
      for (auto& k : kids) merge_or(acc, std::move(k), cap);
      return acc;
    }
    case GateKind::And: {
      McsSet acc = std::move(kids[0]);
      for (std::size_t j = 1; j < kids.size(); ++j)
        acc = product(acc, kids[j], cap);
      return acc;
    }
    case GateKind::Vot: {
      // Or over all k-subsets of Ands.
      const std::size_t m = kids.size();
      const unsigned k = n.vot_k;
      McsSet acc;
      std::vector<std::size_t> idx(k);
      for (std::size_t j = 0; j < k; ++j) idx[j] = j;
      while (true) {
        McsSet term = kids[idx[0]];
        for (std::size_t j = 1; j < k; ++j) term = product(term, kids[idx[j]], cap);
        merge_or(acc, std::move(term), cap);
        // next combination
        std::size_t j = k;
        while (j > 0 && idx[j - 1] == m - k + j - 1) --j;
        if (j == 0) break;
        ++idx[j - 1];
        for (std::size_t l = j; l < k; ++l) idx[l] = idx[l - 1] + 1;
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

McsSet FaultTree::minimal_cut_sets(std::size_t product_cap) const {
  return dnf(*this, root_, product_cap);
}

int FaultTree::be_index_of(const std::string& name) const {
  for (std::size_t i = 0; i < universe_.size(); ++i)
    if (universe_[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> cut_set_names(CutSet cs,
                                       const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (cs >> i & 1) out.push_back(names[i]);
  return out;
}

}  // namespace ftmoea
