#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftmoea {

// Hard limit imposed by the mask-based evaluation/cut-set machinery.
inline constexpr std::size_t kMaxUniverse = 64;

inline constexpr std::size_t kDefaultDnfProductCap = 1'000'000;

class FtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// DNF expansion grew past the configured product cap. Callers in the
// evolutionary loop treat the individual as unevaluable for phi_c.
class DnfCapExceeded : public FtError {
 public:
  DnfCapExceeded() : FtError("DNF expansion exceeded product cap") {}
};

enum class GateKind { And, Or, Vot };

// A node is either a gate or a BE leaf. Gates own an ordered child list;
// leaves reference the universe by index. The same BE may back several
// leaves. For Vot, vot_k holds k and n is the child count.
struct Node {
  bool is_gate = false;
  GateKind kind = GateKind::And;
  unsigned vot_k = 0;
  std::vector<int> children;  // gate only
  int be_index = -1;          // leaf only
};

// Set of basic events as a bitmask over the universe ordering.
using CutSet = std::uint64_t;
using McsSet = std::vector<CutSet>;  // sorted, pairwise non-subsuming

class FaultTree {
 public:
  // Builds and validates. Throws FtError on any invariant violation
  // (childless gate, Vot arity, unreachable node, no BE leaf, >64 BEs).
  FaultTree(std::vector<std::string> universe, std::vector<Node> nodes,
            int root);

  const std::vector<std::string>& universe() const { return universe_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

  std::size_t gate_count() const { return gate_count_; }
  std::size_t leaf_count() const { return leaf_count_; }

  // BE names in the universe with no leaf referencing them.
  const std::vector<std::string>& disconnected() const { return disconnected_; }

  // Distinct BE names appearing as leaves.
  std::set<std::string> connected_unique_bes() const;

  // Top-event value for the given assignment; bit i of `assignment`
  // is the state of universe()[i].
  bool evaluate_mask(std::uint64_t assignment) const;
  bool evaluate(const std::map<std::string, bool>& assignment) const;

  // Tree size: gates plus BE leaf occurrences.
  std::size_t phi_s() const { return gate_count_ + leaf_count_; }

  // Deterministic encoding, invariant under sibling reordering.
  const std::string& canonical_encoding() const;

  // Minimal cut sets via DNF expansion with absorption. Masks are over
  // the universe ordering. Throws DnfCapExceeded past `product_cap`.
  McsSet minimal_cut_sets(std::size_t product_cap = kDefaultDnfProductCap) const;

  int be_index_of(const std::string& name) const;  // -1 if absent

 private:
  std::vector<std::string> universe_;
  std::vector<Node> nodes_;
  int root_;
  std::size_t gate_count_ = 0;
  std::size_t leaf_count_ = 0;
  std::vector<std::string> disconnected_;
  mutable std::string encoding_;  // built lazily, tree is immutable
};

// Cut-set helpers shared by MCS code paths.
bool subsumes(CutSet small, CutSet large);  // small ⊆ large
void minimize_cut_sets(McsSet& sets);       // dedupe + absorption + sort

std::vector<std::string> cut_set_names(CutSet cs,
                                       const std::vector<std::string>& names);

}  // namespace ftmoea
