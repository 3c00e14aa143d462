#include "ftmoea/moea.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ftmoea/galileo.hpp"

namespace ftmoea {

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::UcReached: return "uc_reached";
    case Termination::NgReached: return "ng_reached";
    case Termination::ZeroError: return "zero_error";
  }
  return "?";
}

namespace {

// Mutable working copy of a tree. Nodes are edited in place and dead
// nodes left behind; finalize() repairs childless gates, drops anything
// unreachable and rebuilds a validated FaultTree.
struct TreeEdit {
  std::vector<std::string> universe;
  std::vector<Node> nodes;
  int root;

  explicit TreeEdit(const FaultTree& ft)
      : universe(ft.universe()), nodes(ft.nodes()), root(ft.root()) {}

  std::vector<int> parent_of() const {
    std::vector<int> parent(nodes.size(), -1);
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      for (int c : nodes[i].children) {
        parent[c] = i;
        stack.push_back(c);
      }
    }
    return parent;
  }

  std::vector<int> reachable() const {
    std::vector<int> order;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      order.push_back(i);
      for (int c : nodes[i].children) stack.push_back(c);
    }
    return order;
  }

  std::vector<int> gate_indices(bool include_root = true) const {
    std::vector<int> out;
    for (int i : reachable())
      if (nodes[i].is_gate && (include_root || i != root)) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> leaf_indices() const {
    std::vector<int> out;
    for (int i : reachable())
      if (!nodes[i].is_gate) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
  }

  void detach_child(int parent, int child) {
    auto& ch = nodes[parent].children;
    ch.erase(std::find(ch.begin(), ch.end(), child));
  }

  // Removes childless gates bottom-up (the root is never removed) and
  // clamps voting thresholds to the surviving arity.
  bool repair() {
    bool changed = true;
    while (changed) {
      changed = false;
      auto parent = parent_of();
      for (int i : reachable()) {
        Node& n = nodes[i];
        if (!n.is_gate) continue;
        if (n.children.empty()) {
          if (i == root) return false;
          detach_child(parent[i], i);
          changed = true;
          break;
        }
        if (n.kind == GateKind::Vot && n.vot_k > n.children.size())
          n.vot_k = static_cast<unsigned>(n.children.size());
      }
    }
    return true;
  }

  std::optional<FaultTree> finalize() {
    if (!repair()) return std::nullopt;
    // Compact to reachable nodes only.
    std::vector<int> order = reachable();
    std::vector<int> remap(nodes.size(), -1);
    std::vector<Node> compact;
    compact.reserve(order.size());
    for (int i : order) {
      remap[i] = static_cast<int>(compact.size());
      compact.push_back(nodes[i]);
    }
    bool has_leaf = false;
    for (Node& n : compact) {
      if (!n.is_gate) has_leaf = true;
      for (int& c : n.children) c = remap[c];
    }
    if (!has_leaf) return std::nullopt;
    try {
      return FaultTree(universe, std::move(compact), remap[root]);
    } catch (const FtError&) {
      return std::nullopt;
    }
  }
};

std::optional<FaultTree> gate_create(TreeEdit& t, Rng& rng) {
  auto gates = t.gate_indices();
  int g = gates[rng.index(gates.size())];
  // Move a random non-empty subset of g's children under the new gate.
  std::size_t take = 1 + rng.index(t.nodes[g].children.size());
  std::vector<int> picked = t.nodes[g].children;
  for (std::size_t i = picked.size() - 1; i > 0; --i)
    std::swap(picked[i], picked[rng.index(i + 1)]);
  picked.resize(take);
  Node fresh;
  fresh.is_gate = true;
  fresh.kind = rng.bernoulli(0.5) ? GateKind::And : GateKind::Or;
  for (int c : picked) {
    t.detach_child(g, c);
    fresh.children.push_back(c);
  }
  // push_back may reallocate nodes, so re-index g afterwards.
  t.nodes.push_back(std::move(fresh));
  t.nodes[g].children.push_back(static_cast<int>(t.nodes.size() - 1));
  return t.finalize();
}

std::optional<FaultTree> gate_mutate(TreeEdit& t, Rng& rng) {
  std::vector<int> gates;
  for (int i : t.gate_indices())
    if (t.nodes[i].kind != GateKind::Vot) gates.push_back(i);
  if (gates.empty()) return std::nullopt;
  Node& n = t.nodes[gates[rng.index(gates.size())]];
  n.kind = n.kind == GateKind::And ? GateKind::Or : GateKind::And;
  return t.finalize();
}

std::optional<FaultTree> gate_delete(TreeEdit& t, Rng& rng) {
  auto gates = t.gate_indices(/*include_root=*/false);
  if (gates.empty()) return std::nullopt;
  int g = gates[rng.index(gates.size())];
  auto parent = t.parent_of();
  t.detach_child(parent[g], g);
  return t.finalize();
}

std::optional<FaultTree> be_disconnect(TreeEdit& t, Rng& rng) {
  auto leaves = t.leaf_indices();
  if (leaves.size() <= 1) return std::nullopt;  // must keep a BE leaf
  int l = leaves[rng.index(leaves.size())];
  auto parent = t.parent_of();
  t.detach_child(parent[l], l);
  return t.finalize();
}

std::optional<FaultTree> be_connect(TreeEdit& t, Rng& rng,
                                    const FaultTree& original) {
  const auto& pool = original.disconnected();
  if (pool.empty()) return std::nullopt;
  const std::string& name = pool[rng.index(pool.size())];
  auto gates = t.gate_indices();
  int g = gates[rng.index(gates.size())];
  Node leaf;
  leaf.is_gate = false;
  leaf.be_index = original.be_index_of(name);
  t.nodes.push_back(leaf);
  t.nodes[g].children.push_back(static_cast<int>(t.nodes.size() - 1));
  return t.finalize();
}

std::optional<FaultTree> be_swap(TreeEdit& t, Rng& rng) {
  auto leaves = t.leaf_indices();
  auto parent = t.parent_of();
  int l = leaves[rng.index(leaves.size())];
  std::vector<int> targets;
  for (int g : t.gate_indices())
    if (g != parent[l]) targets.push_back(g);
  if (targets.empty()) return std::nullopt;
  int g = targets[rng.index(targets.size())];
  t.detach_child(parent[l], l);
  t.nodes[g].children.push_back(l);
  return t.finalize();
}

}  // namespace

std::optional<FaultTree> mutate(const FaultTree& ft, MutationKind kind,
                                Rng& rng) {
  TreeEdit t(ft);
  switch (kind) {
    case MutationKind::GateCreate: return gate_create(t, rng);
    case MutationKind::GateMutate: return gate_mutate(t, rng);
    case MutationKind::GateDelete: return gate_delete(t, rng);
    case MutationKind::BeDisconnect: return be_disconnect(t, rng);
    case MutationKind::BeConnect: return be_connect(t, rng, ft);
    case MutationKind::BeSwap: return be_swap(t, rng);
  }
  return std::nullopt;
}

namespace {

// Grafts `sub` (rooted at sub_root in sub_nodes) in place of node `at`.
std::optional<FaultTree> graft(const FaultTree& base, int at,
                               const std::vector<Node>& sub_nodes,
                               int sub_root) {
  TreeEdit t(base);
  int offset = static_cast<int>(t.nodes.size());
  for (Node n : sub_nodes) {
    for (int& c : n.children) c += offset;
    t.nodes.push_back(std::move(n));
  }
  int incoming = sub_root + offset;
  if (at == t.root) {
    if (!t.nodes[incoming].is_gate) return std::nullopt;
    t.root = incoming;
  } else {
    auto parent = t.parent_of();
    auto& ch = t.nodes[parent[at]].children;
    *std::find(ch.begin(), ch.end(), at) = incoming;
  }
  return t.finalize();
}

// Copies the subtree of `ft` rooted at `at` into a standalone node list.
std::pair<std::vector<Node>, int> extract(const FaultTree& ft, int at) {
  std::vector<Node> out;
  auto copy = [&](auto&& self, int i) -> int {
    Node n = ft.nodes()[i];
    std::vector<int> mapped;
    for (int c : n.children) mapped.push_back(self(self, c));
    n.children = std::move(mapped);
    out.push_back(std::move(n));
    return static_cast<int>(out.size() - 1);
  };
  int root = copy(copy, at);
  return {std::move(out), root};
}

}  // namespace

std::pair<FaultTree, FaultTree> crossover(const FaultTree& a,
                                          const FaultTree& b, Rng& rng) {
  if (a.universe() != b.universe())
    throw FtError("crossover requires a shared universe");
  for (int attempt = 0; attempt < 2; ++attempt) {
    int na = static_cast<int>(rng.index(a.nodes().size()));
    int nb = static_cast<int>(rng.index(b.nodes().size()));
    if (na == a.root() && nb == b.root()) continue;  // no-op swap, redraw
    auto [sub_b, root_b] = extract(b, nb);
    auto [sub_a, root_a] = extract(a, na);
    auto child1 = graft(a, na, sub_b, root_b);
    auto child2 = graft(b, nb, sub_a, root_a);
    if (child1 && child2) return {std::move(*child1), std::move(*child2)};
  }
  return {a, b};
}

std::vector<Individual> generate_offspring(const std::vector<Individual>& pop,
                                           const MoeaConfig& config,
                                           const FailureDataset& ds,
                                           const McsMatrix& m_d, Rng& rng) {
  std::vector<Individual> out;
  auto emit = [&](FaultTree ft) {
    ObjectiveVector obj =
        objectives(ft, ds, m_d, config.setup, config.dnf_product_cap);
    out.emplace_back(std::move(ft), obj);
  };

  double total = 0;
  for (double w : config.operator_weights) total += w;
  if (total <= 0) {
    // Degenerate config: nothing applicable, offspring are clones.
    for (std::size_t i = 0; out.size() < config.ps; ++i)
      out.push_back(pop[i % pop.size()]);
    return out;
  }

  constexpr std::size_t kOffspringPerSlot = 16;

  // Operators are applied recursively: sources include both the current
  // population and offspring produced earlier in this generation, so a
  // single generation can stack several edits.
  auto pick_source = [&]() -> const FaultTree& {
    std::size_t i = rng.index(pop.size() + out.size());
    return i < pop.size() ? pop[i].ft : out[i - pop.size()].ft;
  };

  // Several candidates are drawn per population slot each generation;
  // selection then condenses the enlarged pool back to ps.
  const std::size_t target = config.ps * kOffspringPerSlot;
  int stuck = 0;
  while (out.size() < target) {
    double r = rng.uniform() * total;
    std::size_t op = 0;
    for (; op + 1 < kOperatorCount; ++op) {
      r -= config.operator_weights[op];
      if (r < 0) break;
    }
    if (op == kCrossoverIndex) {
      FaultTree pa = pick_source();
      FaultTree pb = pick_source();
      auto [c1, c2] = crossover(pa, pb, rng);
      emit(std::move(c1));
      emit(std::move(c2));
      stuck = 0;
      continue;
    }
    FaultTree parent = pick_source();
    auto child = mutate(parent, static_cast<MutationKind>(op), rng);
    if (child) {
      emit(std::move(*child));
      stuck = 0;
    } else if (++stuck > 200) {
      // Every weighted operator keeps failing; fall back to a clone so the
      // loop always terminates.
      out.push_back(pop[rng.index(pop.size())]);
      stuck = 0;
    }
  }
  return out;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<ObjectiveVector>& objs) {
  const std::size_t n = objs.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> dom_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (objs[p].dominates(objs[q]))
        dominated[p].push_back(q);
      else if (objs[q].dominates(objs[p]))
        ++dom_count[p];
    }
    if (dom_count[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    fronts.push_back(current);
    std::vector<std::size_t> next;
    for (std::size_t p : current)
      for (std::size_t q : dominated[p])
        if (--dom_count[q] == 0) next.push_back(q);
    std::sort(next.begin(), next.end());
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(
    const std::vector<ObjectiveVector>& front_objs) {
  const std::size_t n = front_objs.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);
  if (n == 0) return dist;

  MofSetup setup = front_objs[0].setup;
  std::vector<double (*)(const ObjectiveVector&)> getters;
  if (mof_active_s(setup))
    getters.push_back(+[](const ObjectiveVector& o) { return o.phi_s; });
  if (mof_active_d(setup))
    getters.push_back(+[](const ObjectiveVector& o) { return o.phi_d; });
  if (mof_active_c(setup))
    getters.push_back(+[](const ObjectiveVector& o) { return o.phi_c; });

  std::vector<std::size_t> idx(n);
  for (auto get : getters) {
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return get(front_objs[a]) < get(front_objs[b]);
    });
    dist[idx.front()] = inf;
    dist[idx.back()] = inf;
    double range = get(front_objs[idx.back()]) - get(front_objs[idx.front()]);
    if (range <= 0) continue;  // degenerate column contributes nothing
    for (std::size_t j = 1; j + 1 < n; ++j) {
      if (std::isinf(dist[idx[j]])) continue;
      dist[idx[j]] += (get(front_objs[idx[j + 1]]) -
                       get(front_objs[idx[j - 1]])) /
                      range;
    }
  }
  return dist;
}

namespace {

// Ascending (active error sum, real tree size, encoding).
bool quality_less(const Individual& a, const Individual& b) {
  double ea = a.objectives.error_sum(), eb = b.objectives.error_sum();
  if (ea != eb) return ea < eb;
  if (a.ft.phi_s() != b.ft.phi_s()) return a.ft.phi_s() < b.ft.phi_s();
  return a.encoding < b.encoding;
}

}  // namespace

std::vector<Individual> select_next(std::vector<Individual> pool,
                                    std::size_t ps, bool allow_duplicates) {
  if (!allow_duplicates) {
    std::set<std::string> seen;
    std::vector<Individual> unique;
    unique.reserve(pool.size());
    for (auto& ind : pool)
      if (seen.insert(ind.encoding).second) unique.push_back(std::move(ind));
    pool = std::move(unique);
  }

  std::vector<ObjectiveVector> objs;
  objs.reserve(pool.size());
  for (const auto& ind : pool) objs.push_back(ind.objectives);
  auto fronts = fast_nondominated_sort(objs);

  std::vector<Individual> next;
  next.reserve(std::min(ps, pool.size()));
  for (const auto& front : fronts) {
    if (next.size() >= ps) break;
    std::vector<std::size_t> members = front;
    if (next.size() + members.size() <= ps) {
      std::sort(members.begin(), members.end(),
                [&](std::size_t a, std::size_t b) {
                  return quality_less(pool[a], pool[b]);
                });
      for (std::size_t i : members) next.push_back(std::move(pool[i]));
    } else {
      // Break the overflowing front by descending crowding distance.
      std::vector<ObjectiveVector> front_objs;
      front_objs.reserve(members.size());
      for (std::size_t i : members) front_objs.push_back(pool[i].objectives);
      auto dist = crowding_distance(front_objs);
      std::vector<std::size_t> order(members.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        return quality_less(pool[members[a]], pool[members[b]]);
      });
      std::size_t slots = ps - next.size();
      // Elitism: the front's best member always survives the break.
      std::size_t best = 0;
      for (std::size_t i = 1; i < members.size(); ++i)
        if (quality_less(pool[members[i]], pool[members[best]])) best = i;
      bool best_kept = false;
      for (std::size_t j = 0; j < slots; ++j)
        if (order[j] == best) best_kept = true;
      if (!best_kept) {
        auto it = std::find(order.begin(), order.end(), best);
        order.erase(it);
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(slots) - 1,
                     best);
      }
      for (std::size_t i : order) {
        if (next.size() >= ps) break;
        next.push_back(std::move(pool[members[i]]));
      }
    }
  }
  return next;
}

std::size_t best_individual(const std::vector<Individual>& front1) {
  if (front1.empty()) throw FtError("empty front");
  std::size_t best = 0;
  for (std::size_t i = 1; i < front1.size(); ++i)
    if (quality_less(front1[i], front1[best])) best = i;
  return best;
}

std::vector<FaultTree> init_parents(ParentStrategy strategy,
                                    const std::vector<std::string>& universe,
                                    const McsMatrix* m_d,
                                    const std::string& parent_file) {
  auto flat = [&](GateKind kind) {
    std::vector<Node> nodes;
    Node g;
    g.is_gate = true;
    g.kind = kind;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      Node leaf;
      leaf.be_index = static_cast<int>(i);
      nodes.push_back(leaf);
      g.children.push_back(static_cast<int>(i));
    }
    nodes.push_back(std::move(g));
    return FaultTree(universe, std::move(nodes),
                     static_cast<int>(universe.size()));
  };

  switch (strategy) {
    case ParentStrategy::OrAndPair:
      return {flat(GateKind::Or), flat(GateKind::And)};
    case ParentStrategy::Dnf: {
      if (m_d == nullptr || m_d->empty())
        throw FtError("DNF parent strategy requires a non-empty cut-set matrix");
      std::vector<Node> nodes;
      Node top;
      top.is_gate = true;
      top.kind = GateKind::Or;
      for (std::uint64_t row : m_d->rows) {
        Node g;
        g.is_gate = true;
        g.kind = GateKind::And;
        for (std::size_t i = 0; i < universe.size(); ++i)
          if (row >> i & 1) {
            Node leaf;
            leaf.be_index = static_cast<int>(i);
            nodes.push_back(leaf);
            g.children.push_back(static_cast<int>(nodes.size() - 1));
          }
        nodes.push_back(std::move(g));
        top.children.push_back(static_cast<int>(nodes.size() - 1));
      }
      nodes.push_back(std::move(top));
      return {FaultTree(universe, std::move(nodes),
                        static_cast<int>(nodes.size() - 1))};
    }
    case ParentStrategy::File: {
      FaultTree loaded = load_ft(parent_file);
      // Rebuild over the dataset universe so bit layouts agree.
      std::vector<Node> nodes = loaded.nodes();
      for (Node& n : nodes) {
        if (n.is_gate) continue;
        const std::string& name = loaded.universe()[n.be_index];
        auto it = std::find(universe.begin(), universe.end(), name);
        if (it == universe.end())
          throw FtError("parent FT uses basic event '" + name +
                        "' absent from the dataset universe");
        n.be_index = static_cast<int>(it - universe.begin());
      }
      return {FaultTree(universe, std::move(nodes), loaded.root())};
    }
  }
  throw FtError("unknown parent strategy");
}

RunResult run(const MoeaConfig& config, const FailureDataset& ds) {
  if (config.ps < 2) throw FtError("population size must be at least 2");
  if (config.ng < 1 || config.uc < 1)
    throw FtError("generation limits must be positive");
  if (!ds.has_failures())
    throw FtError("dataset has no TE=1 observations; no And/Or tree can fit it");

  const bool need_mcs = mof_active_c(config.setup) ||
                        config.parent_strategy == ParentStrategy::Dnf;
  McsMatrix m_d;
  m_d.be_names = ds.be_names;
  if (need_mcs) m_d = extract_mcs_from_data(ds);

  Rng rng(config.seed);
  auto start = std::chrono::steady_clock::now();

  std::vector<Individual> pop;
  for (FaultTree& ft :
       init_parents(config.parent_strategy, ds.be_names, &m_d,
                    config.parent_file)) {
    ObjectiveVector obj =
        objectives(ft, ds, m_d, config.setup, config.dnf_product_cap);
    pop.emplace_back(std::move(ft), obj);
  }
  // Grow the initial population from the parents up to ps before the
  // generational loop starts.
  if (pop.size() < config.ps) {
    std::vector<Individual> grown =
        generate_offspring(pop, config, ds, m_d, rng);
    for (auto& ind : grown) pop.push_back(std::move(ind));
    pop = select_next(std::move(pop), config.ps, config.allow_duplicates);
  }

  RunResult result;
  const bool size_off = config.setup == MofSetup::Dc ||
                        config.setup == MofSetup::C ||
                        config.setup == MofSetup::D;

  std::string prev_best;
  std::size_t unchanged = 0;
  result.termination = Termination::NgReached;

  for (std::size_t gen = 1; gen <= config.ng; ++gen) {
    std::vector<Individual> offspring =
        generate_offspring(pop, config, ds, m_d, rng);
    std::vector<Individual> pool = pop;
    for (auto& ind : offspring) pool.push_back(std::move(ind));
    std::size_t pool_size = pool.size();
    pop = select_next(std::move(pool), config.ps, config.allow_duplicates);

    std::vector<ObjectiveVector> objs;
    objs.reserve(pop.size());
    for (const auto& ind : pop) objs.push_back(ind.objectives);
    auto fronts = fast_nondominated_sort(objs);
    std::vector<Individual> front1;
    for (std::size_t i : fronts.front()) front1.push_back(pop[i]);
    const Individual& best = front1[best_individual(front1)];

    GenerationLog log;
    log.generation = gen;
    log.best_phi_s = static_cast<double>(best.ft.phi_s());
    log.best_phi_d = best.objectives.phi_d;
    log.best_phi_c = best.objectives.phi_c;
    for (const auto& ind : pop) {
      log.mean_phi_s += static_cast<double>(ind.ft.phi_s());
      log.mean_phi_d += ind.objectives.phi_d;
      log.mean_phi_c += ind.objectives.phi_c;
    }
    log.mean_phi_s /= static_cast<double>(pop.size());
    log.mean_phi_d /= static_cast<double>(pop.size());
    log.mean_phi_c /= static_cast<double>(pop.size());
    log.front1_size = front1.size();
    log.pool_size = pool_size;
    log.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    result.generations.push_back(log);

    bool done = false;
    if (size_off && best.objectives.error_sum() == 0.0) {
      result.termination = Termination::ZeroError;
      done = true;
    } else {
      if (best.encoding == prev_best)
        ++unchanged;
      else
        unchanged = 0;
      prev_best = best.encoding;
      if (unchanged >= config.uc) {
        result.termination = Termination::UcReached;
        done = true;
      }
    }
    if (done || gen == config.ng) {
      result.pareto_front = std::move(front1);
      result.best_index = best_individual(result.pareto_front);
      break;
    }
  }
  return result;
}

}  // namespace ftmoea
