#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftmoea/dataset.hpp"
#include "ftmoea/fault_tree.hpp"
#include "ftmoea/metrics.hpp"
#include "ftmoea/rng.hpp"

namespace ftmoea {

struct Individual {
  FaultTree ft;
  ObjectiveVector objectives;
  std::string encoding;

  Individual(FaultTree tree, ObjectiveVector obj)
      : ft(std::move(tree)), objectives(obj) {
    encoding = ft.canonical_encoding();
  }
};

enum class MutationKind {
  GateCreate,
  GateMutate,
  GateDelete,
  BeDisconnect,
  BeConnect,
  BeSwap,
};

// Operator weights, indexed by MutationKind order with crossover last.
inline constexpr std::size_t kOperatorCount = 7;
inline constexpr std::size_t kCrossoverIndex = 6;

enum class ParentStrategy { OrAndPair, Dnf, File };

struct MoeaConfig {
  std::size_t ps = 400;
  std::size_t ng = 100;
  std::size_t uc = 20;
  MofSetup setup = MofSetup::Sdc;
  ParentStrategy parent_strategy = ParentStrategy::OrAndPair;
  std::string parent_file;  // strategy File only
  std::uint64_t seed = 0;
  std::size_t dnf_product_cap = kDefaultDnfProductCap;
  std::array<double, kOperatorCount> operator_weights{1, 1, 1, 1, 1, 1, 1};
  bool allow_duplicates = false;
};

struct GenerationLog {
  std::size_t generation = 0;
  double best_phi_s = 0, best_phi_d = 0, best_phi_c = 0;
  double mean_phi_s = 0, mean_phi_d = 0, mean_phi_c = 0;
  std::size_t front1_size = 0;
  std::size_t pool_size = 0;
  std::int64_t elapsed_ms = 0;
};

enum class Termination { UcReached, NgReached, ZeroError };
std::string termination_name(Termination t);

struct RunResult {
  std::vector<Individual> pareto_front;
  std::size_t best_index = 0;  // into pareto_front
  std::vector<GenerationLog> generations;
  Termination termination = Termination::NgReached;

  const Individual& best() const { return pareto_front[best_index]; }
};

// Parent population for the chosen strategy.
std::vector<FaultTree> init_parents(ParentStrategy strategy,
                                    const std::vector<std::string>& universe,
                                    const McsMatrix* m_d,
                                    const std::string& parent_file = "");

// Applies one unary operator; nullopt when the kind is inapplicable or
// the repaired result would be invalid.
std::optional<FaultTree> mutate(const FaultTree& ft, MutationKind kind,
                                Rng& rng);

// Subtree/leaf exchange; falls back to clones when a drawn swap cannot
// produce two valid trees.
std::pair<FaultTree, FaultTree> crossover(const FaultTree& a,
                                          const FaultTree& b, Rng& rng);

std::vector<Individual> generate_offspring(const std::vector<Individual>& pop,
                                           const MoeaConfig& config,
                                           const FailureDataset& ds,
                                           const McsMatrix& m_d, Rng& rng);

// Fronts of indices; dominance over active objectives, minimization.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<ObjectiveVector>& objs);

std::vector<double> crowding_distance(
    const std::vector<ObjectiveVector>& front_objs);

// Elitist NSGA-II selection over the deduplicated parent+offspring pool.
std::vector<Individual> select_next(std::vector<Individual> pool,
                                    std::size_t ps,
                                    bool allow_duplicates = false);

std::size_t best_individual(const std::vector<Individual>& front1);

RunResult run(const MoeaConfig& config, const FailureDataset& ds);

}  // namespace ftmoea
