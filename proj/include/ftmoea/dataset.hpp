#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftmoea/fault_tree.hpp"
#include "ftmoea/rng.hpp"

namespace ftmoea {

struct DatasetRow {
  std::uint64_t assignment = 0;  // bit i = state of be_names[i]
  bool te = false;
  std::uint64_t count = 1;
};

// Labeled binary failure observations, aggregated by unique assignment.
struct FailureDataset {
  std::vector<std::string> be_names;
  std::vector<DatasetRow> rows;  // sorted by assignment, unique

  std::uint64_t n_points() const;
  std::size_t width() const { return be_names.size(); }
  bool has_failures() const;  // any TE=1 row

  // Canonical row order so equal datasets compare equal.
  void normalize();
};

// Binary cut-set matrix over an ordered BE universe; rows are pairwise
// non-subsuming and duplicate-free.
struct McsMatrix {
  std::vector<std::string> be_names;
  std::vector<std::uint64_t> rows;

  bool empty() const { return rows.empty(); }
};

// Monte Carlo draw: each BE independently Bernoulli(p[i]), labeled with
// the truth tree. Deterministic for a fixed seed.
FailureDataset generate_dataset(const FaultTree& truth, std::uint64_t n_points,
                                const std::vector<double>& p,
                                std::uint64_t seed);

// All 2^w assignments once each.
FailureDataset generate_exhaustive(const FaultTree& truth,
                                   std::size_t max_width = 24);

// Draws batches of n until every assignment has been observed.
FailureDataset generate_complete_by_sampling(const FaultTree& truth,
                                             std::uint64_t batch,
                                             const std::vector<double>& p,
                                             std::uint64_t seed,
                                             std::size_t max_width = 24);

bool check_complete(const FailureDataset& ds);

// Row-index pairs (i, j) where rows[i] dominates rows[j] bitwise yet
// te[i]=0 and te[j]=1.
std::vector<std::pair<std::size_t, std::size_t>> check_monotonic(
    const FailureDataset& ds);

// Greedy minimal-order extraction over the TE=1 rows; ties broken by
// lowest bit pattern. Empty matrix when no failures are observed.
McsMatrix extract_mcs_from_data(const FailureDataset& ds);

// Appends `rho` BE columns that never influence TE. Sampled mode draws
// Bernoulli(0.5) per original data point; cross mode pairs every row with
// all 2^rho patterns, preserving completeness.
FailureDataset inject_superfluous(const FailureDataset& ds, unsigned rho,
                                  std::uint64_t seed, bool cross = false);

// CSV: header `<BE...>,TE,count`, cells in {0,1}, LF endings, no quoting.
FailureDataset read_csv(const std::string& path);
void write_csv(const FailureDataset& ds, const std::string& path);
std::string to_csv(const FailureDataset& ds);
FailureDataset parse_csv(const std::string& text);

}  // namespace ftmoea
