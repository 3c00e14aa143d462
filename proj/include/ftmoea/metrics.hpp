#pragma once

#include <string>

#include "ftmoea/dataset.hpp"
#include "ftmoea/fault_tree.hpp"

namespace ftmoea {

// Which of the three metrics are active objectives.
enum class MofSetup { Sdc, Dc, Sc, Sd, C, D };

bool mof_active_s(MofSetup s);
bool mof_active_d(MofSetup s);
bool mof_active_c(MofSetup s);
MofSetup parse_mof(const std::string& name);  // throws FtError on bad name
std::string mof_name(MofSetup s);

// Placeholder stored in inactive components.
inline constexpr double kInactiveMetric = 1.0;

struct ObjectiveVector {
  double phi_s = kInactiveMetric;
  double phi_d = kInactiveMetric;
  double phi_c = kInactiveMetric;
  MofSetup setup = MofSetup::Sdc;

  // Sum of the active error metrics (phi_d and/or phi_c).
  double error_sum() const;

  // Pareto dominance over active objectives only (minimization).
  bool dominates(const ObjectiveVector& other) const;
};

// Fraction of data points whose TE label the tree fails to reproduce,
// weighted by row counts.
double phi_d(const FaultTree& ft, const FailureDataset& ds);

// Cut sets of the tree laid out over `be_names` columns.
McsMatrix ft_mcs_matrix(const FaultTree& ft,
                        const std::vector<std::string>& be_names,
                        std::size_t product_cap = kDefaultDnfProductCap);

// 1 minus the RV-coefficient of the two cut-set matrices. Either matrix
// empty yields the worst value 1.
double phi_c(const McsMatrix& m_d, const McsMatrix& m_f);

// Computes the active metrics only; a DNF-cap blowup pins phi_c at 1.
ObjectiveVector objectives(const FaultTree& ft, const FailureDataset& ds,
                           const McsMatrix& m_d, MofSetup setup,
                           std::size_t product_cap = kDefaultDnfProductCap);

}  // namespace ftmoea
