#include "ftmoea/metrics.hpp"

#include <bit>
#include <cmath>

namespace ftmoea {

bool mof_active_s(MofSetup s) {
  return s == MofSetup::Sdc || s == MofSetup::Sc || s == MofSetup::Sd;
}

bool mof_active_d(MofSetup s) {
  return s == MofSetup::Sdc || s == MofSetup::Dc || s == MofSetup::Sd ||
         s == MofSetup::D;
}

bool mof_active_c(MofSetup s) {
  return s == MofSetup::Sdc || s == MofSetup::Dc || s == MofSetup::Sc ||
         s == MofSetup::C;
}

MofSetup parse_mof(const std::string& name) {
  if (name == "sdc") return MofSetup::Sdc;
  if (name == "dc") return MofSetup::Dc;
  if (name == "sc") return MofSetup::Sc;
  if (name == "sd") return MofSetup::Sd;
  if (name == "c") return MofSetup::C;
  if (name == "d") return MofSetup::D;
  throw FtError("unknown m.o.f. setup '" + name +
                "' (expected sdc, dc, sc, sd, c, or d)");
}

std::string mof_name(MofSetup s) {
  switch (s) {
    case MofSetup::Sdc: return "sdc";
    case MofSetup::Dc: return "dc";
    case MofSetup::Sc: return "sc";
    case MofSetup::Sd: return "sd";
    case MofSetup::C: return "c";
    case MofSetup::D: return "d";
  }
  return "?";
}

double ObjectiveVector::error_sum() const {
  double e = 0.0;
  if (mof_active_d(setup)) e += phi_d;
  if (mof_active_c(setup)) e += phi_c;
  return e;
}

bool ObjectiveVector::dominates(const ObjectiveVector& other) const {
  bool strictly = false;
  auto cmp = [&](double a, double b) {
    if (a > b) return false;
    if (a < b) strictly = true;
    return true;
  };
  if (mof_active_s(setup) && !cmp(phi_s, other.phi_s)) return false;
  if (mof_active_d(setup) && !cmp(phi_d, other.phi_d)) return false;
  if (mof_active_c(setup) && !cmp(phi_c, other.phi_c)) return false;
  return strictly;
}

double phi_d(const FaultTree& ft, const FailureDataset& ds) {
  // Map dataset columns onto universe bit positions.
  std::vector<int> col_to_bit(ds.width());
  for (std::size_t i = 0; i < ds.width(); ++i) {
    int bit = ft.be_index_of(ds.be_names[i]);
    if (bit < 0)
      throw FtError("dataset column '" + ds.be_names[i] +
                    "' is not in the tree universe");
    col_to_bit[i] = bit;
  }
  for (const auto& name : ft.connected_unique_bes())
    if (std::find(ds.be_names.begin(), ds.be_names.end(), name) ==
        ds.be_names.end())
      throw FtError("tree uses basic event '" + name +
                    "' absent from the dataset");

  bool identity = ds.width() == ft.universe().size();
  if (identity)
    for (std::size_t i = 0; i < ds.width(); ++i)
      if (col_to_bit[i] != static_cast<int>(i)) {
        identity = false;
        break;
      }

  std::uint64_t matched = 0, total = 0;
  for (const auto& r : ds.rows) {
    std::uint64_t mask = r.assignment;
    if (!identity) {
      mask = 0;
      for (std::size_t i = 0; i < ds.width(); ++i)
        if (r.assignment >> i & 1) mask |= std::uint64_t{1} << col_to_bit[i];
    }
    if (ft.evaluate_mask(mask) == r.te) matched += r.count;
    total += r.count;
  }
  if (total == 0) throw FtError("empty dataset");
  return 1.0 - static_cast<double>(matched) / static_cast<double>(total);
}

McsMatrix ft_mcs_matrix(const FaultTree& ft,
                        const std::vector<std::string>& be_names,
                        std::size_t product_cap) {
  std::vector<int> bit_to_col(ft.universe().size(), -1);
  for (std::size_t i = 0; i < ft.universe().size(); ++i)
    for (std::size_t j = 0; j < be_names.size(); ++j)
      if (be_names[j] == ft.universe()[i]) {
        bit_to_col[i] = static_cast<int>(j);
        break;
      }

  McsSet sets = ft.minimal_cut_sets(product_cap);
  McsMatrix m;
  m.be_names = be_names;
  m.rows.reserve(sets.size());
  for (CutSet cs : sets) {
    std::uint64_t row = 0;
    for (std::size_t i = 0; i < ft.universe().size(); ++i)
      if (cs >> i & 1) {
        if (bit_to_col[i] < 0)
          throw FtError("tree basic event '" + ft.universe()[i] +
                        "' has no column in the target universe");
        row |= std::uint64_t{1} << bit_to_col[i];
      }
    m.rows.push_back(row);
  }
  return m;
}

double phi_c(const McsMatrix& m_d, const McsMatrix& m_f) {
  if (m_d.be_names != m_f.be_names)
    throw FtError("cut-set matrices are over different universes");
  if (m_d.empty() || m_f.empty()) return 1.0;

  // All traces reduce to sums of squared cut-set overlaps:
  //   tr(A B^T B A^T) = sum_{i,j} |a_i & b_j|^2.
  auto cross = [](const std::vector<std::uint64_t>& a,
                  const std::vector<std::uint64_t>& b) {
    double s = 0.0;
    for (std::uint64_t x : a)
      for (std::uint64_t y : b) {
        double o = std::popcount(x & y);
        s += o * o;
      }
    return s;
  };
  double num = cross(m_d.rows, m_f.rows);
  double den = std::sqrt(cross(m_d.rows, m_d.rows) * cross(m_f.rows, m_f.rows));
  double rv = num / den;
  if (rv > 1.0) rv = 1.0;
  if (rv < 0.0) rv = 0.0;
  return 1.0 - rv;
}

ObjectiveVector objectives(const FaultTree& ft, const FailureDataset& ds,
                           const McsMatrix& m_d, MofSetup setup,
                           std::size_t product_cap) {
  ObjectiveVector v;
  v.setup = setup;
  if (mof_active_s(setup)) v.phi_s = static_cast<double>(ft.phi_s());
  if (mof_active_d(setup)) v.phi_d = phi_d(ft, ds);
  if (mof_active_c(setup)) {
    try {
      v.phi_c = phi_c(m_d, ft_mcs_matrix(ft, m_d.be_names, product_cap));
    } catch (const DnfCapExceeded&) {
      v.phi_c = 1.0;
    }
  }
  return v;
}

}  // namespace ftmoea
