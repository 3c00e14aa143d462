#include "ftmoea/dataset.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ftmoea {

std::uint64_t FailureDataset::n_points() const {
  std::uint64_t n = 0;
  for (const auto& r : rows) n += r.count;
  return n;
}

bool FailureDataset::has_failures() const {
  for (const auto& r : rows)
    if (r.te) return true;
  return false;
}

void FailureDataset::normalize() {
  std::sort(rows.begin(), rows.end(),
            [](const DatasetRow& a, const DatasetRow& b) {
              return a.assignment < b.assignment;
            });
}

namespace {

void check_width(std::size_t w) {
  if (w > kMaxUniverse)
    throw FtError("dataset wider than " + std::to_string(kMaxUniverse) +
                  " basic events");
}

FailureDataset aggregate(std::vector<std::string> be_names,
                         const std::unordered_map<std::uint64_t,
                                                  std::pair<bool, std::uint64_t>>&
                             acc) {
  FailureDataset ds;
  ds.be_names = std::move(be_names);
  ds.rows.reserve(acc.size());
  for (const auto& [mask, tc] : acc)
    ds.rows.push_back({mask, tc.first, tc.second});
  ds.normalize();
  return ds;
}

}  // namespace

FailureDataset generate_dataset(const FaultTree& truth, std::uint64_t n_points,
                                const std::vector<double>& p,
                                std::uint64_t seed) {
  const std::size_t w = truth.universe().size();
  check_width(w);
  if (p.size() != w)
    throw FtError("probability vector size does not match universe");
  for (double pi : p)
    if (!(pi > 0.0 && pi < 1.0))
      throw FtError("basic-event probabilities must lie in (0, 1)");
  Rng rng(seed);
  std::unordered_map<std::uint64_t, std::pair<bool, std::uint64_t>> acc;
  for (std::uint64_t i = 0; i < n_points; ++i) {
    std::uint64_t mask = 0;
    for (std::size_t b = 0; b < w; ++b)
      if (rng.bernoulli(p[b])) mask |= std::uint64_t{1} << b;
    auto [it, inserted] =
        acc.try_emplace(mask, truth.evaluate_mask(mask), std::uint64_t{0});
    ++it->second.second;
  }
  return aggregate(truth.universe(), acc);
}

FailureDataset generate_exhaustive(const FaultTree& truth,
                                   std::size_t max_width) {
  const std::size_t w = truth.universe().size();
  check_width(w);
  if (w > max_width)
    throw FtError("exhaustive generation capped at " +
                  std::to_string(max_width) + " basic events");
  FailureDataset ds;
  ds.be_names = truth.universe();
  const std::uint64_t total = std::uint64_t{1} << w;
  ds.rows.reserve(total);
  for (std::uint64_t mask = 0; mask < total; ++mask)
    ds.rows.push_back({mask, truth.evaluate_mask(mask), 1});
  return ds;
}

FailureDataset generate_complete_by_sampling(const FaultTree& truth,
                                             std::uint64_t batch,
                                             const std::vector<double>& p,
                                             std::uint64_t seed,
                                             std::size_t max_width) {
  const std::size_t w = truth.universe().size();
  check_width(w);
  if (w > max_width)
    throw FtError("complete sampling capped at " + std::to_string(max_width) +
                  " basic events");
  if (batch == 0) throw FtError("batch size must be positive");
  if (p.size() != w)
    throw FtError("probability vector size does not match universe");
  Rng rng(seed);
  const std::uint64_t total = std::uint64_t{1} << w;
  std::unordered_map<std::uint64_t, std::pair<bool, std::uint64_t>> acc;
  while (acc.size() < total) {
    for (std::uint64_t i = 0; i < batch; ++i) {
      std::uint64_t mask = 0;
      for (std::size_t b = 0; b < w; ++b)
        if (rng.bernoulli(p[b])) mask |= std::uint64_t{1} << b;
      auto [it, inserted] =
          acc.try_emplace(mask, truth.evaluate_mask(mask), std::uint64_t{0});
      ++it->second.second;
    }
  }
  return aggregate(truth.universe(), acc);
}

bool check_complete(const FailureDataset& ds) {
  if (ds.width() >= kMaxUniverse) return false;
  return ds.rows.size() == (std::uint64_t{1} << ds.width());
}

std::vector<std::pair<std::size_t, std::size_t>> check_monotonic(
    const FailureDataset& ds) {
  std::vector<std::pair<std::size_t, std::size_t>> violations;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    if (ds.rows[i].te) continue;
    for (std::size_t j = 0; j < ds.rows.size(); ++j) {
      if (!ds.rows[j].te) continue;
      // i dominates j but is labeled healthy while j failed
      if ((ds.rows[j].assignment & ds.rows[i].assignment) ==
              ds.rows[j].assignment &&
          ds.rows[i].assignment != ds.rows[j].assignment)
        violations.emplace_back(i, j);
    }
  }
  return violations;
}

McsMatrix extract_mcs_from_data(const FailureDataset& ds) {
  McsMatrix m;
  m.be_names = ds.be_names;
  std::vector<std::uint64_t> failed;
  for (const auto& r : ds.rows)
    if (r.te) failed.push_back(r.assignment);
  // Minimal order first, then lowest bit pattern; each pick absorbs every
  // observation that includes it.
  std::sort(failed.begin(), failed.end(), [](std::uint64_t a, std::uint64_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  std::vector<bool> removed(failed.size(), false);
  for (std::size_t i = 0; i < failed.size(); ++i) {
    if (removed[i]) continue;
    m.rows.push_back(failed[i]);
    for (std::size_t j = i + 1; j < failed.size(); ++j)
      if (!removed[j] && (failed[j] & failed[i]) == failed[i])
        removed[j] = true;
  }
  return m;
}

FailureDataset inject_superfluous(const FailureDataset& ds, unsigned rho,
                                  std::uint64_t seed, bool cross) {
  if (rho == 0) return ds;
  const std::size_t w = ds.width();
  check_width(w + rho);
  std::vector<std::string> names = ds.be_names;
  for (unsigned i = 0; i < rho; ++i) {
    std::string base = "SUP" + std::to_string(i + 1);
    std::string name = base;
    int suffix = 0;
    while (std::find(names.begin(), names.end(), name) != names.end())
      name = base + "_" + std::to_string(++suffix);
    names.push_back(name);
  }

  std::unordered_map<std::uint64_t, std::pair<bool, std::uint64_t>> acc;
  if (cross) {
    const std::uint64_t patterns = std::uint64_t{1} << rho;
    for (const auto& r : ds.rows)
      for (std::uint64_t pat = 0; pat < patterns; ++pat) {
        std::uint64_t mask = r.assignment | (pat << w);
        auto [it, inserted] = acc.try_emplace(mask, r.te, std::uint64_t{0});
        it->second.second += r.count;
      }
  } else {
    Rng rng(seed);
    for (const auto& r : ds.rows)
      for (std::uint64_t k = 0; k < r.count; ++k) {
        std::uint64_t mask = r.assignment;
        for (unsigned b = 0; b < rho; ++b)
          if (rng.bernoulli(0.5)) mask |= std::uint64_t{1} << (w + b);
        auto [it, inserted] = acc.try_emplace(mask, r.te, std::uint64_t{0});
        ++it->second.second;
      }
  }
  return aggregate(std::move(names), acc);
}

FailureDataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FtError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header[header.size() - 2] != "TE" ||
      header.back() != "count")
    throw FtError("CSV header must be <BE...>,TE,count");
  const std::size_t w = header.size() - 2;
  check_width(w);

  std::unordered_map<std::uint64_t, std::pair<bool, std::uint64_t>> acc;
  std::unordered_map<std::uint64_t, std::size_t> first_line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw FtError("line " + std::to_string(lineno) + ": expected " +
                    std::to_string(header.size()) + " cells");
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < w; ++i) {
      if (cells[i] == "1")
        mask |= std::uint64_t{1} << i;
      else if (cells[i] != "0")
        throw FtError("line " + std::to_string(lineno) +
                      ": malformed cell '" + cells[i] + "'");
    }
    bool te;
    if (cells[w] == "1")
      te = true;
    else if (cells[w] == "0")
      te = false;
    else
      throw FtError("line " + std::to_string(lineno) + ": malformed TE cell '" +
                    cells[w] + "'");
    std::uint64_t count = 0;
    try {
      std::size_t pos = 0;
      count = std::stoull(cells[w + 1], &pos);
      if (pos != cells[w + 1].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw FtError("line " + std::to_string(lineno) +
                    ": malformed count cell '" + cells[w + 1] + "'");
    }
    if (count == 0)
      throw FtError("line " + std::to_string(lineno) + ": count must be positive");
    auto [it, inserted] = acc.try_emplace(mask, te, std::uint64_t{0});
    if (inserted) first_line[mask] = lineno;
    if (it->second.first != te)
      throw FtError("noisy data: lines " + std::to_string(first_line[mask]) +
                    " and " + std::to_string(lineno) +
                    " give the same assignment conflicting TE labels");
    it->second.second += count;
  }
  std::vector<std::string> names(header.begin(), header.begin() + w);
  return aggregate(std::move(names), acc);
}

FailureDataset read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FtError("cannot open dataset file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string to_csv(const FailureDataset& ds) {
  std::ostringstream out;
  for (const auto& name : ds.be_names) out << name << ',';
  out << "TE,count\n";
  for (const auto& r : ds.rows) {
    for (std::size_t i = 0; i < ds.width(); ++i)
      out << (r.assignment >> i & 1) << ',';
    out << (r.te ? 1 : 0) << ',' << r.count << '\n';
  }
  return out.str();
}

void write_csv(const FailureDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FtError("cannot write dataset file: " + path);
  out << to_csv(ds);
}

}  // namespace ftmoea
