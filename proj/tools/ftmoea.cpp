#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ftmoea/cases.hpp"
#include "ftmoea/dataset.hpp"
#include "ftmoea/galileo.hpp"
#include "ftmoea/metrics.hpp"
#include "ftmoea/moea.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ftmoea;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string fmt(double v) {
  if (v == static_cast<std::int64_t>(v))
    return std::to_string(static_cast<std::int64_t>(v));
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FtError("cannot write file: " + path);
  out << content;
}

std::string generations_csv(const RunResult& result) {
  std::ostringstream out;
  out << "generation,best_phi_s,best_phi_d,best_phi_c,mean_phi_s,mean_phi_d,"
         "mean_phi_c,front1_size,pool_size,elapsed_ms\n";
  for (const auto& g : result.generations)
    out << g.generation << ',' << fmt(g.best_phi_s) << ',' << fmt(g.best_phi_d)
        << ',' << fmt(g.best_phi_c) << ',' << fmt(g.mean_phi_s) << ','
        << fmt(g.mean_phi_d) << ',' << fmt(g.mean_phi_c) << ','
        << g.front1_size << ',' << g.pool_size << ',' << g.elapsed_ms << '\n';
  return out.str();
}

// BE columns that matter according to the data: the union of the
// extracted minimal cut sets. Superfluous columns never appear there.
std::size_t relevant_be_count(const FailureDataset& ds) {
  McsMatrix m = extract_mcs_from_data(ds);
  std::uint64_t mask = 0;
  for (auto row : m.rows) mask |= row;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ds.width(); ++i) n += mask >> i & 1;
  return n;
}

ParentStrategy parse_parents(const std::string& spec, std::string& file) {
  if (spec == "A" || spec == "a") return ParentStrategy::OrAndPair;
  if (spec == "B" || spec == "b") return ParentStrategy::Dnf;
  file = spec;
  return ParentStrategy::File;
}

json eval_json(const FaultTree& ft, const FailureDataset& ds) {
  json j;
  j["phi_s"] = ft.phi_s();
  j["phi_d"] = phi_d(ft, ds);
  McsMatrix m_d = extract_mcs_from_data(ds);
  j["phi_c"] = phi_c(m_d, ft_mcs_matrix(ft, ds.be_names));
  j["delta_be"] = static_cast<std::int64_t>(ft.connected_unique_bes().size()) -
                  static_cast<std::int64_t>(relevant_be_count(ds));
  return j;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOpts {
  std::string case_name;
  std::string ft_path;
  std::string out = "-";
  std::uint64_t n = 0;
  bool complete = false;
  bool complete_sample = false;
  double p = 0.5;
  std::uint64_t seed = 1;
  unsigned rho = 0;
  bool cross = false;
};

int cmd_generate(const GenerateOpts& o) {
  FaultTree truth = resolve_case(o.case_name.empty() ? o.ft_path : o.case_name);
  std::vector<double> probs(truth.universe().size(), o.p);
  FailureDataset ds;
  if (o.complete) {
    ds = generate_exhaustive(truth);
  } else if (o.complete_sample) {
    ds = generate_complete_by_sampling(truth, o.n ? o.n : 10000, probs, o.seed);
  } else {
    if (o.n == 0) throw FtError("either -n or --complete is required");
    ds = generate_dataset(truth, o.n, probs, o.seed);
  }
  if (o.rho > 0) ds = inject_superfluous(ds, o.rho, o.seed + 1, o.cross);
  if (o.out == "-")
    std::cout << to_csv(ds);
  else
    write_csv(ds, o.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mcs

int cmd_mcs(const std::string& data_path, const std::string& matrix_out) {
  FailureDataset ds = read_csv(data_path);
  McsMatrix m = extract_mcs_from_data(ds);
  if (m.empty())
    std::cerr << "warning: dataset has no TE=1 observations; no cut sets\n";
  for (auto row : m.rows) {
    auto names = cut_set_names(row, m.be_names);
    std::cout << '{';
    for (std::size_t i = 0; i < names.size(); ++i)
      std::cout << (i ? ", " : "") << names[i];
    std::cout << "}\n";
  }
  if (!matrix_out.empty()) {
    std::ostringstream out;
    for (std::size_t i = 0; i < m.be_names.size(); ++i)
      out << (i ? "," : "") << m.be_names[i];
    out << '\n';
    for (auto row : m.rows) {
      for (std::size_t i = 0; i < m.be_names.size(); ++i)
        out << (i ? "," : "") << (row >> i & 1);
      out << '\n';
    }
    write_file(matrix_out, out.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// infer

struct InferOpts {
  std::string data_path;
  std::string mof = "sdc";
  std::size_t ps = 400;
  std::size_t ng = 100;
  std::size_t uc = 20;
  std::string parents = "A";
  std::uint64_t seed = 1;
  std::size_t dnf_cap = kDefaultDnfProductCap;
  bool allow_duplicates = false;
  std::string out_dir = ".";
};

int cmd_infer(const InferOpts& o) {
  FailureDataset ds = read_csv(o.data_path);
  MoeaConfig config;
  config.setup = parse_mof(o.mof);
  config.ps = o.ps;
  config.ng = o.ng;
  config.uc = o.uc;
  config.seed = o.seed;
  config.dnf_product_cap = o.dnf_cap;
  config.allow_duplicates = o.allow_duplicates;
  config.parent_strategy = parse_parents(o.parents, config.parent_file);

  RunResult result = run(config, ds);
  const Individual& best = result.best();

  fs::create_directories(o.out_dir);
  save_ft(best.ft, (fs::path(o.out_dir) / "best.ft").string());
  write_file((fs::path(o.out_dir) / "generations.csv").string(),
             generations_csv(result));

  json summary;
  summary["data"] = o.data_path;
  summary["mof"] = o.mof;
  summary["ps"] = o.ps;
  summary["ng"] = o.ng;
  summary["uc"] = o.uc;
  summary["parents"] = o.parents;
  summary["seed"] = o.seed;
  summary["termination"] = termination_name(result.termination);
  summary["generations"] = result.generations.size();
  summary["pareto_front_size"] = result.pareto_front.size();
  summary["phi_s"] = best.ft.phi_s();
  summary["phi_d"] = best.objectives.phi_d;
  summary["phi_c"] = best.objectives.phi_c;
  summary["connected_bes"] = best.ft.connected_unique_bes().size();
  write_file((fs::path(o.out_dir) / "summary.json").string(),
             summary.dump(2) + "\n");
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const std::string& ft_path, const std::string& data_path) {
  FaultTree ft = resolve_case(ft_path);
  FailureDataset ds = read_csv(data_path);
  std::cout << eval_json(ft, ds).dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentSpec {
  std::string case_name;   // embedded name or FT file
  std::string data_path;   // pre-built dataset instead of a case
  std::vector<std::string> mofs{"sdc"};
  std::vector<std::size_t> ps_values{400};
  std::vector<std::string> parents{"A"};
  std::vector<unsigned> rhos{0};
  std::size_t replications = 5;
  std::size_t ng = 100;
  std::size_t uc = 20;
  std::uint64_t seed = 1;
};

ExperimentSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FtError("cannot open experiment spec: " + path);
  ExperimentSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string eq;
    ls >> eq;
    if (eq != "=")
      throw FtError(path + ":" + std::to_string(lineno) +
                    ": expected `key = value...`");
    std::vector<std::string> values;
    std::string v;
    while (ls >> v) values.push_back(v);
    if (values.empty())
      throw FtError(path + ":" + std::to_string(lineno) + ": missing value");
    auto as_sizes = [&] {
      std::vector<std::size_t> out;
      for (const auto& s : values) out.push_back(std::stoull(s));
      return out;
    };
    if (key == "case")
      spec.case_name = values[0];
    else if (key == "data")
      spec.data_path = values[0];
    else if (key == "mof")
      spec.mofs = values;
    else if (key == "ps")
      spec.ps_values = as_sizes();
    else if (key == "parents")
      spec.parents = values;
    else if (key == "rho") {
      spec.rhos.clear();
      for (const auto& s : values)
        spec.rhos.push_back(static_cast<unsigned>(std::stoul(s)));
    } else if (key == "replications")
      spec.replications = std::stoull(values[0]);
    else if (key == "ng")
      spec.ng = std::stoull(values[0]);
    else if (key == "uc")
      spec.uc = std::stoull(values[0]);
    else if (key == "seed")
      spec.seed = std::stoull(values[0]);
    else
      throw FtError(path + ":" + std::to_string(lineno) + ": unknown key `" +
                    key + "`");
  }
  if (spec.case_name.empty() && spec.data_path.empty())
    throw FtError("experiment spec needs `case` or `data`");
  if (spec.replications < 1) throw FtError("replications must be >= 1");
  return spec;
}

struct ExperimentRun {
  std::string mof;
  std::size_t ps;
  std::string parents;
  unsigned rho;
  std::size_t run_index;
};

std::string run_key(const ExperimentRun& r) {
  std::ostringstream k;
  k << r.mof << '|' << r.ps << '|' << r.parents << '|' << r.rho << '|'
    << r.run_index;
  return k.str();
}

int cmd_experiment(const std::string& spec_path, const std::string& out_dir) {
  ExperimentSpec spec = parse_spec(spec_path);

  FailureDataset base;
  if (!spec.data_path.empty()) {
    base = read_csv(spec.data_path);
  } else {
    base = generate_exhaustive(resolve_case(spec.case_name));
  }

  // Datasets per rho value, crossed to preserve completeness.
  std::map<unsigned, FailureDataset> datasets;
  for (unsigned rho : spec.rhos)
    datasets.emplace(rho, inject_superfluous(base, rho, spec.seed,
                                             /*cross=*/true));

  std::vector<ExperimentRun> runs;
  for (const auto& mof : spec.mofs)
    for (std::size_t ps : spec.ps_values)
      for (const auto& par : spec.parents)
        for (unsigned rho : spec.rhos)
          for (std::size_t r = 0; r < spec.replications; ++r)
            runs.push_back({mof, ps, par, rho, r});

  fs::create_directories(out_dir);
  fs::path results_path = fs::path(out_dir) / "results.csv";
  const std::string header =
      "mof,ps,ng,uc,parents,rho,run_index,seed,status,termination,"
      "generations,phi_s,phi_d,phi_c,connected_bes,delta_be,wall_ms\n";

  // Resume: keep rows already on disk, keyed by the sweep coordinates.
  std::map<std::string, std::string> done;
  if (fs::exists(results_path)) {
    std::ifstream in(results_path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string mof, ps, ng, uc, par, rho, idx;
      std::getline(ls, mof, ',');
      std::getline(ls, ps, ',');
      std::getline(ls, ng, ',');
      std::getline(ls, uc, ',');
      std::getline(ls, par, ',');
      std::getline(ls, rho, ',');
      std::getline(ls, idx, ',');
      done[mof + '|' + ps + '|' + par + '|' + rho + '|' + idx] = line;
    }
  }

  std::vector<std::string> rows(runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      const ExperimentRun& r = runs[i];
      if (auto it = done.find(run_key(r)); it != done.end()) {
        rows[i] = it->second + "\n";
        continue;
      }
      const FailureDataset& ds = datasets.at(r.rho);
      std::uint64_t run_seed = Rng::derive_seed(spec.seed, i);
      std::ostringstream row;
      row << r.mof << ',' << r.ps << ',' << spec.ng << ',' << spec.uc << ','
          << r.parents << ',' << r.rho << ',' << r.run_index << ',' << run_seed
          << ',';
      try {
        MoeaConfig config;
        config.setup = parse_mof(r.mof);
        config.ps = r.ps;
        config.ng = spec.ng;
        config.uc = spec.uc;
        config.seed = run_seed;
        config.parent_strategy = parse_parents(r.parents, config.parent_file);
        auto t0 = std::chrono::steady_clock::now();
        RunResult result = run(config, ds);
        auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        const Individual& best = result.best();
        std::int64_t delta =
            static_cast<std::int64_t>(best.ft.connected_unique_bes().size()) -
            static_cast<std::int64_t>(relevant_be_count(ds));
        row << "ok," << termination_name(result.termination) << ','
            << result.generations.size() << ',' << best.ft.phi_s() << ','
            << fmt(best.objectives.phi_d) << ',' << fmt(best.objectives.phi_c)
            << ',' << best.ft.connected_unique_bes().size() << ',' << delta
            << ',' << wall;
      } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& c : msg)
          if (c == ',' || c == '\n') c = ';';
        row << "error," << msg << ",,,,,,,";
      }
      row << '\n';
      rows[i] = row.str();
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "run " << (i + 1) << '/' << runs.size() << " done\n";
    }
  };

  std::size_t threads = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("FTFORGE_THREADS"))
    threads = std::max<std::size_t>(1, std::stoull(env));
  threads = std::min<std::size_t>(std::max<std::size_t>(threads, 1), runs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Single writer, run-index order.
  std::ofstream out(results_path, std::ios::binary);
  out << header;
  for (const auto& row : rows) out << row;
  std::cout << "wrote " << results_path.string() << " (" << runs.size()
            << " rows)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tree inference from labeled binary failure data"};
  app.require_subcommand(1);

  GenerateOpts gen;
  auto* cmd_gen = app.add_subcommand(
      "generate", "Generate a failure dataset from a ground-truth tree");
  cmd_gen->add_option("--case", gen.case_name, "Embedded case name (csd)");
  cmd_gen->add_option("--ft", gen.ft_path, "Ground-truth FT file");
  cmd_gen->add_option("-n", gen.n, "Number of Monte Carlo data points");
  cmd_gen->add_flag("--complete", gen.complete,
                    "Enumerate all 2^w assignments once");
  cmd_gen->add_flag("--complete-sample", gen.complete_sample,
                    "Sample until all 2^w assignments appear (-n = batch)");
  cmd_gen->add_option("-p", gen.p, "Per-BE failure probability (default 0.5)");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  cmd_gen->add_option("--rho", gen.rho, "Superfluous BE columns to append");
  cmd_gen->add_flag("--cross", gen.cross,
                    "Cross rows with all superfluous patterns (keeps "
                    "completeness)");
  cmd_gen->add_option("-o,--out", gen.out, "Output CSV ('-' for stdout)");

  std::string mcs_data, mcs_matrix_out;
  auto* cmd_m = app.add_subcommand("mcs",
                                   "Extract minimal cut sets from a dataset");
  cmd_m->add_option("data", mcs_data, "Dataset CSV")->required();
  cmd_m->add_option("-o,--matrix", mcs_matrix_out, "Write matrix CSV here");

  InferOpts inf;
  auto* cmd_i = app.add_subcommand("infer", "Infer a fault tree from data");
  cmd_i->add_option("data", inf.data_path, "Dataset CSV")->required();
  cmd_i->add_option("--mof", inf.mof, "Objective setup: sdc dc sc sd c d");
  cmd_i->add_option("--ps", inf.ps, "Population size");
  cmd_i->add_option("--ng", inf.ng, "Max generations");
  cmd_i->add_option("--uc", inf.uc, "Max generations with unchanged best");
  cmd_i->add_option("--parents", inf.parents,
                    "Parent setup: A (Or+And), B (DNF), or an FT file");
  cmd_i->add_option("--seed", inf.seed, "RNG seed");
  cmd_i->add_option("--dnf-cap", inf.dnf_cap, "DNF product cap");
  cmd_i->add_flag("--allow-duplicates", inf.allow_duplicates,
                  "Skip structural deduplication before selection");
  cmd_i->add_option("--out-dir", inf.out_dir, "Output directory");

  std::string eval_ft, eval_data;
  auto* cmd_e = app.add_subcommand("eval", "Score a tree against a dataset");
  cmd_e->add_option("--ft", eval_ft, "FT file or embedded case name")
      ->required();
  cmd_e->add_option("--data", eval_data, "Dataset CSV")->required();

  std::string exp_spec, exp_out = ".";
  auto* cmd_x = app.add_subcommand("experiment", "Run a parameter sweep");
  cmd_x->add_option("spec", exp_spec, "Experiment spec file")->required();
  cmd_x->add_option("--out-dir", exp_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) {
      if (gen.case_name.empty() == gen.ft_path.empty()) {
        std::cerr << "error: exactly one of --case or --ft is required\n";
        return kExitUsage;
      }
      return cmd_generate(gen);
    }
    if (cmd_m->parsed()) return cmd_mcs(mcs_data, mcs_matrix_out);
    if (cmd_i->parsed()) return cmd_infer(inf);
    if (cmd_e->parsed()) return cmd_eval(eval_ft, eval_data);
    if (cmd_x->parsed()) return cmd_experiment(exp_spec, exp_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
