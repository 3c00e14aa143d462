#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ftmoea/cases.hpp"
#include "ftmoea/galileo.hpp"
#include "ftmoea/moea.hpp"
#include "test_support.hpp"

using namespace ftmoea;
using namespace ftmoea::test;

namespace {

ObjectiveVector vec(MofSetup s, double ps, double pd, double pc = 1) {
  ObjectiveVector v;
  v.setup = s;
  v.phi_s = ps;
  v.phi_d = pd;
  v.phi_c = pc;
  return v;
}

// O(n^2) reference front computation.
std::vector<std::vector<std::size_t>> brute_fronts(
    std::vector<ObjectiveVector> objs) {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<bool> assigned(objs.size(), false);
  std::size_t left = objs.size();
  while (left > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (assigned[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < objs.size() && !dominated; ++j)
        if (!assigned[j] && j != i && objs[j].dominates(objs[i]))
          dominated = true;
      if (!dominated) front.push_back(i);
    }
    for (std::size_t i : front) assigned[i] = true;
    left -= front.size();
    fronts.push_back(std::move(front));
  }
  return fronts;
}

Individual make_individual(const FaultTree& ft, const FailureDataset& ds,
                           const McsMatrix& m_d, MofSetup setup) {
  return Individual(ft, objectives(ft, ds, m_d, setup));
}

}  // namespace

TEST_CASE("init_parents setups") {
  std::vector<std::string> u = {"A", "B", "C"};
  auto parents = init_parents(ParentStrategy::OrAndPair, u, nullptr);
  REQUIRE(parents.size() == 2);
  CHECK(parents[0].phi_s() == 4);
  CHECK(parents[1].phi_s() == 4);
  CHECK(parents[0].canonical_encoding() == "(| A B C)");
  CHECK(parents[1].canonical_encoding() == "(& A B C)");

  FailureDataset csd = csd_complete_dataset();
  McsMatrix m_d = extract_mcs_from_data(csd);
  auto dnf = init_parents(ParentStrategy::Dnf, csd.be_names, &m_d);
  REQUIRE(dnf.size() == 1);
  CHECK(phi_d(dnf[0], csd) == 0.0);
  CHECK(phi_c(m_d, ft_mcs_matrix(dnf[0], csd.be_names)) ==
        doctest::Approx(0.0).epsilon(1e-12));

  McsMatrix empty;
  empty.be_names = csd.be_names;
  CHECK_THROWS_AS(init_parents(ParentStrategy::Dnf, csd.be_names, &empty),
                  FtError);
}

TEST_CASE("mutations preserve validity and do what they say") {
  Rng rng(41);

  SUBCASE("g_create adds one gate and keeps every leaf") {
    FaultTree ft = parse_ft("toplevel TE; TE or A B C D E;");
    for (int i = 0; i < 100; ++i) {
      auto out = mutate(ft, MutationKind::GateCreate, rng);
      REQUIRE(out);
      CHECK(out->gate_count() == ft.gate_count() + 1);
      CHECK(out->leaf_count() == ft.leaf_count());
      CHECK(out->connected_unique_bes() == ft.connected_unique_bes());
    }
  }

  SUBCASE("g_mutate flips the root gate") {
    FaultTree ft = parse_ft("toplevel TE; TE and A B;");
    auto out = mutate(ft, MutationKind::GateMutate, rng);
    REQUIRE(out);
    CHECK(out->canonical_encoding() == "(| A B)");
  }

  SUBCASE("be_disconnect repairs and pools the name") {
    FaultTree ft = parse_ft("toplevel TE; TE and A B;");
    auto out = mutate(ft, MutationKind::BeDisconnect, rng);
    REQUIRE(out);
    CHECK(out->leaf_count() == 1);
    CHECK(out->disconnected().size() == 1);
  }

  SUBCASE("g_delete moves orphaned BEs to the pool") {
    // deleting the only non-root gate of the CSD drops its subtree
    FaultTree csd = csd_tree();
    auto out = mutate(csd, MutationKind::GateDelete, rng);
    REQUIRE(out);
    CHECK(out->gate_count() < csd.gate_count());
    std::set<std::string> all(csd.universe().begin(), csd.universe().end());
    auto connected = out->connected_unique_bes();
    for (const auto& name : out->disconnected()) CHECK(!connected.count(name));
    CHECK(connected.size() + out->disconnected().size() == all.size());
  }

  SUBCASE("be_connect needs a pool, be_swap needs a second gate") {
    FaultTree no_pool = parse_ft("toplevel TE; TE and A B;");
    CHECK_FALSE(mutate(no_pool, MutationKind::BeConnect, rng));
    CHECK_FALSE(mutate(no_pool, MutationKind::BeSwap, rng));

    FaultTree with_pool =
        parse_ft("basicevents A B C; toplevel TE; TE and A B;");
    auto out = mutate(with_pool, MutationKind::BeConnect, rng);
    REQUIRE(out);
    CHECK(out->disconnected().empty());
    CHECK(out->connected_unique_bes().count("C") == 1);
  }

  SUBCASE("random operator chains keep every invariant") {
    FaultTree ft = csd_tree();
    for (int i = 0; i < 500; ++i) {
      auto kind = static_cast<MutationKind>(rng.index(6));
      auto out = mutate(ft, kind, rng);
      if (out) ft = std::move(*out);
      CHECK(ft.phi_s() >= 2);
      CHECK(ft.leaf_count() >= 1);
      CHECK(ft.universe() == csd_tree().universe());
    }
  }
}

TEST_CASE("crossover swaps subtrees between trees") {
  Rng rng(43);
  FaultTree a = parse_ft("basicevents A B C D; toplevel TE; TE and A B;");
  FaultTree b = parse_ft("basicevents A B C D; toplevel TE; TE or C D;");
  bool saw_exchange = false;
  for (int i = 0; i < 50; ++i) {
    auto [c1, c2] = crossover(a, b, rng);
    CHECK(c1.universe() == a.universe());
    CHECK(c2.universe() == a.universe());
    CHECK(c1.phi_s() >= 2);
    CHECK(c2.phi_s() >= 2);
    if (c1.canonical_encoding() != a.canonical_encoding()) saw_exchange = true;
  }
  CHECK(saw_exchange);

  // self-crossover yields structurally equal offspring for symmetric picks
  auto [s1, s2] = crossover(a, a, rng);
  CHECK(s1.universe() == a.universe());
}

TEST_CASE("fast_nondominated_sort matches the brute-force oracle") {
  // hand example, two active objectives
  std::vector<ObjectiveVector> objs = {vec(MofSetup::Sd, 0, 0),
                                       vec(MofSetup::Sd, 1, 1),
                                       vec(MofSetup::Sd, 0, 2)};
  auto fronts = fast_nondominated_sort(objs);
  REQUIRE(fronts.size() == 2);
  CHECK(fronts[0] == std::vector<std::size_t>{0});
  CHECK(fronts[1] == std::vector<std::size_t>{1, 2});

  // all identical vectors form one front
  std::vector<ObjectiveVector> same(5, vec(MofSetup::Sdc, 1, 1, 1));
  CHECK(fast_nondominated_sort(same).size() == 1);

  Rng rng(47);
  for (int trial = 0; trial < 300; ++trial) {
    MofSetup setup = rng.bernoulli(0.5) ? MofSetup::Sd : MofSetup::Sdc;
    std::size_t n = 1 + rng.index(64);
    std::vector<ObjectiveVector> rand_objs;
    for (std::size_t i = 0; i < n; ++i)
      rand_objs.push_back(vec(setup, static_cast<double>(rng.index(6)),
                              static_cast<double>(rng.index(6)) / 5.0,
                              static_cast<double>(rng.index(6)) / 5.0));
    auto got = fast_nondominated_sort(rand_objs);
    auto want = brute_fronts(rand_objs);
    REQUIRE(got.size() == want.size());
    for (std::size_t f = 0; f < got.size(); ++f) {
      auto g = got[f], w = want[f];
      std::sort(g.begin(), g.end());
      std::sort(w.begin(), w.end());
      CHECK(g == w);
    }
    std::size_t total = 0;
    for (const auto& f : got) total += f.size();
    CHECK(total == n);
  }
}

TEST_CASE("crowding distance") {
  std::vector<ObjectiveVector> front = {vec(MofSetup::Sd, 1, 3),
                                        vec(MofSetup::Sd, 2, 2),
                                        vec(MofSetup::Sd, 3, 1)};
  auto d = crowding_distance(front);
  REQUIRE(d.size() == 3);
  CHECK(std::isinf(d[0]));
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK(std::isinf(d[2]));

  CHECK(std::isinf(crowding_distance({vec(MofSetup::Sd, 1, 1)})[0]));

  // degenerate column contributes nothing to interior members
  std::vector<ObjectiveVector> flat = {vec(MofSetup::Sd, 1, 5),
                                       vec(MofSetup::Sd, 2, 5),
                                       vec(MofSetup::Sd, 3, 5)};
  auto fd = crowding_distance(flat);
  CHECK(fd[1] == doctest::Approx(1.0));  // only the first objective counts
}

TEST_CASE("select_next dedups, keeps fronts, breaks overflow by crowding") {
  FailureDataset ds = csd_complete_dataset();
  McsMatrix m_d = extract_mcs_from_data(ds);

  SUBCASE("duplicates collapse") {
    FaultTree ft = parse_ft("toplevel TE; TE and A B;");
    FailureDataset tiny = generate_exhaustive(ft);
    McsMatrix tiny_m = extract_mcs_from_data(tiny);
    std::vector<Individual> pool(
        6, make_individual(ft, tiny, tiny_m, MofSetup::Sdc));
    auto next = select_next(pool, 4);
    CHECK(next.size() == 1);
    auto kept = select_next(pool, 4, /*allow_duplicates=*/true);
    CHECK(kept.size() == 4);
  }

  SUBCASE("overflowing front broken by descending crowding distance") {
    // objective-space-only check via hand-built individuals
    std::vector<Individual> pool;
    FailureDataset tiny =
        generate_exhaustive(parse_ft("toplevel TE; TE or A B C D E;"));
    McsMatrix tm = extract_mcs_from_data(tiny);
    // five mutually non-dominated trees of different sizes/errors
    std::vector<std::string> texts = {
        "toplevel TE; TE or A;",
        "toplevel TE; TE or A B;",
        "toplevel TE; TE or A B C;",
        "toplevel TE; TE or A B C D;",
        "toplevel TE; TE or A B C D E;",
    };
    for (const auto& t : texts) {
      FaultTree ft = parse_ft("basicevents A B C D E; " + t);
      pool.push_back(make_individual(ft, tiny, tm, MofSetup::Sd));
    }
    auto next = select_next(pool, 4);
    CHECK(next.size() == 4);
    // the dropped one is an interior solution, never a boundary one
    bool has_smallest = false, has_largest = false;
    for (const auto& ind : next) {
      if (ind.ft.phi_s() == 2) has_smallest = true;
      if (ind.ft.phi_s() == 6) has_largest = true;
    }
    CHECK(has_smallest);
    CHECK(has_largest);
  }
}

TEST_CASE("best_individual ordering") {
  FailureDataset ds = csd_complete_dataset();
  McsMatrix m_d = extract_mcs_from_data(ds);
  FaultTree truth = csd_tree();
  FaultTree or_all = init_parents(ParentStrategy::OrAndPair, ds.be_names,
                                  nullptr)[0];
  std::vector<Individual> front = {
      make_individual(or_all, ds, m_d, MofSetup::Sdc),
      make_individual(truth, ds, m_d, MofSetup::Sdc),
  };
  CHECK(best_individual(front) == 1);  // zero error beats smaller size

  // pure size tie-break at equal error
  FaultTree bloated = parse_ft(
      "basicevents TAPE BASIC M2M PLUG C1 C2 C3; toplevel TE;"
      "TE or CCF IND; CCF and TAPE BASIC BASIC;"
      "IND and M2M PLUG VSEAL; VSEAL 2of3 C1 C2 C3;");
  std::vector<Individual> tie = {
      make_individual(bloated, ds, m_d, MofSetup::Sdc),
      make_individual(truth, ds, m_d, MofSetup::Sdc),
  };
  CHECK(best_individual(tie) == 1);
}

TEST_CASE("generate_offspring contracts") {
  FailureDataset ds = csd_complete_dataset();
  McsMatrix m_d = extract_mcs_from_data(ds);
  MoeaConfig config;
  config.ps = 16;
  config.setup = MofSetup::Sd;

  std::vector<Individual> pop;
  for (auto& ft :
       init_parents(ParentStrategy::OrAndPair, ds.be_names, nullptr))
    pop.push_back(make_individual(ft, ds, m_d, config.setup));

  Rng r1(5), r2(5);
  auto off1 = generate_offspring(pop, config, ds, m_d, r1);
  auto off2 = generate_offspring(pop, config, ds, m_d, r2);
  CHECK(off1.size() >= config.ps);
  REQUIRE(off1.size() == off2.size());
  for (std::size_t i = 0; i < off1.size(); ++i)
    CHECK(off1[i].encoding == off2[i].encoding);  // determinism

  // gate-mutate-only offspring differ from parents in gate types only
  MoeaConfig gm = config;
  gm.operator_weights = {0, 1, 0, 0, 0, 0, 0};
  Rng r3(9);
  for (const auto& child : generate_offspring(pop, gm, ds, m_d, r3)) {
    CHECK(child.ft.phi_s() == 8);  // same shape as a flat parent
    CHECK(child.ft.connected_unique_bes().size() == 7);
  }
}

TEST_CASE("run terminates and respects convergence rules") {
  FailureDataset ds = csd_complete_dataset();

  SUBCASE("DNF parent with size off converges at generation 1") {
    MoeaConfig config;
    config.setup = MofSetup::Dc;
    config.parent_strategy = ParentStrategy::Dnf;
    config.ps = 16;
    config.seed = 3;
    RunResult result = run(config, ds);
    CHECK(result.termination == Termination::ZeroError);
    CHECK(result.generations.size() == 1);
    CHECK(result.best().objectives.phi_d == 0.0);
    CHECK(result.best().objectives.phi_c == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("degenerate config stops after uc unchanged generations") {
    MoeaConfig config;
    config.setup = MofSetup::Sdc;
    config.ps = 4;
    config.uc = 1;
    config.ng = 50;
    config.operator_weights = {0, 0, 0, 0, 0, 0, 0};
    RunResult result = run(config, ds);
    CHECK(result.termination == Termination::UcReached);
    CHECK(result.generations.size() <= 3);
  }

  SUBCASE("no-failure dataset is rejected") {
    FailureDataset dead;
    dead.be_names = {"A"};
    dead.rows = {{0, false, 1}, {1, false, 1}};
    MoeaConfig config;
    CHECK_THROWS_AS(run(config, dead), FtError);
  }

  SUBCASE("fixed seed reproduces the whole log") {
    MoeaConfig config;
    config.setup = MofSetup::Sdc;
    config.ps = 24;
    config.ng = 8;
    config.seed = 11;
    RunResult a = run(config, ds);
    RunResult b = run(config, ds);
    REQUIRE(a.generations.size() == b.generations.size());
    for (std::size_t i = 0; i < a.generations.size(); ++i) {
      CHECK(a.generations[i].best_phi_s == b.generations[i].best_phi_s);
      CHECK(a.generations[i].best_phi_d == b.generations[i].best_phi_d);
      CHECK(a.generations[i].best_phi_c == b.generations[i].best_phi_c);
      CHECK(a.generations[i].mean_phi_s == b.generations[i].mean_phi_s);
      CHECK(a.generations[i].pool_size == b.generations[i].pool_size);
    }
    CHECK(a.best().encoding == b.best().encoding);
  }

  SUBCASE("elitism never regresses the best error") {
    MoeaConfig config;
    config.setup = MofSetup::Sdc;
    config.ps = 32;
    config.ng = 15;
    config.seed = 29;
    RunResult result = run(config, ds);
    double prev_err = 1e9;
    double prev_size = 1e9;
    for (const auto& g : result.generations) {
      double err = g.best_phi_d + g.best_phi_c;
      CHECK(err <= prev_err + 1e-12);
      if (err == prev_err) CHECK(g.best_phi_s <= prev_size);
      prev_err = err;
      prev_size = g.best_phi_s;
    }
  }
}
