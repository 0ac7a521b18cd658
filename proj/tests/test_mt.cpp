#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "smt/benchgen.hpp"
#include "smt/errors.hpp"
#include "smt/flow.hpp"
#include "smt/interconnect.hpp"
#include "smt/mt_transform.hpp"
#include "support.hpp"

namespace smt {
namespace {

using test::Builder;

// Independent bounce formula for a cluster of cells at `pos`.
double oracle_bounce(const std::vector<SwitchMember>& ms, Point sw, const Constraints& c, double width,
                     double detour = 1.0) {
  double sum = 0.0;
  double worst = 0.0;
  double far = 0.0;
  for (const auto& m : ms) {
    sum += m.i_peak;
    worst = std::max(worst, m.i_peak);
    far = std::max(far, static_cast<double>(std::llabs(m.pos.x - sw.x) + std::llabs(m.pos.y - sw.y)) / 1000.0);
  }
  return c.alpha * sum / 1000.0 * c.r0_switch / width + worst / 1000.0 * c.r_wire * far * detour;
}

TEST(SizeSwitch, SingleCellAtSwitch) {
  Constraints c;
  c.r0_switch = 10.0;
  c.alpha = 1.0;
  c.w_min = 0.01;
  const SwitchMember m{"a", {0, 0}, 0.5};
  const auto s = size_switch(std::span(&m, 1), {0, 0}, c);
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->width, 0.1, 1e-12);
  EXPECT_LE(s->v_bounce, c.v_bounce_max);
  EXPECT_NEAR(s->v_bounce, 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(s->v_wire, 0.0);
}

TEST(SizeSwitch, MinimumWidthClamps) {
  Constraints c;
  const SwitchMember m{"a", {0, 0}, 0.001};
  const auto s = size_switch(std::span(&m, 1), {0, 0}, c);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->width, c.w_min);
  EXPECT_LT(s->v_bounce, c.v_bounce_max);
}

TEST(SizeSwitch, WireDropMakesDistantCellInfeasible) {
  Constraints c;
  c.r0_switch = 10.0;
  c.alpha = 1.0;
  // v_w = 0.5 mA * 0.4 Ohm/um * d; the limit 0.05 V is reached at 250 um.
  const SwitchMember near{"a", {to_nm(240.0), 0}, 0.5};
  const SwitchMember far{"a", {to_nm(260.0), 0}, 0.5};
  const auto ok = size_switch(std::span(&near, 1), {0, 0}, c);
  ASSERT_TRUE(ok);
  EXPECT_NEAR(ok->v_wire, 0.048, 1e-12);
  EXPECT_NEAR(ok->width, 10.0 * 0.5e-3 / 0.002, 1e-9);
  EXPECT_FALSE(size_switch(std::span(&far, 1), {0, 0}, c));
  // A longer routed detour pushes the near cell over too.
  EXPECT_FALSE(size_switch(std::span(&near, 1), {0, 0}, c, 1.1));
}

TEST(SizeSwitch, SharingDeratesCurrent) {
  Constraints c;
  c.w_min = 0.0;
  c.alpha = 0.5;
  std::vector<SwitchMember> ms;
  for (int i = 0; i < 4; ++i) ms.push_back({"m" + std::to_string(i), {0, 0}, 0.1});
  const auto shared = size_switch(ms, {0, 0}, c);
  ASSERT_TRUE(shared);
  EXPECT_NEAR(shared->i_eff, 0.2, 1e-12);
  EXPECT_NEAR(shared->width, 2000.0 * 0.2e-3 / 0.05, 1e-9);
  // Dedicated switches see the full peak current and need twice the total width.
  Constraints single = c;
  single.alpha = 1.0;
  double separate = 0.0;
  for (const auto& m : ms) separate += size_switch(std::span(&m, 1), {0, 0}, single)->width;
  EXPECT_NEAR(separate, 2.0 * shared->width, 1e-9);
}

TEST(SizeSwitch, WidthIsMinimal) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> cur(0.01, 0.3);
  std::uniform_int_distribution<int> coord(0, 40000);
  Constraints c;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<SwitchMember> ms;
    const int n = 1 + trial % 12;
    for (int i = 0; i < n; ++i) ms.push_back({"m" + std::to_string(i), {coord(rng), coord(rng)}, cur(rng)});
    const Point sw{20000, 20000};
    const auto s = size_switch(ms, sw, c);
    ASSERT_TRUE(s);
    EXPECT_LE(oracle_bounce(ms, sw, c, s->width), c.v_bounce_max);
    if (s->width > c.w_min) {
      EXPECT_GT(oracle_bounce(ms, sw, c, s->width * (1 - 1e-9)), c.v_bounce_max) << trial;
    }
  }
}

TEST(SizeSwitch, EmptyClusterIsAContractError) {
  EXPECT_THROW(size_switch({}, {0, 0}, Constraints{}), Error);
}

// a -> m0 -> ... -> m(k-1) -> y, all INV, placed along the x axis.
Design mt_row(const std::vector<double>& xs, Vth v = Vth::MtNoVgnd) {
  Builder b;
  b.pi("a").po("y").stage(FlowStage::Assigned);
  std::string prev = "a";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::string out = i + 1 == xs.size() ? "y" : "n" + std::to_string(i);
    b.cell("m" + std::to_string(i), "INV", v, xs[i], 0, {{"A", prev}, {"Y", out}});
    prev = out;
  }
  return b.build();
}

std::vector<std::string> holder_nets(const Design& d) {
  std::vector<std::string> out;
  for (const auto& c : d.cells) {
    if (c.kind == "HOLDER") out.push_back(c.pins.at("A"));
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Holders, OnlyWhereMtDrivesNonMt) {
  Builder b;
  b.pi("a").po("y").po("z").stage(FlowStage::Assigned);
  b.cell("u1", "INV", Vth::MtNoVgnd, 0, 0, {{"A", "a"}, {"Y", "n1"}});
  b.cell("u2", "INV", Vth::MtNoVgnd, 1, 0, {{"A", "n1"}, {"Y", "n2"}});
  b.cell("u3", "INV", Vth::HighVth, 2, 0, {{"A", "n2"}, {"Y", "y"}});
  b.cell("u4", "INV", Vth::MtNoVgnd, 3, 0, {{"A", "n1"}, {"Y", "z"}});
  b.cell("u5", "INV", Vth::HighVth, 4, 0, {{"A", "a"}, {"Y", "n5"}});
  b.cell("u6", "INV", Vth::MtNoVgnd, 5, 0, {{"A", "n5"}, {"Y", "n6"}});
  b.cell("u7", "NAND2", Vth::MtNoVgnd, 6, 0, {{"A", "n6"}, {"B", "n2"}, {"Y", "n7"}});
  b.cell("u8", "INV", Vth::HighVth, 7, 0, {{"A", "n7"}, {"Y", "n8"}});
  b.po("n8");
  const Design d = insert_holders(b.build());
  EXPECT_EQ(holder_nets(d), (std::vector<std::string>{"n2", "n7", "z"}));
  const Cell* h = d.find_cell("hold_n2");
  ASSERT_NE(h, nullptr);
  EXPECT_EQ(h->pos, d.find_cell("u2")->pos);
  EXPECT_EQ(h->pins.at("E"), "mte");
  EXPECT_EQ(h->variant, Vth::HighVth);
  EXPECT_EQ(d.stage, FlowStage::HoldersInserted);
  EXPECT_EQ(insert_holders(d), d);
}

TEST(Holders, ExactlyWhenRequiredOnRandomAssignments) {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    test::RandomDagOptions o;
    o.n_cells = 3 + static_cast<int>(seed % 25);
    o.dff_rate = 0.1;
    Design d = test::random_dag(seed, o);
    for (auto& c : d.cells) {
      if (c.kind != "DFF") c.variant = rng() % 2 ? Vth::MtNoVgnd : Vth::HighVth;
    }
    d.stage = FlowStage::Assigned;

    std::set<std::string> expected;
    for (const auto& c : d.cells) {
      if (!is_mt(c.variant)) continue;
      const std::string net = c.pins.at("Y");
      bool non_mt = std::find(d.outputs.begin(), d.outputs.end(), net) != d.outputs.end();
      for (const auto& s : d.cells) {
        for (const auto& [pin, n] : s.pins) {
          if (n == net && &s != &c && !is_mt(s.variant)) non_mt = true;
        }
      }
      if (non_mt) expected.insert(net);
    }
    const auto got = holder_nets(insert_holders(d));
    EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), expected) << "seed " << seed;
    EXPECT_EQ(got.size(), expected.size());
  }
}

TEST(Holders, RejectsWrongStage) {
  Design d = mt_row({0, 1});
  d.stage = FlowStage::AllLow;
  EXPECT_THROW(insert_holders(d), Error);
}

TEST(InitialSwitch, OneSwitchAtCentroid) {
  auto [d, ss] = insert_initial_switch(insert_holders(mt_row({0, 2, 4})));
  ASSERT_EQ(ss.clusters.size(), 1u);
  const SwitchCluster& cl = ss.clusters[0];
  EXPECT_EQ(cl.id, "sw0");
  EXPECT_EQ(cl.members, (std::vector<std::string>{"m0", "m1", "m2"}));
  EXPECT_EQ(cl.switch_pos, (Point{2000, 0}));
  EXPECT_DOUBLE_EQ(cl.vgnd_star_len, 4.0);
  for (const auto& c : d.cells) {
    if (c.kind == "INV") {
      EXPECT_EQ(c.variant, Vth::MtWithVgnd);
      EXPECT_EQ(c.vgnd, "sw0");
    }
  }
  const Cell* sw = d.find_cell("sw0");
  ASSERT_NE(sw, nullptr);
  EXPECT_EQ(sw->width, cl.width);
  EXPECT_EQ(d.stage, FlowStage::SwitchInserted);
}

TEST(InitialSwitch, NoMtCellsNoSwitch) {
  auto [d, ss] = insert_initial_switch(insert_holders(mt_row({0, 2, 4}, Vth::HighVth)));
  EXPECT_TRUE(ss.clusters.empty());
  for (const auto& c : d.cells) EXPECT_NE(c.kind, "SWITCH");
}

std::pair<Design, SwitchStructure> clustered(Design d) {
  auto [with_sw, initial] = insert_initial_switch(insert_holders(std::move(d)));
  SwitchStructure ss = cluster_switches(with_sw, initial);
  return {apply_switch_structure(std::move(with_sw), ss), ss};
}

TEST(Clustering, MemberLimitOfOneGivesOneSwitchPerCell) {
  Design d = mt_row({0, 10, 20, 30, 40});
  d.constraints.n_cells_max = 1;
  auto [out, ss] = clustered(d);
  EXPECT_EQ(ss.clusters.size(), 5u);
  for (const auto& cl : ss.clusters) EXPECT_EQ(cl.members.size(), 1u);
}

TEST(Clustering, ZeroStarLengthSeparatesDistinctPositions) {
  Design d = mt_row({0, 10, 10, 30});
  d.constraints.l_vgnd_max = 0.0;
  auto [out, ss] = clustered(d);
  ASSERT_EQ(ss.clusters.size(), 3u);
  for (const auto& cl : ss.clusters) EXPECT_EQ(cl.vgnd_star_len, 0.0);
}

// Feasibility of an arbitrary group under the limits, from first principles.
bool oracle_feasible(const std::vector<SwitchMember>& ms, const Constraints& c) {
  if (static_cast<int>(ms.size()) > c.n_cells_max) return false;
  std::vector<Point> pts;
  for (const auto& m : ms) pts.push_back(m.pos);
  const Point centre = centroid(pts);
  double star = 0.0;
  for (const auto& p : pts) star += static_cast<double>(manhattan(p, centre)) / 1000.0;
  if (star > c.l_vgnd_max) return false;
  return oracle_bounce(ms, centre, c, 1e9) < c.v_bounce_max;
}

// Fewest feasible groups over all set partitions.
int min_partition(const std::vector<SwitchMember>& ms, const Constraints& c) {
  int best = static_cast<int>(ms.size()) + 1;
  std::vector<std::vector<SwitchMember>> groups;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (static_cast<int>(groups.size()) >= best) return;
    if (i == ms.size()) {
      for (const auto& g : groups) {
        if (!oracle_feasible(g, c)) return;
      }
      best = static_cast<int>(groups.size());
      return;
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      groups[g].push_back(ms[i]);
      rec(i + 1);
      groups[g].pop_back();
    }
    groups.push_back({ms[i]});
    rec(i + 1);
    groups.pop_back();
  };
  rec(0);
  return best;
}

TEST(Clustering, CollinearCellsMatchExhaustivePartition) {
  const std::vector<double> xs{0, 40, 80, 120, 160};
  const Design d = mt_row(xs);
  auto [out, ss] = clustered(d);
  ASSERT_EQ(ss.clusters.size(), 2u);
  EXPECT_EQ(ss.clusters[0].members, (std::vector<std::string>{"m0", "m1", "m2"}));
  EXPECT_EQ(ss.clusters[1].members, (std::vector<std::string>{"m3", "m4"}));
  std::vector<SwitchMember> ms;
  for (std::size_t i = 0; i < xs.size(); ++i) ms.push_back({"m" + std::to_string(i), {to_nm(xs[i]), 0}, 0.08});
  EXPECT_EQ(min_partition(ms, d.constraints), 2);
  for (const auto& cl : ss.clusters) EXPECT_TRUE(cluster_within_limits(cl, d.constraints));
  EXPECT_EQ(out.stage, FlowStage::Clustered);
}

TEST(Clustering, RequiresInitialStructure) {
  auto [d, ss] = clustered(mt_row({0, 1}));
  EXPECT_THROW(cluster_switches(d, ss), Error);
}

TEST(Reoptimize, NoDetourKeepsClusters) {
  auto [d, ss] = clustered(mt_row({0, 40, 80, 120, 160}));
  d.stage = FlowStage::Routed;
  const SwitchStructure re = reoptimize_switches(d, ss, 1, 0.0);
  EXPECT_EQ(re.stage, StructureStage::Reoptimized);
  ASSERT_EQ(re.clusters.size(), ss.clusters.size());
  for (std::size_t i = 0; i < ss.clusters.size(); ++i) EXPECT_EQ(re.clusters[i], ss.clusters[i]);
}

TEST(Reoptimize, DetourNeverShrinksSwitches) {
  auto [d, ss] = clustered(mt_row({0, 5, 9, 14, 30, 31}));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SwitchStructure re = reoptimize_switches(d, ss, seed, 0.25);
    for (const auto& cl : re.clusters) {
      auto it = std::find_if(ss.clusters.begin(), ss.clusters.end(),
                             [&](const SwitchCluster& o) { return o.id == cl.id; });
      if (it == ss.clusters.end() || it->members != cl.members) continue;
      EXPECT_GE(cl.width, it->width);
      EXPECT_GE(cl.detour, 1.0);
    }
  }
}

TEST(Reoptimize, RoutedStarOverflowSplitsOffFarthestCell) {
  // Star length 140 um before routing; the limit is 150 um.
  const Design base = mt_row({0, 30, 70, 100});
  auto [d, ss] = clustered(base);
  ASSERT_EQ(ss.clusters.size(), 1u);
  std::uint64_t seed = 1;
  while (detour_factor("vgnd:sw0", seed, 0.25) < 1.1) ++seed;
  const SwitchStructure re = reoptimize_switches(d, ss, seed, 0.25);
  ASSERT_EQ(re.clusters.size(), 2u);
  // m0 and m3 tie for the farthest position; the smaller id leaves.
  EXPECT_EQ(re.clusters[0].id, "sw0");
  EXPECT_EQ(re.clusters[0].members, (std::vector<std::string>{"m1", "m2", "m3"}));
  EXPECT_EQ(re.clusters[1].id, "sw1");
  EXPECT_EQ(re.clusters[1].members, (std::vector<std::string>{"m0"}));
  for (const auto& cl : re.clusters) EXPECT_TRUE(cluster_within_limits(cl, d.constraints));

  // No single routed cluster fits, so two is the fewest possible.
  const double detour = detour_factor("vgnd:sw0", seed, 0.25);
  Constraints routed = d.constraints;
  routed.l_vgnd_max = d.constraints.l_vgnd_max / detour;
  std::vector<SwitchMember> ms;
  for (const auto& c : d.cells) {
    if (c.kind == "INV") ms.push_back({c.id, c.pos, 0.08});
  }
  EXPECT_FALSE(oracle_feasible(ms, routed));

  const Design applied = apply_switch_structure(d, re);
  EXPECT_EQ(applied.find_cell("m0")->vgnd, "sw1");
  EXPECT_EQ(applied.find_cell("m3")->vgnd, "sw0");
  EXPECT_EQ(applied.stage, FlowStage::Reoptimized);
}

TEST(Reoptimize, GeneratedDesignsStayWithinLimits) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    BenchParams p;
    p.seed = seed;
    p.n_cells = 80 + static_cast<int>(seed * 13 % 150);
    p.n_layers = 6 + static_cast<int>(seed % 8);
    const Design in = generate_benchmark(p);
    FlowOptions o;
    o.mode = Mode::ImprovedSmt;
    const FlowResult r = run_flow(in, o);
    const Constraints& c = r.design.constraints;
    std::map<std::string, int> owner_count;
    for (const auto& cl : r.structure.clusters) {
      EXPECT_TRUE(cluster_within_limits(cl, c)) << cl.id;
      std::vector<SwitchMember> ms;
      for (const auto& id : cl.members) {
        ++owner_count[id];
        const Cell* cell = r.design.find_cell(id);
        ms.push_back({id, cell->pos, r.design.kind_of(*cell).lvt.i_peak});
        EXPECT_EQ(cell->vgnd, cl.id);
      }
      EXPECT_NEAR(oracle_bounce(ms, cl.switch_pos, c, cl.width, cl.detour), cl.v_bounce, 1e-12);
      if (cl.width > c.w_min) {
        EXPECT_GT(oracle_bounce(ms, cl.switch_pos, c, cl.width * (1 - 1e-9), cl.detour), c.v_bounce_max);
      }
    }
    for (const auto& cell : r.design.cells) {
      if (cell.variant == Vth::MtWithVgnd) EXPECT_EQ(owner_count[cell.id], 1) << cell.id;
    }
    EXPECT_EQ(run_flow(in, o).structure, r.structure);
  }
}

TEST(Bounces, SharedAndBuiltInSwitches) {
  auto [d, ss] = clustered(mt_row({0, 10}));
  const BounceMap b = cell_bounces(d, ss);
  EXPECT_EQ(b.at("m0"), ss.clusters[0].v_bounce);
  EXPECT_EQ(b.at("m1"), ss.clusters[0].v_bounce);

  Design conv = conventional_smt_mode(mt_row({0, 10}));
  const BounceMap bc = cell_bounces(conv, {});
  const Cell& m0 = *conv.find_cell("m0");
  EXPECT_EQ(m0.variant, Vth::MtBuiltIn);
  EXPECT_NEAR(bc.at("m0"), 0.08e-3 * conv.constraints.r0_switch / m0.width, 1e-15);
  EXPECT_LE(bc.at("m0"), conv.constraints.v_bounce_max);
}

}  // namespace
}  // namespace smt
