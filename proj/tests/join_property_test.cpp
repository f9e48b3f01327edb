#include <gtest/gtest.h>

#include "join_gen.hpp"

using namespace untag;

TEST(JoinProperty, IdempotentCommutativeAndPairwise) {
  EXPECT_EQ(untag::testing::joinCounterexample(2000, 20240611), "");
}

TEST(JoinProperty, CheckerCatchesABrokenJoin) {
  PointsToGraph a;
  a.roots["x"] = a.addNode();
  a.setEdge(0, {"f"}, a.addNode());
  PointsToGraph b = a;
  b.edges.clear();
  // Claiming the edge survives a join with a graph lacking it is a counterexample.
  EXPECT_NE(untag::testing::checkJoin(a, b, untag::testing::canonical(a)), "");
  EXPECT_EQ(untag::testing::checkJoin(a, b, join(a, b)), "");
}

TEST(JoinProperty, LabelsAboveTheCapAreDropped) {
  PointsToGraph a;
  PointsToGraph b;
  for (auto* g : {&a, &b}) {
    g->roots["x"] = g->addNode();
    g->setEdge(0, {}, g->addNode());
  }
  a.nodes[1].label = IntLabel{{1, 2}, IntLabel::Provenance::Branch};
  b.nodes[1].label = IntLabel{{3}, IntLabel::Provenance::Branch};
  EXPECT_FALSE(join(a, b, 2).nodes[1].label);
  EXPECT_EQ(join(a, b, 3).nodes[1].label->values, (std::set<int64_t>{1, 2, 3}));
}
