#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dynim/errors.hpp"
#include "dynim/family.hpp"
#include "dynim/graph.hpp"
#include "dynim/greedy.hpp"
#include "dynim/mia.hpp"

namespace dynim {

// Twelve-node running-example graph. Nodes are labelled A..L and mapped to
// ids 0..11. The edge list is frozen: build_paper_fixture() re-validates the
// full constraint set on every load and refuses to hand out a graph that
// drifted.
//
//   L -0.1-> A -0.8-> C -0.6-> D
//            A -0.3-> B       C -0.08-> E
//   I -0.9-> G   I -0.7-> H
//   F -0.8-> J   F -0.7-> K
//
// With theta = 0.07 the top-2 seeds are {A, I} (spreads 2.58 and 2.6);
// deleting A->C drops sigma({A}) to 1.3 and the top-2 become {I, F}.

constexpr double kFixtureTheta = 0.07;

inline NodeId fixture_node(char label) {
  if (label < 'A' || label > 'L') throw InvalidParam("fixture label out of range");
  return static_cast<NodeId>(label - 'A');
}

inline char fixture_label(NodeId id) { return static_cast<char>('A' + id); }

struct FixtureEdge {
  char from;
  char to;
  double p;
};

inline const std::vector<FixtureEdge>& fixture_edges() {
  static const std::vector<FixtureEdge> edges = {
      {'L', 'A', 0.1}, {'A', 'C', 0.8}, {'A', 'B', 0.3},
      {'C', 'D', 0.6}, {'C', 'E', 0.08}, {'I', 'G', 0.9},
      {'I', 'H', 0.7}, {'F', 'J', 0.8},  {'F', 'K', 0.7},
  };
  return edges;
}

namespace detail {

inline std::vector<NodeId> fixture_set(const std::string& labels) {
  std::vector<NodeId> ids;
  for (char c : labels) ids.push_back(fixture_node(c));
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline void fixture_require(bool ok, const std::string& what) {
  if (!ok) throw FixtureUnsatisfiable("paper fixture violates: " + what);
}

inline bool near(double a, double b, double tol = 0.01) {
  return std::fabs(a - b) <= tol;
}

}  // namespace detail

inline UncertainGraph build_paper_fixture() {
  using detail::fixture_require;
  using detail::fixture_set;
  using detail::near;

  UncertainGraph g(12);
  for (const auto& e : fixture_edges()) {
    g.add_edge(fixture_node(e.from), fixture_node(e.to), e.p);
  }

  Theta theta(kFixtureTheta);
  const NodeId A = fixture_node('A'), C = fixture_node('C'), L = fixture_node('L');
  const NodeId F = fixture_node('F'), I = fixture_node('I');

  fixture_require(g.probability(A, C) == 0.8, "P(A->C) = 0.8");
  fixture_require(g.probability(L, A) == 0.1, "P(L->A) = 0.1");

  fixture_require(miia(g, C, theta).node_set() == fixture_set("CAL"), "MIIA(C) = {C,A,L}");
  fixture_require(mioa(g, C, theta).node_set() == fixture_set("CDE"), "MIOA(C) = {C,D,E}");

  FamilyContext ctx(g, theta);
  fixture_require(ctx.family1(C) == fixture_set("CALDE"), "F1(C)");
  fixture_require(ctx.family2(C) == fixture_set("CALDEB"), "F2(C)");
  fixture_require(ctx.family1(A) == fixture_set("ABCDL"), "F1(A)");
  fixture_require(ctx.family2(A) == fixture_set("ABCDLE"), "F2(A)");

  fixture_require(activation_prob(g, {C}, C, theta) == 1.0, "pp({C},C) = 1");
  fixture_require(near(activation_prob(g, {A}, C, theta), 0.8, 1e-12), "pp({A},C) = 0.8");
  fixture_require(near(activation_prob(g, {L}, C, theta), 0.08, 1e-12), "pp({L},C) = 0.08");

  SpreadEvaluator eval(g, theta);
  fixture_require(near(eval.spread({A}), 2.58), "sigma({A}) = 2.58");
  fixture_require(near(eval.spread({I}), 2.6), "sigma({I}) = 2.6");
  fixture_require(near(eval.spread({A, I}), 5.18), "sigma({A,I}) = 5.18");

  auto top2 = greedy(g, {}, 2, [&](const std::vector<NodeId>& basis, NodeId u) {
                return eval.marginal_gain(basis, u);
              }).seed_set();
  fixture_require(top2 == fixture_set("AI"), "greedy top-2 = {A,I}");

  UncertainGraph g_del = g;
  g_del.remove_edge(A, C);
  FamilyContext ctx_del(g_del, theta);
  fixture_require(ctx_del.family1(A) == fixture_set("ABL"), "post-delete F1(A)");
  SpreadEvaluator eval_del(g_del, theta);
  fixture_require(near(eval_del.spread({A}), 1.3), "post-delete sigma({A}) = 1.3");
  fixture_require(near(eval_del.spread({A, I}), 3.9), "post-delete sigma({A,I}) = 3.9");
  fixture_require(near(eval_del.spread({F}), 2.5), "sigma({F}) = 2.5");
  fixture_require(near(eval_del.spread({I, F}), 5.1), "post-delete sigma({I,F}) = 5.1");

  auto top2_del = greedy(g_del, {}, 2, [&](const std::vector<NodeId>& basis, NodeId u) {
                    return eval_del.marginal_gain(basis, u);
                  }).seed_set();
  fixture_require(top2_del == fixture_set("FI"), "post-delete greedy top-2 = {I,F}");

  return g;
}

}  // namespace dynim
