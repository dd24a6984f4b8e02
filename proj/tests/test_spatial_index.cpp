#include <doctest.h>

#include <algorithm>
#include <random>

#include "mobiq/spatial_index.hpp"

using namespace mobiq;

namespace {

std::vector<AgentState> scatter(std::size_t n, double side, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<AgentState> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].id = AgentId::from_index(i);
    out[i].pos = {u(gen), u(gen)};
  }
  return out;
}

std::vector<AgentId> brute_force(const std::vector<AgentState>& agents, std::size_t i, double r,
                                 const WorldGeometry& g) {
  std::vector<AgentId> out;
  for (std::size_t j = 0; j < agents.size(); ++j) {
    if (j != i && toroidal_distance(agents[i].pos, agents[j].pos, g) < r) out.push_back(agents[j].id);
  }
  return out;
}

}  // namespace

TEST_SUITE("spatial_index") {
  TEST_CASE("buckets partition the agents") {
    std::mt19937_64 gen(1);
    const auto agents = scatter(800, 10.0, gen);
    const WorldGeometry g(10.0);
    GridIndex index(g, 1.0);
    index.rebuild(agents);
    std::size_t total = 0;
    for (std::size_t cy = 0; cy < index.cells_per_axis(); ++cy) {
      for (std::size_t cx = 0; cx < index.cells_per_axis(); ++cx) {
        for (AgentId id : index.bucket(cx, cy)) {
          const Point p = agents[id.index()].pos;
          CHECK(index.cell_coord(p.x) == cx);
          CHECK(index.cell_coord(p.y) == cy);
          ++total;
        }
      }
    }
    CHECK(total == 800);
    CHECK(index.cell_size() >= 1.0);
  }

  TEST_CASE("empty index") {
    const WorldGeometry g(10.0);
    GridIndex index(g, 1.0);
    index.rebuild({});
    CHECK(index.indexed_count() == 0);
    for (std::size_t c = 0; c < index.cells_per_axis(); ++c) CHECK(index.bucket(c, c).empty());
  }

  TEST_CASE("origin lands in the first bucket") {
    const WorldGeometry g(10.0);
    GridIndex index(g, 1.0);
    std::vector<AgentState> a(1);
    a[0].id = AgentId(1);
    index.rebuild(a);
    REQUIRE(index.bucket(0, 0).size() == 1);
    CHECK(index.bucket(0, 0)[0] == AgentId(1));
  }

  TEST_CASE("exact radius is not a contact; wrapped neighbours are") {
    const WorldGeometry g(10.0);
    GridIndex index(g, 1.0);
    std::vector<AgentState> a(3);
    a[0].id = AgentId(1);
    a[0].pos = {2.0, 2.0};
    a[1].id = AgentId(2);
    a[1].pos = {3.0, 2.0};
    a[2].id = AgentId(3);
    a[2].pos = {9.9, 5.0};
    index.rebuild(a);
    CHECK(index.neighbors_within(a, a[0], 1.0).empty());
    a[0].pos = {0.1, 5.0};
    index.rebuild(a);
    CHECK(index.neighbors_within(a, a[0], 1.0) == std::vector<AgentId>{AgentId(3)});
  }

  TEST_CASE("matches the all-pairs scan on 100 random configurations") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<std::size_t> count(1, 200);
    std::uniform_real_distribution<double> side(2.5, 12.0);
    std::uniform_real_distribution<double> share(0.05, 0.45);
    for (int round = 0; round < 100; ++round) {
      const double L = side(gen);
      const double r = share(gen) * L;
      const WorldGeometry g(L);
      const auto agents = scatter(count(gen), L, gen);
      GridIndex index(g, r);
      index.rebuild(agents);
      ContactLists contacts;
      index.all_contacts(r, agents.size(), contacts);
      for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto expected = brute_force(agents, i, r, g);
        CHECK(index.neighbors_within(agents, agents[i], r) == expected);
        auto listed = std::vector<AgentId>(contacts.of(agents[i].id).begin(), contacts.of(agents[i].id).end());
        std::sort(listed.begin(), listed.end());
        CHECK(listed == expected);
      }
    }
  }

  TEST_CASE("contact relation is symmetric") {
    std::mt19937_64 gen(8);
    const auto agents = scatter(300, 10.0, gen);
    const WorldGeometry g(10.0);
    GridIndex index(g, 1.0);
    index.rebuild(agents);
    for (const AgentState& a : agents) {
      for (AgentId b : index.neighbors_within(agents, a, 1.0)) {
        const auto back = index.neighbors_within(agents, agents[b.index()], 1.0);
        CHECK(std::binary_search(back.begin(), back.end(), a.id));
      }
    }
  }
}
