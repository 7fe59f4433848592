#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "iacr/radio.hpp"
#include "iacr/types.hpp"
#include "support.hpp"

using namespace iacr;
using iacr::testing::Gen;
using iacr::testing::close_rel;

TEST_CASE("received power follows inverse power law") {
  CHECK(received_power(1.0, 1.0, 3.0) == 1.0);
  CHECK(received_power(1.0, 2.0, 2.0) == 0.25);
  CHECK(received_power(0.0, 5.0, 3.0) == 0.0);
  CHECK_THROWS_AS(received_power(1.0, 0.0, 3.0), GeometryError);
  CHECK_THROWS_AS(received_power(1.0, -1.0, 3.0), GeometryError);
}

TEST_CASE("received power times d^alpha recovers p") {
  Gen g(11);
  for (int i = 0; i < 2000; ++i) {
    const double p = g.real(0.0, 10.0), d = g.real(0.1, 1000.0), a = g.real(2.0, 5.0);
    CHECK(close_rel(received_power(p, d, a) * std::pow(d, a), p, 1e-12));
  }
}

TEST_CASE("received power decreases with distance and exponent beyond 1 m") {
  Gen g(12);
  for (int i = 0; i < 500; ++i) {
    const double d = g.real(1.01, 500.0), a = g.real(2.0, 5.0);
    CHECK(received_power(1.0, d * 1.01, a) < received_power(1.0, d, a));
    CHECK(received_power(1.0, d, a + 0.1) < received_power(1.0, d, a));
  }
}

TEST_CASE("aggregate interference") {
  const Placement line{{0, 0}, {2, 0}, {4, 0}};
  SUBCASE("empty set") { CHECK(aggregate_interference(0, 1, {}, line, 3.0) == 0.0); }
  SUBCASE("single interferer contributes its received power") {
    const std::vector<Transmitter> one{{1, 1.0}};
    CHECK(aggregate_interference(0, 2, one, line, 2.0) == 0.25);
  }
  SUBCASE("receiver and intended transmitter are skipped") {
    const std::vector<Transmitter> all{{0, 1.0}, {1, 1.0}, {2, 1.0}};
    CHECK(aggregate_interference(0, 1, all, line, 2.0) == received_power(1.0, 4.0, 2.0));
  }
  SUBCASE("co-located interferer") {
    const Placement stacked{{0, 0}, {5, 5}, {0, 0}};
    const std::vector<Transmitter> t{{2, 1.0}};
    CHECK_THROWS_AS(aggregate_interference(0, 1, t, stacked, 3.0), GeometryError);
  }
}

TEST_CASE("aggregate interference equals a term-by-term sum") {
  Gen g(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Placement pl = g.placement(6, 100.0);
    const NodeId rx = static_cast<NodeId>(g.index(6));
    const NodeId tx = static_cast<NodeId>((rx + 1 + g.index(5)) % 6);
    std::vector<Transmitter> active;
    for (NodeId k = 0; k < 6 && active.size() < 3; ++k)
      if (k != rx && k != tx) active.push_back({k, g.real(0.01, 1.0)});
    double manual = 0;
    for (const auto& t : active) manual += iacr::testing::path_loss(t.power, pl[t.id], pl[rx], 3.0);
    CHECK(close_rel(aggregate_interference(rx, tx, active, pl, 3.0), manual, 1e-12));
  }
}

TEST_CASE("aggregate interference is additive over disjoint subsets") {
  Gen g(14);
  for (int trial = 0; trial < 300; ++trial) {
    const Placement pl = g.placement(10, 500.0);
    std::vector<Transmitter> all;
    for (NodeId k = 2; k < 10; ++k) all.push_back({k, g.real(0.0, 1.0)});
    const std::size_t cut = g.index(all.size() + 1);
    const std::span<const Transmitter> whole(all);
    const double sum = aggregate_interference(0, 1, whole.first(cut), pl, 3.0) +
                       aggregate_interference(0, 1, whole.subspan(cut), pl, 3.0);
    CHECK(close_rel(sum, aggregate_interference(0, 1, whole, pl, 3.0), 1e-12));
  }
}

TEST_CASE("sinr") {
  ChannelModel ch;
  ch.noise_variance = 0.1;
  CHECK(sinr(1.0, 0.0, ch) == doctest::Approx(10.0).epsilon(1e-15));
  ch.noise_variance = 0.001;
  CHECK(sinr(0.25, 0.05, ch) == doctest::Approx(4.901960784313726).epsilon(1e-14));

  ChannelModel sir;
  sir.sir_mode = true;
  sir.noise_variance = 0.0;
  CHECK(sinr(1.0, 1.0, sir) == 1.0);
  CHECK(sinr(1.0, 0.0, sir) == kInfinity);
  CHECK(sinr(1.0, 0.0, sir) > 1e300);
}

TEST_CASE("sinr is monotone in signal and interference") {
  Gen g(15);
  const ChannelModel ch;
  for (int i = 0; i < 1000; ++i) {
    const double s = g.real(0, 1e-6), in = g.real(0, 1e-6), ds = g.real(0, 1e-7), di = g.real(0, 1e-7);
    CHECK(sinr(s, in + di, ch) <= sinr(s, in, ch));
    CHECK(sinr(s + ds, in, ch) >= sinr(s, in, ch));
  }
}

TEST_CASE("link budget matches its parts") {
  const Placement pl{{0, 0}, {10, 0}, {30, 0}};
  const ChannelModel ch;
  const std::vector<Transmitter> other{{2, 0.5}};
  const LinkBudget b = link_budget(0, 1, 1.0, other, pl, ch);
  CHECK(b.signal_power == received_power(1.0, 10.0, 3.0));
  CHECK(b.interference_power == received_power(0.5, 20.0, 3.0));
  CHECK(b.sinr == b.signal_power / (b.interference_power + ch.noise_variance));
}

TEST_CASE("neighbor threshold is inclusive") {
  ChannelModel ch;
  ch.alpha = 2.0;
  ch.detection_threshold = 0.01;  // exactly 1 / 10^2
  const Placement at_edge{{0, 0}, {10, 0}};
  CHECK(neighbors_of(0, at_edge, ch, 1.0) == std::vector<NodeId>{1});
  const Placement beyond{{0, 0}, {10.000001, 0}};
  CHECK(neighbors_of(0, beyond, ch, 1.0).empty());
}

TEST_CASE("neighbor graph equals a brute-force pairwise check") {
  Gen g(16);
  ChannelModel ch;
  ch.detection_threshold = 3.7e-8;
  for (int trial = 0; trial < 100; ++trial) {
    const Placement pl = g.placement(10, 800.0);
    const auto graph = neighbor_graph(pl, ch, 1.0);
    for (NodeId i = 0; i < 10; ++i) {
      std::vector<NodeId> expect;
      for (NodeId j = 0; j < 10; ++j)
        if (i != j && iacr::testing::path_loss(1.0, pl[i], pl[j], 3.0) >= 3.7e-8) expect.push_back(j);
      CHECK(graph[i] == expect);
      CHECK(std::find(graph[i].begin(), graph[i].end(), i) == graph[i].end());
      for (NodeId j : graph[i])
        CHECK(std::binary_search(graph[j].begin(), graph[j].end(), i));
    }
  }
}

TEST_CASE("channel validation") {
  ChannelModel ch;
  CHECK_NOTHROW(ch.validate());
  ch.alpha = 1.5;
  CHECK_THROWS(ch.validate());
  ch = {};
  ch.noise_variance = -1;
  CHECK_THROWS(ch.validate());
  ch = {};
  ch.detection_threshold = 0;
  CHECK_THROWS(ch.validate());
}
