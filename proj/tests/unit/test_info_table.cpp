#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "iacr/info_table.hpp"
#include "iacr/routing.hpp"
#include "support.hpp"

using namespace iacr;
using iacr::testing::Gen;
using iacr::testing::close_rel;

namespace {

InfoCollectionMessage reply_from(NodeId replier, NodeId owner, double pr, double ir = 0.0) {
  InfoCollectionMessage m;
  m.kind = InfoCollectionMessage::Kind::Reply;
  m.transmitter = replier;
  m.destination = owner;
  m.measured_rx_power = pr;
  m.measured_rx_interference = ir;
  return m;
}

void check_column_four(const InformationTable& t) {
  double total = 0;
  for (const auto& [id, row] : t.rows()) total += row.created_at_neighbor;
  for (const auto& [id, row] : t.rows()) {
    double others = 0;
    for (const auto& [k, r] : t.rows())
      if (k != id) others += r.created_at_neighbor;
    CHECK(close_rel(row.aggregate_created, others, 1e-12));
    CHECK(close_rel(row.aggregate_created + row.created_at_neighbor, total, 1e-12));
  }
}

}  // namespace

TEST_CASE("one request per neighbor at full power") {
  const std::vector<NodeId> three{2, 5, 9};
  const auto reqs = emit_icp_requests(1, three, 0.8);
  REQUIRE(reqs.size() == 3);
  std::set<NodeId> dests;
  for (const auto& r : reqs) {
    dests.insert(r.destination);
    CHECK(r.kind == InfoCollectionMessage::Kind::Request);
    CHECK(r.transmitter == 1);
    CHECK(r.tx_power == 0.8);
  }
  CHECK(dests == std::set<NodeId>{2, 5, 9});
  CHECK(emit_icp_requests(1, {}, 1.0).empty());

  const std::vector<NodeId> one{4};
  CHECK(emit_icp_requests(0, one, 1.0).front().tx_power == 1.0);
}

TEST_CASE("reply measures received power and interference") {
  const ChannelModel ch;
  InfoCollectionMessage req;
  req.transmitter = 0;
  req.destination = 1;
  req.tx_power = 1.0;

  SUBCASE("quiet channel") {
    const Placement pl{{0, 0}, {1, 0}};
    const auto reply = handle_icp_request(1, req, pl, ch, {});
    REQUIRE(reply);
    CHECK(reply->kind == InfoCollectionMessage::Kind::Reply);
    CHECK(reply->transmitter == 1);
    CHECK(reply->destination == 0);
    CHECK(reply->measured_rx_power == 1.0);
    CHECK(reply->measured_rx_interference == 0.0);
  }
  SUBCASE("one interferer") {
    ChannelModel sq = ch;
    sq.alpha = 2.0;
    const Placement pl{{0, 0}, {1, 0}, {1, 2}};
    const std::vector<Transmitter> active{{0, 1.0}, {2, 1.0}};  // the requester is excluded
    const auto reply = handle_icp_request(1, req, pl, sq, active);
    REQUIRE(reply);
    CHECK(reply->measured_rx_interference == 0.25);
  }
  SUBCASE("not addressed here") {
    const Placement pl{{0, 0}, {1, 0}, {2, 0}};
    CHECK_FALSE(handle_icp_request(2, req, pl, ch, {}));
  }
}

TEST_CASE("reply fields equal direct recomputation") {
  Gen g(21);
  const ChannelModel ch;
  for (int trial = 0; trial < 200; ++trial) {
    const Placement pl = g.placement(8, 400.0);
    const NodeId rx = static_cast<NodeId>(g.index(8));
    const NodeId tx = static_cast<NodeId>((rx + 1 + g.index(7)) % 8);
    std::vector<Transmitter> active;
    for (NodeId k = 0; k < 8; ++k)
      if (g.coin()) active.push_back({k, g.real(0.01, 1.0)});
    InfoCollectionMessage req;
    req.transmitter = tx;
    req.destination = rx;
    req.tx_power = 1.0;
    const auto reply = handle_icp_request(rx, req, pl, ch, active);
    REQUIRE(reply);
    CHECK(close_rel(reply->measured_rx_power, iacr::testing::path_loss(1.0, pl[tx], pl[rx], 3.0), 1e-12));
    double manual = 0;
    for (const auto& a : active)
      if (a.id != tx && a.id != rx) manual += iacr::testing::path_loss(a.power, pl[a.id], pl[rx], 3.0);
    CHECK(close_rel(reply->measured_rx_interference, manual, 1e-12));
  }
}

TEST_CASE("ingest fills the table") {
  InformationTable t(0);
  t = ingest_icp_reply(t, reply_from(1, 0, 0.3));
  REQUIRE(t.size() == 1);
  CHECK(t.row(1)->aggregate_created == 0.0);
  t = ingest_icp_reply(t, reply_from(2, 0, 0.7, 0.05));
  CHECK(t.row(1)->aggregate_created == 0.7);
  CHECK(t.row(2)->aggregate_created == 0.3);
  CHECK(t.row(2)->created_at_neighbor == 0.7);
  CHECK(t.row(2)->received_at_neighbor == 0.05);
  CHECK(t.created_total() == doctest::Approx(1.0));

  const InformationTable before = t;
  CHECK_FALSE(t.ingest(reply_from(3, 9, 0.1)));  // addressed to someone else
  CHECK(t == before);
}

TEST_CASE("column four identity over random replies") {
  Gen g(22);
  for (int trial = 0; trial < 200; ++trial) {
    InformationTable t(0);
    const std::size_t n = 1 + g.index(12);
    for (std::size_t k = 0; k < n; ++k)
      t.ingest(reply_from(static_cast<NodeId>(1 + g.index(20)), 0, std::pow(10.0, g.real(-9, 0)),
                          g.real(0, 1e-7)));
    check_column_four(t);
  }
}

TEST_CASE("ingest is idempotent") {
  Gen g(23);
  for (int trial = 0; trial < 100; ++trial) {
    InformationTable t(3);
    for (int k = 0; k < 4; ++k) t.ingest(reply_from(static_cast<NodeId>(k), 3, g.real(0, 1)));
    const auto r = reply_from(static_cast<NodeId>(g.index(6)), 3, g.real(0, 1), g.real(0, 1));
    const InformationTable once = ingest_icp_reply(t, r);
    CHECK(ingest_icp_reply(once, r) == once);
  }
}

TEST_CASE("refresh fires once per epoch") {
  InformationTable t(0);
  const std::vector<NodeId> nbrs{1, 2};
  CHECK(refresh(t, nbrs, 0.0, 0.2, 1.0).size() == 2);
  CHECK(refresh(t, nbrs, 0.15, 0.2, 1.0).empty());
  CHECK(refresh(t, nbrs, 0.2, 0.2, 1.0).size() == 2);
  CHECK(refresh(t, nbrs, 0.3, 0.2, 1.0).empty());
  CHECK(hello_epoch(0.25, 0.2, 0.05) == 1);
  CHECK(hello_epoch(0.2, 0.2) == 1);
}

TEST_CASE("silent neighbors go stale") {
  InformationTable t(0);
  const std::vector<NodeId> nbrs{1, 2};
  refresh(t, nbrs, 0.0, 0.2, 1.0);
  t.ingest(reply_from(1, 0, 0.5, 0.1));
  t.ingest(reply_from(2, 0, 0.4, 0.2));
  const MetricPolicy iaee = MetricPolicy::iaee();
  for (int epoch = 1; epoch <= 4; ++epoch) {
    refresh(t, nbrs, 0.2 * epoch, 0.2, 1.0);
    t.ingest(reply_from(1, 0, 0.5, 0.1));  // node 2 stays silent
    CHECK(link_metric(iaee, 1, t) == 0.1);
    if (epoch <= kStaleEpochs)
      CHECK(link_metric(iaee, 2, t) == 0.2);
    else
      CHECK(link_metric(iaee, 2, t) == kInfinity);
  }
}

TEST_CASE("rows outside the neighbor set are orphaned") {
  InformationTable t(0);
  const std::vector<NodeId> nbrs{1};
  refresh(t, nbrs, 0.0, 0.2, 1.0);
  t.ingest(reply_from(7, 0, 0.5));  // not a neighbor
  REQUIRE(t.row(7));
  refresh(t, nbrs, 0.2, 0.2, 1.0);
  CHECK(t.row(7)->orphaned);
  CHECK(t.fresh_row(7) == nullptr);
}
