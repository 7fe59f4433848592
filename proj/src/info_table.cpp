#include "iacr/info_table.hpp"

#include <algorithm>
#include <cmath>

namespace iacr {

bool InformationTable::ingest(const InfoCollectionMessage& reply) {
  if (reply.kind != InfoCollectionMessage::Kind::Reply || reply.destination != owner_) return false;
  InfoRow& row = rows_[reply.transmitter];
  row.neighbor = reply.transmitter;
  row.created_at_neighbor = reply.measured_rx_power;
  row.received_at_neighbor = reply.measured_rx_interference;
  row.updated_epoch = epoch_;
  recompute_aggregates();
  return true;
}

void InformationTable::advance_epoch(std::int64_t epoch, std::span<const NodeId> neighbors) {
  epoch_ = std::max(epoch_, epoch);
  for (auto& [id, row] : rows_)
    row.orphaned = std::find(neighbors.begin(), neighbors.end(), id) == neighbors.end();
}

const InfoRow* InformationTable::row(NodeId neighbor) const {
  auto it = rows_.find(neighbor);
  return it == rows_.end() ? nullptr : &it->second;
}

const InfoRow* InformationTable::fresh_row(NodeId neighbor) const {
  const InfoRow* r = row(neighbor);
  return r != nullptr && is_fresh(*r) ? r : nullptr;
}

bool InformationTable::is_fresh(const InfoRow& row) const {
  return !row.orphaned && epoch_ - row.updated_epoch <= kStaleEpochs;
}

double InformationTable::created_total() const {
  double total = 0.0;
  for (const auto& [id, row] : rows_) total += row.created_at_neighbor;
  return total;
}

// Direct sum over k != j rather than total - created(j): the subtraction cancels
// badly when one neighbor dominates.
void InformationTable::recompute_aggregates() {
  for (auto& [j, row] : rows_) {
    double sum = 0.0;
    for (const auto& [k, other] : rows_)
      if (k != j) sum += other.created_at_neighbor;
    row.aggregate_created = sum;
  }
}

std::vector<InfoCollectionMessage> emit_icp_requests(NodeId node, std::span<const NodeId> neighbors,
                                                     double p_max) {
  std::vector<InfoCollectionMessage> out;
  out.reserve(neighbors.size());
  for (NodeId neighbor : neighbors) {
    InfoCollectionMessage m;
    m.kind = InfoCollectionMessage::Kind::Request;
    m.transmitter = node;
    m.destination = neighbor;
    m.tx_power = p_max;
    out.push_back(m);
  }
  return out;
}

std::optional<InfoCollectionMessage> handle_icp_request(NodeId receiver,
                                                        const InfoCollectionMessage& request,
                                                        const Placement& placement,
                                                        const ChannelModel& channel,
                                                        std::span<const Transmitter> active) {
  if (request.kind != InfoCollectionMessage::Kind::Request || request.destination != receiver)
    return std::nullopt;
  InfoCollectionMessage reply;
  reply.kind = InfoCollectionMessage::Kind::Reply;
  reply.transmitter = receiver;
  reply.destination = request.transmitter;
  reply.measured_rx_power =
      received_power(request.tx_power,
                     distance(placement.at(request.transmitter), placement.at(receiver)),
                     channel.alpha);
  reply.measured_rx_interference =
      aggregate_interference(receiver, request.transmitter, active, placement, channel.alpha);
  return reply;
}

InformationTable ingest_icp_reply(InformationTable table, const InfoCollectionMessage& reply) {
  table.ingest(reply);
  return table;
}

std::int64_t hello_epoch(double now, double interval, double phase) {
  // Beacon times are computed as phase + k * interval; absorb the rounding.
  return static_cast<std::int64_t>(std::floor((now - phase) / interval + 1e-9));
}

std::vector<InfoCollectionMessage> refresh(InformationTable& table, std::span<const NodeId> neighbors,
                                           double now, double hello_interval, double p_max,
                                           double phase) {
  const std::int64_t epoch = hello_epoch(now, hello_interval, phase);
  if (epoch <= table.epoch()) return {};
  table.advance_epoch(epoch, neighbors);
  return emit_icp_requests(table.owner(), neighbors, p_max);
}

}  // namespace iacr
