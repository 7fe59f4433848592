#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "iacr/radio.hpp"

namespace iacr {

/// Number of consecutive missed refresh epochs after which a row stops being
/// used for relay selection.
inline constexpr std::int64_t kStaleEpochs = 3;

struct InfoCollectionMessage {
  enum class Kind { Request, Reply };

  Kind kind = Kind::Request;
  NodeId transmitter = 0;
  NodeId destination = 0;
  double tx_power = 0.0;                  // request: sender's P_max
  double measured_rx_power = 0.0;         // reply: P_r at the replier
  double measured_rx_interference = 0.0;  // reply: I_r at the replier

  friend bool operator==(const InfoCollectionMessage&, const InfoCollectionMessage&) = default;
};

/// One neighbor's row of a node's information table.
struct InfoRow {
  NodeId neighbor = 0;
  double created_at_neighbor = 0.0;   // interference this node creates at the neighbor
  double received_at_neighbor = 0.0;  // interference the neighbor suffers
  double aggregate_created = 0.0;     // created at every other neighbor if this one relays
  std::int64_t updated_epoch = 0;
  bool orphaned = false;  // replied but not in the current neighbor set

  friend bool operator==(const InfoRow&, const InfoRow&) = default;
};

class InformationTable {
 public:
  InformationTable() = default;
  explicit InformationTable(NodeId owner) : owner_(owner) {}

  NodeId owner() const { return owner_; }
  std::int64_t epoch() const { return epoch_; }

  /// Upserts the replier's row and recomputes the aggregate column. Replies
  /// addressed elsewhere are ignored; returns whether the reply was applied.
  bool ingest(const InfoCollectionMessage& reply);

  /// Starts a new refresh epoch. Rows for nodes outside `neighbors` are orphaned.
  void advance_epoch(std::int64_t epoch, std::span<const NodeId> neighbors);

  const InfoRow* row(NodeId neighbor) const;
  /// Row usable for relay selection at the current epoch, or nullptr.
  const InfoRow* fresh_row(NodeId neighbor) const;
  bool is_fresh(const InfoRow& row) const;

  const std::map<NodeId, InfoRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Sum of the created-interference column over every row.
  double created_total() const;

  friend bool operator==(const InformationTable&, const InformationTable&) = default;

 private:
  void recompute_aggregates();

  NodeId owner_ = 0;
  std::int64_t epoch_ = -1;  // no refresh yet
  std::map<NodeId, InfoRow> rows_;
};

/// One request per neighbor, each carrying `p_max`.
std::vector<InfoCollectionMessage> emit_icp_requests(NodeId node, std::span<const NodeId> neighbors,
                                                     double p_max);

/// Builds the reply of `receiver` to `request`, measuring received power from the
/// requester and interference from `active` (requester excluded). Returns nullopt
/// for requests addressed to another node.
std::optional<InfoCollectionMessage> handle_icp_request(NodeId receiver,
                                                        const InfoCollectionMessage& request,
                                                        const Placement& placement,
                                                        const ChannelModel& channel,
                                                        std::span<const Transmitter> active);

/// Value-returning form of InformationTable::ingest.
InformationTable ingest_icp_reply(InformationTable table, const InfoCollectionMessage& reply);

/// Epoch index of `now` for a node beaconing every `interval` seconds from `phase`.
std::int64_t hello_epoch(double now, double interval, double phase = 0.0);

/// Called on HELLO beacons. Emits piggybacked ICP requests when `now` falls in a
/// later epoch than the table has seen; otherwise returns nothing.
std::vector<InfoCollectionMessage> refresh(InformationTable& table, std::span<const NodeId> neighbors,
                                           double now, double hello_interval, double p_max,
                                           double phase = 0.0);

}  // namespace iacr
