#pragma once

#include <deque>
#include <vector>

#include "slicesim/model.hpp"

namespace slicesim {

// ---------------------------------------------------------------------------
// Primitive queue updates. All quantities are bits for the current slot;
// the [.]+ clamp keeps every queue non-negative.
// ---------------------------------------------------------------------------

// q' = [q - service]+ + arrival
double step_rsu_queue(double q, double service_bits, double arrival_bits);

struct FreeQueueStep {
  double q_b;            // RSU-side queue after the step
  double q_s;            // SL-side queue after the step
  double relayed_bits;   // bits actually moved RSU -> SL this slot
};

// Two-hop update for a free vehicle. The SL receives min(backhaul, q_b):
// bits that were never queued at the RSU cannot be relayed.
FreeQueueStep step_free_queues(double q_b, double q_s, double backhaul_bits,
                               double sl_service_bits, double arrival_bits);

// U(t+1) = [U + q_b(t+1) - eps (q_b0 - psi r_req)]+
double step_virtual_queue_u(double u, double q_b_next, double eps, double q_b0,
                            double psi_rreq_bits);

// Y(t+1) = [Y + q_b(t+1) + q_s(t+1) - eps (q_b0 + q_s0 - psi r_req)]+
double step_virtual_queue_y(double y, double q_b_next, double q_s_next,
                            double eps, double q_b0, double q_s0,
                            double psi_rreq_bits);

// ---------------------------------------------------------------------------
// Aggregate per-vehicle queue state.
// ---------------------------------------------------------------------------
struct QueueState {
  int num_vehicles = 0;
  int num_levels = 0;
  int rbs_rsu = 0;
  int rbs_sl = 0;

  std::vector<double> q_b;    // bits queued at the serving RSU
  std::vector<double> q_s;    // bits queued at the serving SL (free vehicles)
  std::vector<double> virt;   // U for vehicles outside F, Y inside F
  std::vector<double> q_b0;   // initial values, frozen at session start
  std::vector<double> q_s0;
  std::vector<double> x_av;   // running average, v * (rbs_rsu + rbs_sl) + idx
  std::vector<double> z_av;   // running average, v * num_levels + j
  long slot = 0;              // completed slots

  static QueueState make(int vehicles, int levels, int rbs_rsu, int rbs_sl,
                         double q_b0_bits);
  double x_avg(int v, int idx) const {
    return x_av[static_cast<size_t>(v) * (rbs_rsu + rbs_sl) + idx];
  }
  double z_avg(int v, int j) const {
    return z_av[static_cast<size_t>(v) * num_levels + j];
  }
};

// Incremental running-average update of the control vectors over the first
// t = state.slot + 1 slots; call once per slot before advancing the counter.
void update_running_averages(QueueState& state, const SlotDecision& decision,
                             const SlicePartition& partition);

// Session prefetch: psi seconds plus one chunk at the lowest quality, so the
// Markov denominator q(0) - psi r_req stays positive at that operating point.
double initial_queue_bits(const VideoCatalog& catalog, double psi_s);

// ---------------------------------------------------------------------------
// Playback accounting behind the reliability constraint.
// ---------------------------------------------------------------------------
struct PlaybackLedger {
  std::vector<double> delivered_bits;  // per vehicle, last-hop deliveries
  std::vector<double> demanded_bps;    // current chunk required rate
  double elapsed_s = 0;

  static PlaybackLedger make(int vehicles);
  void add_delivery(int v, double bits) {
    delivered_bits[static_cast<size_t>(v)] += bits;
  }
  // Seconds of video buffered ahead of playback: delivered/demanded - elapsed.
  // Vehicles with no demand return +inf and are excluded from estimates.
  double buffered_playback_s(int v) const;
};

// Empirical fraction of samples at or below the threshold.
double reliability_estimate(const std::vector<double>& buffered_samples,
                            double psi_s);

// ---------------------------------------------------------------------------
// Per-bit FIFO latency ledger at the transmitter. Arrivals enter as slot
// lumps; deliveries consume them in order; the departure of a chunk's last
// bit yields one latency sample.
// ---------------------------------------------------------------------------
struct LatencySample {
  int vehicle = 0;
  int chunk = 0;
  double seconds = 0;
};

class LatencyLedger {
 public:
  explicit LatencyLedger(int vehicles, double slot_duration_s)
      : queues_(static_cast<size_t>(vehicles)), slot_s_(slot_duration_s) {}

  // tail marks the lump completing a chunk; chunk < 0 lumps (prefetch) never
  // produce samples.
  void add_arrival(int v, long slot, double bits, int chunk, bool tail);
  void deliver(int v, double bits, long now_slot,
               std::vector<LatencySample>& out);

 private:
  struct Entry {
    long arrival_slot;
    double bits_left;
    int chunk;
    bool tail;
  };
  std::vector<std::deque<Entry>> queues_;
  double slot_s_;
};

}  // namespace slicesim
