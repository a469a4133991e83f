#include "slicesim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicesim {

double sigmoid_penalty(int z_now, int z_prev, double alpha) {
  const double t = alpha * static_cast<double>(z_now - z_prev);
  if (t >= 0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double chunk_qoe_score(int level, int prev_level, const ScenarioConfig& cfg,
                       int num_levels, bool use_sigmoid) {
  double quality = 0.0;
  for (int j = 0; j <= level; ++j) quality += cfg.level_weight(j, num_levels);

  double penalty = 0.0;
  if (level >= 0 && prev_level >= 0) {
    penalty = use_sigmoid ? sigmoid_penalty(level, prev_level, cfg.alpha)
                          : (level < prev_level ? 1.0 : 0.0);
  }
  return quality - cfg.beta * penalty;
}

QoeResult qoe_objective(const std::vector<std::vector<int>>& levels_per_vehicle,
                        const ScenarioConfig& cfg, const VideoCatalog& catalog,
                        bool use_sigmoid) {
  QoeResult out;
  out.per_vehicle.reserve(levels_per_vehicle.size());
  for (const auto& history : levels_per_vehicle) {
    double acc = 0.0;
    for (size_t i = 0; i < history.size(); ++i) {
      const int prev = i == 0 ? -1 : history[i - 1];
      acc += chunk_qoe_score(history[i], prev, cfg, catalog.num_levels(),
                             use_sigmoid);
    }
    const double mean = history.empty() ? 0.0 : acc / history.size();
    out.per_vehicle.push_back(mean);
    out.network += mean;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coefficients
// ---------------------------------------------------------------------------

DppCoefficients compute_coefficients(const QueueState& queues,
                                     const ChannelSnapshot& snap,
                                     const SlicePartition& partition,
                                     const VideoCatalog& catalog,
                                     const ScenarioConfig& cfg) {
  const int n = partition.num_vehicles;
  const int jn = catalog.num_levels();

  DppCoefficients c;
  c.num_vehicles = n;
  c.num_levels = jn;
  c.rbs_rsu = snap.rbs_rsu;
  c.rbs_sl = snap.rbs_sl;
  c.one_plus_eps_psi = 1.0 + cfg.epsilon * cfg.playback_threshold_s;
  c.level_rate.resize(static_cast<size_t>(jn));
  for (int j = 0; j < jn; ++j) c.level_rate[static_cast<size_t>(j)] = catalog.rate(j);

  const int stride = c.stride();
  c.rate_coef.assign(static_cast<size_t>(n) * stride, 0.0);
  c.theta.assign(static_cast<size_t>(n) * stride, 0.0);
  c.phi.assign(static_cast<size_t>(n), 0.0);
  c.pressure_theta.assign(static_cast<size_t>(n), 0.0);
  c.pressure_phi.assign(static_cast<size_t>(n), 0.0);
  c.anchor_x.assign(static_cast<size_t>(n) * stride, 0);
  c.anchor_level.assign(static_cast<size_t>(n), -1);

  double rate_sum = 0.0;
  for (int j = 0; j < jn; ++j) rate_sum += catalog.rate(j);

  for (int v = 0; v < n; ++v) {
    const Role role = partition.role[static_cast<size_t>(v)];
    double own_pressure;
    if (role == Role::Free) {
      own_pressure = queues.virt[static_cast<size_t>(v)] +
                     queues.q_b[static_cast<size_t>(v)] +
                     queues.q_s[static_cast<size_t>(v)] -
                     cfg.epsilon * (queues.q_b0[static_cast<size_t>(v)] +
                                    queues.q_s0[static_cast<size_t>(v)]);
    } else {
      own_pressure = queues.virt[static_cast<size_t>(v)] +
                     queues.q_b[static_cast<size_t>(v)] -
                     cfg.epsilon * queues.q_b0[static_cast<size_t>(v)];
    }
    double theta_pressure = own_pressure;
    if (role == Role::SliceLeader) {
      // The leader's V2I link carries its own traffic plus the cluster's
      // backhaul; its RB weight sees the relayed backlogs as well.
      const int li = partition.leader_index(v);
      for (int f : partition.members[static_cast<size_t>(li)])
        theta_pressure += queues.q_b[static_cast<size_t>(f)];
    }
    c.pressure_theta[static_cast<size_t>(v)] = theta_pressure;
    c.pressure_phi[static_cast<size_t>(v)] = own_pressure;

    TxRef tx;
    int pool;
    if (role == Role::Free) {
      tx = {TxRef::Sl, snap.sl_index_of(partition.serving_sl[static_cast<size_t>(v)])};
      pool = snap.rbs_sl;
    } else {
      tx = {TxRef::Rsu, partition.serving_rsu[static_cast<size_t>(v)]};
      pool = snap.rbs_rsu;
    }
    for (int m = 0; m < pool; ++m) {
      const double rate =
          snap.rb_bandwidth_hz * std::log2(1.0 + sinr(snap, tx, v, m));
      c.rate_coef[static_cast<size_t>(v) * stride + m] = rate;
      c.theta[static_cast<size_t>(v) * stride + m] = -rate * theta_pressure;
    }

    double avg_quality = 0.0;
    for (int j = 0; j < jn; ++j)
      avg_quality += cfg.level_weight(j, jn) * queues.z_avg(v, j);
    c.phi[static_cast<size_t>(v)] =
        -cfg.eta * avg_quality + rate_sum * own_pressure * c.one_plus_eps_psi;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Solver internals
// ---------------------------------------------------------------------------

namespace {

struct Eligibility {
  std::vector<std::vector<int>> per_rsu;  // attached non-free vehicles
  std::vector<std::vector<int>> per_sl;   // cluster members
};

Eligibility build_eligibility(const SlicePartition& p, int num_rsus) {
  Eligibility e;
  e.per_rsu.assign(static_cast<size_t>(num_rsus), {});
  e.per_sl = p.members;
  for (int v = 0; v < p.num_vehicles; ++v) {
    if (p.role[static_cast<size_t>(v)] == Role::Free) continue;
    const int b = p.serving_rsu[static_cast<size_t>(v)];
    if (b >= 0 && b < num_rsus) e.per_rsu[static_cast<size_t>(b)].push_back(v);
  }
  return e;
}

int pool_size_of(const DppCoefficients& c, const SlicePartition& p, int v) {
  return p.role[static_cast<size_t>(v)] == Role::Free ? c.rbs_sl : c.rbs_rsu;
}

// Per-vehicle contribution of the exact objective for a given RB set / level.
double true_vehicle_value(const DppCoefficients& c, int v,
                          const std::vector<int>& held_rbs, int level) {
  double val = static_cast<double>(level + 1) * c.phi[static_cast<size_t>(v)];
  for (int m : held_rbs) {
    val += c.theta_at(v, m);
    for (int j = 0; j <= level; ++j) val -= c.zeta(v, m, j);
  }
  return val;
}

std::vector<int> held_rbs_of(const SlotDecision& d, const SlicePartition& p,
                             int v) {
  if (p.role[static_cast<size_t>(v)] == Role::Free) {
    const int s = p.leader_index(p.serving_sl[static_cast<size_t>(v)]);
    return s >= 0 ? d.held_rbs_sl(s, v) : std::vector<int>{};
  }
  const int b = p.serving_rsu[static_cast<size_t>(v)];
  return b >= 0 ? d.held_rbs_rsu(b, v) : std::vector<int>{};
}

// Surrogate marginal of assigning RB m to vehicle v, given its level and the
// CCP anchor: theta + sum_j (zeta/4) (1 - 2 z_j - 2 (a + b_j)).
double surrogate_x_marginal(const DppCoefficients& c, int v, int m, int level) {
  const int stride = c.stride();
  const double a = c.anchor_x[static_cast<size_t>(v) * stride + m] ? 1.0 : 0.0;
  const int anchor_l = c.anchor_level[static_cast<size_t>(v)];
  double val = c.theta_at(v, m);
  for (int j = 0; j < c.num_levels; ++j) {
    const double z = j <= level ? 1.0 : 0.0;
    const double b = j <= anchor_l ? 1.0 : 0.0;
    val += (c.zeta(v, m, j) / 4.0) * (1.0 - 2.0 * z - 2.0 * (a + b));
  }
  return val;
}

// Surrogate marginal of enabling level j for vehicle v given its RB set:
// phi + sum_m (zeta/4) (1 - 2 x_m - 2 (a + b_j)).
double surrogate_z_marginal(const DppCoefficients& c, int v, int j,
                            const std::vector<std::uint8_t>& x_mask, int pool) {
  const int stride = c.stride();
  const int anchor_l = c.anchor_level[static_cast<size_t>(v)];
  const double b = j <= anchor_l ? 1.0 : 0.0;
  double val = c.phi[static_cast<size_t>(v)];
  for (int m = 0; m < pool; ++m) {
    const double a = c.anchor_x[static_cast<size_t>(v) * stride + m] ? 1.0 : 0.0;
    const double x = x_mask[static_cast<size_t>(m)] ? 1.0 : 0.0;
    val += (c.zeta(v, m, j) / 4.0) * (1.0 - 2.0 * x - 2.0 * (a + b));
  }
  return val;
}

// One exact RB-assignment pass over every pool; owner per RB is the eligible
// vehicle with the most negative marginal (ties to the lowest id),
// unassigned when no marginal is negative.
template <typename Marginal>
void assign_rbs(SlotDecision& d, const Eligibility& elig, Marginal&& marginal) {
  for (int b = 0; b < d.num_rsus; ++b) {
    for (int m = 0; m < d.rbs_rsu; ++m) {
      int best = -1;
      double best_val = 0.0;
      for (int v : elig.per_rsu[static_cast<size_t>(b)]) {
        const double val = marginal(v, m);
        if (val < best_val) {
          best_val = val;
          best = v;
        }
      }
      d.set_rsu_owner(b, m, best);
    }
  }
  for (int s = 0; s < d.num_sls; ++s) {
    for (int m = 0; m < d.rbs_sl; ++m) {
      int best = -1;
      double best_val = 0.0;
      for (int v : elig.per_sl[static_cast<size_t>(s)]) {
        const double val = marginal(v, m);
        if (val < best_val) {
          best_val = val;
          best = v;
        }
      }
      d.set_sl_owner(s, m, best);
    }
  }
}

// Best quality prefix per vehicle under the surrogate, given the current x.
// Scanning upward keeps the lowest level on ties.
int best_prefix_surrogate(const DppCoefficients& c, int v,
                          const std::vector<std::uint8_t>& x_mask, int pool,
                          int min_level) {
  double cum = 0.0;
  double best_val = 0.0;
  int best_l = -1;
  for (int j = 0; j < c.num_levels; ++j) {
    cum += surrogate_z_marginal(c, v, j, x_mask, pool);
    if (j < min_level) continue;
    if (best_l < min_level || cum < best_val) {
      best_val = cum;
      best_l = j;
    }
  }
  return best_l;
}

int best_prefix_true(const DppCoefficients& c, int v,
                     const std::vector<int>& held_rbs, int min_level) {
  double cum = 0.0;
  double best_val = 0.0;
  int best_l = -1;
  for (int j = 0; j < c.num_levels; ++j) {
    double marg = c.phi[static_cast<size_t>(v)];
    for (int m : held_rbs) marg -= c.zeta(v, m, j);
    cum += marg;
    if (j < min_level) continue;
    if (best_l < min_level || cum < best_val) {
      best_val = cum;
      best_l = j;
    }
  }
  return best_l;
}

std::vector<std::uint8_t> x_mask_of(const SlotDecision& d,
                                    const SlicePartition& p, int v, int pool) {
  std::vector<std::uint8_t> mask(static_cast<size_t>(pool), 0);
  for (int m : held_rbs_of(d, p, v)) mask[static_cast<size_t>(m)] = 1;
  return mask;
}

}  // namespace

double true_dpp_value(const DppCoefficients& coeffs, const SlotProblem& problem,
                      const SlotDecision& decision) {
  const SlicePartition& p = *problem.partition;
  double total = 0.0;
  for (int v = 0; v < coeffs.num_vehicles; ++v)
    total += true_vehicle_value(coeffs, v, held_rbs_of(decision, p, v),
                                decision.level[static_cast<size_t>(v)]);
  return total;
}

SchedulerOutcome ccp_solve(const DppCoefficients& coeffs,
                           const SlotProblem& problem) {
  const SlicePartition& p = *problem.partition;
  const ScenarioConfig& cfg = *problem.cfg;
  const Eligibility elig = build_eligibility(p, problem.num_rsus);

  SchedulerOutcome out;
  out.decision = SlotDecision::empty(coeffs.num_vehicles, problem.num_rsus,
                                     p.num_sls(), coeffs.rbs_rsu, coeffs.rbs_sl);
  SlotDecision& d = out.decision;

  if (!problem.chunk_boundary) {
    // z is frozen to the chunk's choice; the bilinear term is linear in x and
    // the RB assignment is exact without any CCP iteration.
    d.level = problem.held_level;
    assign_rbs(d, elig, [&](int v, int m) {
      double val = coeffs.theta_at(v, m);
      for (int j = 0; j <= d.level[static_cast<size_t>(v)]; ++j)
        val -= coeffs.zeta(v, m, j);
      return val;
    });
    out.ccp_iterations = 0;
    out.converged = true;
    out.surrogate_value = true_dpp_value(coeffs, problem, d);
    return out;
  }

  // Pool table: each transmitter's RB block solves independently (the
  // objective separates across pools; constraints are per-pool).
  struct PoolRef {
    bool is_rsu;
    int idx;                      // RSU id or SL slot index
    const std::vector<int>* elig;
    int rbs;
  };
  std::vector<PoolRef> pools;
  std::vector<int> pool_of(static_cast<size_t>(coeffs.num_vehicles), -1);
  for (int b = 0; b < problem.num_rsus; ++b) {
    pools.push_back({true, b, &elig.per_rsu[static_cast<size_t>(b)], coeffs.rbs_rsu});
    for (int v : elig.per_rsu[static_cast<size_t>(b)])
      pool_of[static_cast<size_t>(v)] = static_cast<int>(pools.size()) - 1;
  }
  for (int s = 0; s < p.num_sls(); ++s) {
    pools.push_back({false, s, &elig.per_sl[static_cast<size_t>(s)], coeffs.rbs_sl});
    for (int v : elig.per_sl[static_cast<size_t>(s)])
      pool_of[static_cast<size_t>(v)] = static_cast<int>(pools.size()) - 1;
  }

  // One CCP descent from a given anchor: linearize, solve the inner
  // subproblem (exact per-RB assignment, exact per-vehicle prefix scan, then
  // pool-local level probes that let the assignment react), move the anchor,
  // repeat until the true objective stops improving.
  struct CcpRun {
    SlotDecision decision;
    double value = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> iteration_values;
  };
  const auto descend = [&](std::vector<std::uint8_t> anchor_x,
                           std::vector<int> anchor_level) {
    CcpRun run;
    run.decision = SlotDecision::empty(coeffs.num_vehicles, problem.num_rsus,
                                       p.num_sls(), coeffs.rbs_rsu,
                                       coeffs.rbs_sl);
    DppCoefficients work = coeffs;
    work.anchor_x = std::move(anchor_x);
    work.anchor_level = std::move(anchor_level);

    SlotDecision& cand = run.decision;
    cand.level = work.anchor_level;
    double prev_val = true_dpp_value(work, problem, cand);

    // True-objective marginal of assigning RB m to v at its current level
    // (the bilinear term is linear in x once z is fixed).
    const auto true_x_marginal = [&](int v, int m, int level) {
      double val = work.theta_at(v, m);
      for (int j = 0; j <= level; ++j) val -= work.zeta(v, m, j);
      return val;
    };
    const auto rb_owner_true = [&](const PoolRef& pool, int m,
                                   const std::vector<int>& level) {
      int best = -1;
      double best_val = 0.0;
      for (int v : *pool.elig) {
        const double val = true_x_marginal(v, m, level[static_cast<size_t>(v)]);
        if (val < best_val) {
          best_val = val;
          best = v;
        }
      }
      return best;
    };
    // True objective restricted to one pool (owners passed explicitly).
    const auto pool_value_true = [&](const PoolRef& pool,
                                     const std::vector<int>& owners,
                                     const std::vector<int>& level) {
      double val = 0.0;
      for (int m = 0; m < pool.rbs; ++m) {
        const int o = owners[static_cast<size_t>(m)];
        if (o >= 0) val += true_x_marginal(o, m, level[static_cast<size_t>(o)]);
      }
      for (int v : *pool.elig)
        val += (level[static_cast<size_t>(v)] + 1) * work.phi[static_cast<size_t>(v)];
      return val;
    };
    const auto owners_of = [&](const PoolRef& pool) {
      std::vector<int> owners(static_cast<size_t>(pool.rbs));
      for (int m = 0; m < pool.rbs; ++m)
        owners[static_cast<size_t>(m)] =
            pool.is_rsu ? cand.rsu_owner_at(pool.idx, m)
                        : cand.sl_owner_at(pool.idx, m);
      return owners;
    };
    const auto store_owners = [&](const PoolRef& pool,
                                  const std::vector<int>& owners) {
      for (int m = 0; m < pool.rbs; ++m) {
        if (pool.is_rsu)
          cand.set_rsu_owner(pool.idx, m, owners[static_cast<size_t>(m)]);
        else
          cand.set_sl_owner(pool.idx, m, owners[static_cast<size_t>(m)]);
      }
    };

    for (int iter = 1; iter <= cfg.ccp_max_iters; ++iter) {
      // (i)-(ii) linearize around the anchor and solve the surrogate program
      // by alternating the two exact blocks until they stabilize.
      std::vector<int> level = work.anchor_level;
      for (int pass = 0; pass < 64; ++pass) {
        assign_rbs(cand, elig, [&](int v, int m) {
          return surrogate_x_marginal(work, v, m, level[static_cast<size_t>(v)]);
        });
        bool changed = false;
        for (int v = 0; v < work.num_vehicles; ++v) {
          const int pool = pool_size_of(work, p, v);
          const auto mask = x_mask_of(cand, p, v, pool);
          const int best =
                best_prefix_surrogate(work, v, mask, pool, problem.min_level);
          if (best != level[static_cast<size_t>(v)]) {
            level[static_cast<size_t>(v)] = best;
            changed = true;
          }
        }
        if (!changed) break;
      }
      // (iii) refine the integral iterate on the true objective, where both
      // blocks are exact as well; level probes let the pool's assignment
      // react so a vehicle can justify a level through the RBs it would win.
      for (int round = 0; round < 64; ++round) {
        for (int pass = 0; pass < 64; ++pass) {
          assign_rbs(cand, elig, [&](int v, int m) {
            return true_x_marginal(v, m, level[static_cast<size_t>(v)]);
          });
          bool changed = false;
          for (int v = 0; v < work.num_vehicles; ++v) {
            const int best = best_prefix_true(work, v, held_rbs_of(cand, p, v),
                                              problem.min_level);
            if (best != level[static_cast<size_t>(v)]) {
              level[static_cast<size_t>(v)] = best;
              changed = true;
            }
          }
          if (!changed) break;
        }
        bool adopted = false;
        for (int v = 0; v < work.num_vehicles && !adopted; ++v) {
          const int pi = pool_of[static_cast<size_t>(v)];
          if (pi < 0) continue;
          const PoolRef& pool = pools[static_cast<size_t>(pi)];
          const std::vector<int> owners = owners_of(pool);
          const double before = pool_value_true(pool, owners, level);
          const int current = level[static_cast<size_t>(v)];
          for (int lvl = problem.min_level; lvl < work.num_levels && !adopted;
               ++lvl) {
            if (lvl == current) continue;
            level[static_cast<size_t>(v)] = lvl;
            std::vector<int> trial(static_cast<size_t>(pool.rbs));
            for (int m = 0; m < pool.rbs; ++m)
              trial[static_cast<size_t>(m)] = rb_owner_true(pool, m, level);
            const double after = pool_value_true(pool, trial, level);
            if (after < before - 1e-9 * (1.0 + std::fabs(before))) {
              store_owners(pool, trial);
              adopted = true;
            } else {
              level[static_cast<size_t>(v)] = current;
            }
          }
        }
        if (!adopted) break;
      }
      cand.level = level;

      const double cur_val = true_dpp_value(work, problem, cand);
      run.iteration_values.push_back(cur_val);
      run.iterations = iter;

      // Move the anchor to the new iterate.
      const int stride = work.stride();
      std::fill(work.anchor_x.begin(), work.anchor_x.end(), 0);
      for (int v = 0; v < work.num_vehicles; ++v)
        for (int m : held_rbs_of(cand, p, v))
          work.anchor_x[static_cast<size_t>(v) * stride + m] = 1;
      work.anchor_level = level;

      const double improvement = prev_val - cur_val;
      if (improvement <= cfg.ccp_tolerance * std::max(1.0, std::fabs(prev_val))) {
        run.converged = true;
        break;
      }
      prev_val = cur_val;
    }
    run.value = true_dpp_value(work, problem, cand);
    return run;
  };

  // The bilinear coupling leaves the descent with genuine local minima (a
  // vehicle without RBs cannot justify a level, a vehicle without a level
  // attracts no RBs). Descend from the warm-start anchor plus structured
  // cold starts: empty, and one start per vehicle of a small pool (the
  // vehicle owning its whole pool at the top level). Large pools rely on the
  // warm start and level probes. Deterministic order; best true value wins.
  constexpr size_t kMultiStartPoolLimit = 6;
  const int stride = coeffs.stride();
  CcpRun best = descend(coeffs.anchor_x, coeffs.anchor_level);
  const auto consider = [&](const CcpRun& run) {
    if (run.value < best.value) best = run;
  };
  consider(descend(std::vector<std::uint8_t>(coeffs.anchor_x.size(), 0),
                   std::vector<int>(static_cast<size_t>(coeffs.num_vehicles),
                                    problem.min_level)));
  for (int v = 0; v < coeffs.num_vehicles; ++v) {
    const int pi = pool_of[static_cast<size_t>(v)];
    if (pi < 0 || pools[static_cast<size_t>(pi)].elig->size() > kMultiStartPoolLimit)
      continue;
    std::vector<std::uint8_t> ax(coeffs.anchor_x.size(), 0);
    std::vector<int> al(static_cast<size_t>(coeffs.num_vehicles),
                        problem.min_level);
    const int pool = pool_size_of(coeffs, p, v);
    for (int m = 0; m < pool; ++m)
      ax[static_cast<size_t>(v) * stride + m] = 1;
    al[static_cast<size_t>(v)] = coeffs.num_levels - 1;
    consider(descend(std::move(ax), std::move(al)));
  }

  out.decision = best.decision;
  out.surrogate_value = best.value;
  out.ccp_iterations = best.iterations;
  out.converged = best.converged;
  out.iteration_values = best.iteration_values;
  return out;
}

SchedulerOutcome oracle_solve(const DppCoefficients& coeffs,
                              const SlotProblem& problem) {
  const SlicePartition& p = *problem.partition;
  for (int v = 0; v < p.num_vehicles; ++v)
    if (p.role[static_cast<size_t>(v)] != Role::Compelled)
      throw std::invalid_argument(
          "oracle_solve: only single-hop (all-compelled) instances supported");

  const Eligibility elig = build_eligibility(p, problem.num_rsus);

  // Refusal guard on the total feasible combination count.
  double combos = 1.0;
  for (int b = 0; b < problem.num_rsus; ++b)
    for (int m = 0; m < coeffs.rbs_rsu; ++m)
      combos *= static_cast<double>(elig.per_rsu[static_cast<size_t>(b)].size() + 1);
  for (int v = 0; v < coeffs.num_vehicles; ++v)
    combos *= static_cast<double>(coeffs.num_levels + 1);
  if (combos > static_cast<double>(1 << 20))
    throw std::invalid_argument("oracle_solve: instance too large");

  SchedulerOutcome out;
  out.decision = SlotDecision::empty(coeffs.num_vehicles, problem.num_rsus, 0,
                                     coeffs.rbs_rsu, coeffs.rbs_sl);

  // Mixed-radix odometer over RB owners; digit value 0 = unassigned, i+1 =
  // i-th eligible vehicle. The all-zero word comes first, so ties resolve to
  // the lexicographically first feasible point.
  struct Slot {
    int rsu;
    int m;
    const std::vector<int>* elig;
  };
  std::vector<Slot> slots;
  for (int b = 0; b < problem.num_rsus; ++b)
    for (int m = 0; m < coeffs.rbs_rsu; ++m)
      slots.push_back({b, m, &elig.per_rsu[static_cast<size_t>(b)]});

  std::vector<int> digits(slots.size(), 0);
  SlotDecision cand = out.decision;
  double best_val = 0.0;
  bool first = true;

  while (true) {
    // Materialize the candidate assignment.
    for (size_t i = 0; i < slots.size(); ++i) {
      const int dgt = digits[i];
      cand.set_rsu_owner(slots[i].rsu, slots[i].m,
                         dgt == 0 ? -1 : (*slots[i].elig)[static_cast<size_t>(dgt) - 1]);
    }
    // Exact per-vehicle level choice given x (the objective separates).
    double val = 0.0;
    for (int v = 0; v < coeffs.num_vehicles; ++v) {
      const auto held = held_rbs_of(cand, p, v);
      const int lvl = best_prefix_true(coeffs, v, held, problem.min_level);
      cand.level[static_cast<size_t>(v)] = lvl;
      val += true_vehicle_value(coeffs, v, held, lvl);
    }
    if (first || val < best_val) {
      best_val = val;
      out.decision = cand;
      first = false;
    }
    // Advance the odometer (last slot fastest); a full wrap ends the scan.
    bool advanced = false;
    size_t i = slots.size();
    while (i > 0) {
      --i;
      if (digits[i] < static_cast<int>(slots[i].elig->size())) {
        ++digits[i];
        std::fill(digits.begin() + static_cast<long>(i) + 1, digits.end(), 0);
        advanced = true;
        break;
      }
      digits[i] = 0;
    }
    if (!advanced) break;
  }

  out.surrogate_value = best_val;
  out.ccp_iterations = 0;
  out.converged = true;
  return out;
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

SchedulerOutcome BaselineScheduler::schedule(const SlotProblem& problem,
                                             const ChannelSnapshot& snap,
                                             const QueueState& queues) {
  const SlicePartition& p = *problem.partition;
  const VideoCatalog& cat = *problem.catalog;
  const Eligibility elig = build_eligibility(p, problem.num_rsus);

  SchedulerOutcome out;
  out.decision = SlotDecision::empty(p.num_vehicles, problem.num_rsus,
                                     p.num_sls(), snap.rbs_rsu, snap.rbs_sl);
  SlotDecision& d = out.decision;

  if (problem.chunk_boundary) {
    // Greedy quality: highest level whose rate fits the expected service
    // rate, never below the lowest level.
    for (int v = 0; v < p.num_vehicles; ++v) {
      int lvl = 0;
      for (int j = cat.num_levels() - 1; j >= 1; --j) {
        if (cat.rate(j) <= ewma_bps_[static_cast<size_t>(v)]) {
          lvl = j;
          break;
        }
      }
      level_[static_cast<size_t>(v)] = lvl;
    }
  }
  d.level = level_;

  // Backlog of the queue a transmitter would serve for vehicle v. A slice
  // leader's V2I link also carries its cluster's RSU-side backlog.
  const auto rsu_backlog = [&](int v) {
    double q = queues.q_b[static_cast<size_t>(v)];
    if (p.role[static_cast<size_t>(v)] == Role::SliceLeader) {
      const int li = p.leader_index(v);
      for (int f : p.members[static_cast<size_t>(li)])
        q += queues.q_b[static_cast<size_t>(f)];
    }
    return q;
  };

  // Proportional-fair pass per pool: metric = instantaneous rate over the
  // smoothed served rate, restricted to backlogged vehicles.
  for (int b = 0; b < problem.num_rsus; ++b) {
    for (int m = 0; m < snap.rbs_rsu; ++m) {
      int best = -1;
      double best_metric = -1.0;
      for (int v : elig.per_rsu[static_cast<size_t>(b)]) {
        if (rsu_backlog(v) <= 0) continue;
        const double rate = snap.rb_bandwidth_hz *
                            std::log2(1.0 + sinr(snap, {TxRef::Rsu, b}, v, m));
        const double metric =
            rate / std::max(ewma_bps_[static_cast<size_t>(v)], 1.0);
        if (metric > best_metric) {
          best_metric = metric;
          best = v;
        }
      }
      d.set_rsu_owner(b, m, best);
    }
  }
  for (int s = 0; s < p.num_sls(); ++s) {
    for (int m = 0; m < snap.rbs_sl; ++m) {
      int best = -1;
      double best_metric = -1.0;
      for (int v : elig.per_sl[static_cast<size_t>(s)]) {
        if (queues.q_s[static_cast<size_t>(v)] <= 0) continue;
        const double rate = snap.rb_bandwidth_hz *
                            std::log2(1.0 + sinr(snap, {TxRef::Sl, s}, v, m));
        const double metric =
            rate / std::max(ewma_bps_[static_cast<size_t>(v)], 1.0);
        if (metric > best_metric) {
          best_metric = metric;
          best = v;
        }
      }
      d.set_sl_owner(s, m, best);
    }
  }

  // Smoothed served rate on the last hop toward each vehicle.
  for (int v = 0; v < p.num_vehicles; ++v) {
    double rate = 0.0;
    if (p.role[static_cast<size_t>(v)] == Role::Free) {
      const int s = p.leader_index(p.serving_sl[static_cast<size_t>(v)]);
      const auto held = d.held_rbs_sl(s, v);
      rate = link_rate(snap, {TxRef::Sl, s}, v, held);
    } else {
      const int b = p.serving_rsu[static_cast<size_t>(v)];
      const auto held = d.held_rbs_rsu(b, v);
      rate = link_rate(snap, {TxRef::Rsu, b}, v, held);
    }
    double& ew = ewma_bps_[static_cast<size_t>(v)];
    ew += pf_weight_ * (rate - ew);
  }

  out.ccp_iterations = 0;
  out.converged = true;
  return out;
}

// ---------------------------------------------------------------------------
// Backhaul feasibility (per slice leader)
// ---------------------------------------------------------------------------

BackhaulReport enforce_backhaul(SlotDecision& decision,
                                const ChannelSnapshot& snap,
                                const SlicePartition& partition,
                                const VideoCatalog& catalog,
                                const ScenarioConfig& cfg) {
  (void)cfg;
  BackhaulReport report;
  for (int s = 0; s < partition.num_sls(); ++s) {
    const int leader = partition.leaders[static_cast<size_t>(s)];
    const int b = partition.serving_rsu[static_cast<size_t>(leader)];
    const double own_req = required_rate_bps(
        catalog, decision.level[static_cast<size_t>(leader)]);

    auto backhaul_rate = [&]() {
      const auto held = decision.held_rbs_rsu(b, leader);
      return link_rate(snap, {TxRef::Rsu, b}, leader, held);
    };
    double r_bs = backhaul_rate();

    // When even the leader's own demand is uncovered, pull the strongest RBs
    // of its serving RSU toward the leader before touching the relays.
    if (r_bs < own_req) {
      std::vector<std::pair<double, int>> order;
      for (int m = 0; m < decision.rbs_rsu; ++m) {
        if (decision.rsu_owner_at(b, m) == leader) continue;
        const double rate = snap.rb_bandwidth_hz *
                            std::log2(1.0 + sinr(snap, {TxRef::Rsu, b}, leader, m));
        order.push_back({rate, m});
      }
      std::sort(order.begin(), order.end(), [](const auto& a, const auto& c) {
        if (a.first != c.first) return a.first > c.first;
        return a.second < c.second;
      });
      for (const auto& [rate, m] : order) {
        if (r_bs >= own_req) break;
        decision.set_rsu_owner(b, m, leader);
        ++report.repaired_rbs;
        r_bs = backhaul_rate();
      }
    }

    // Planned relay service toward the cluster.
    const auto& members = partition.members[static_cast<size_t>(s)];
    std::vector<double> relay(members.size(), 0.0);
    double relay_sum = 0.0;
    for (size_t k = 0; k < members.size(); ++k) {
      const auto held = decision.held_rbs_sl(s, members[k]);
      relay[k] = link_rate(snap, {TxRef::Sl, s}, members[k], held);
      relay_sum += relay[k];
    }

    double scale = 1.0;
    if (r_bs < own_req) {
      scale = 0.0;  // leader starved; it serves its own traffic only
      ++report.starved_sls;
    } else if (relay_sum > 0 && r_bs - relay_sum < own_req) {
      scale = (r_bs - own_req) / relay_sum;
      ++report.scaled_links;
    }

    decision.backhaul_bps[static_cast<size_t>(s)] = r_bs;
    decision.relay_scale[static_cast<size_t>(s)] = scale;
    for (size_t k = 0; k < members.size(); ++k)
      decision.relay_bps[static_cast<size_t>(members[k])] = scale * relay[k];
  }
  return report;
}

}  // namespace slicesim
