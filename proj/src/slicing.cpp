#include "slicesim/slicing.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace slicesim {

std::vector<int> weak_vehicle_set(const ChannelSnapshot& snap,
                                  const std::vector<VehicleState>& vehicles,
                                  double threshold_db) {
  std::vector<int> weak;
  for (const VehicleState& veh : vehicles) {
    const int v = veh.id;
    double best_mean = 0.0;
    for (int b = 0; b < snap.num_rsus; ++b) {
      double acc = 0.0;
      for (int m = 0; m < snap.rbs_rsu; ++m) acc += sinr(snap, {TxRef::Rsu, b}, v, m);
      best_mean = std::max(best_mean, acc / snap.rbs_rsu);
    }
    if (linear_to_db(best_mean) < threshold_db) weak.push_back(v);
  }
  std::sort(weak.begin(), weak.end());
  return weak;
}

SimilarityMatrix build_similarity(const std::vector<int>& ids,
                                  const std::vector<std::pair<double, double>>& xy,
                                  double highway_length_m, double sigma_nb,
                                  bool squared_kernel) {
  if (!(sigma_nb > 0)) throw std::invalid_argument("sigma_nb must be > 0");
  if (ids.empty()) throw std::invalid_argument("build_similarity: no positions");

  SimilarityMatrix sim;
  sim.n = static_cast<int>(ids.size());
  sim.ids = ids;
  sim.sigma_nb = sigma_nb;
  sim.w.assign(static_cast<size_t>(sim.n) * sim.n, 1.0);

  const double denom = 2.0 * sigma_nb * sigma_nb;
  for (int i = 0; i < sim.n; ++i) {
    for (int j = i + 1; j < sim.n; ++j) {
      const double d = ring_distance(xy[static_cast<size_t>(i)].first,
                                     xy[static_cast<size_t>(i)].second,
                                     xy[static_cast<size_t>(j)].first,
                                     xy[static_cast<size_t>(j)].second,
                                     highway_length_m);
      const double arg = squared_kernel ? d * d : d;
      const double s = std::exp(-arg / denom);
      sim.w[static_cast<size_t>(i) * sim.n + j] = s;
      sim.w[static_cast<size_t>(j) * sim.n + i] = s;
    }
  }
  return sim;
}

LaplacianSpectrum compute_spectrum(const SimilarityMatrix& sim) {
  const int n = sim.n;
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = sim.at(i, j);

  Eigen::MatrixXd lap = -w;
  for (int i = 0; i < n; ++i) lap(i, i) += w.row(i).sum();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) {
    const double residual = lap.norm();
    throw std::runtime_error("eigensolver failed to converge, residual norm " +
                             std::to_string(residual));
  }

  LaplacianSpectrum spec;
  spec.n = n;
  spec.eigenvalues.assign(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + n);
  spec.eigenvectors.assign(solver.eigenvectors().data(),
                           solver.eigenvectors().data() + static_cast<size_t>(n) * n);
  return spec;
}

namespace {

// Snap near-zero eigenvalues of near-disconnected Laplacians to exact zero.
double zero_threshold(const LaplacianSpectrum& s) {
  const double chi_max = s.eigenvalues.empty() ? 0.0 : s.eigenvalues.back();
  return 1e-9 * std::max(chi_max, 0.0);
}

}  // namespace

int choose_k(const LaplacianSpectrum& spectrum) {
  const int n = static_cast<int>(spectrum.eigenvalues.size());
  if (n < 2) throw std::invalid_argument("insufficient spectrum");

  const double tol = zero_threshold(spectrum);
  std::vector<double> ev = spectrum.eigenvalues;
  for (double& x : ev)
    if (std::fabs(x) <= tol) x = 0.0;

  int best_i = 1;
  double best_gap = ev[1] - ev[0];
  for (int i = 2; i < n; ++i) {
    const double gap = ev[static_cast<size_t>(i)] - ev[static_cast<size_t>(i) - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best_i = i;
    }
  }
  return best_i;
}

int zero_eigenvalue_count(const LaplacianSpectrum& spectrum) {
  const double tol = zero_threshold(spectrum);
  int count = 0;
  for (double x : spectrum.eigenvalues)
    if (std::fabs(x) <= tol) ++count;
  return count;
}

std::vector<int> kmeans_cluster(const std::vector<double>& points, int n,
                                int dim, int k, Rng& rng, int restarts) {
  if (k >= n) {
    std::vector<int> labels(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<size_t>(i)] = i;
    return labels;
  }
  const auto sqdist = [&](int i, const std::vector<double>& centers, int c) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = points[static_cast<size_t>(i) * dim + d] -
                          centers[static_cast<size_t>(c) * dim + d];
      acc += diff * diff;
    }
    return acc;
  };

  std::vector<int> best_labels;
  double best_wcss = std::numeric_limits<double>::infinity();

  for (int run = 0; run < restarts; ++run) {
    // k-means++ seeding
    std::vector<double> centers(static_cast<size_t>(k) * dim);
    std::vector<double> d2(static_cast<size_t>(n),
                           std::numeric_limits<double>::infinity());
    int first = rng.uniform_int(n);
    for (int d = 0; d < dim; ++d)
      centers[static_cast<size_t>(d)] = points[static_cast<size_t>(first) * dim + d];
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        d2[static_cast<size_t>(i)] =
            std::min(d2[static_cast<size_t>(i)], sqdist(i, centers, c - 1));
        total += d2[static_cast<size_t>(i)];
      }
      int pick = 0;
      if (total > 0) {
        double target = rng.uniform01() * total;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += d2[static_cast<size_t>(i)];
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.uniform_int(n);
      }
      for (int d = 0; d < dim; ++d)
        centers[static_cast<size_t>(c) * dim + d] =
            points[static_cast<size_t>(pick) * dim + d];
    }

    // Lloyd iterations until assignments stop changing.
    std::vector<int> labels(static_cast<size_t>(n), -1);
    for (int iter = 0; iter < 200; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int best_c = 0;
        double best_d = sqdist(i, centers, 0);
        for (int c = 1; c < k; ++c) {
          const double d = sqdist(i, centers, c);
          if (d < best_d) {
            best_d = d;
            best_c = c;
          }
        }
        if (labels[static_cast<size_t>(i)] != best_c) {
          labels[static_cast<size_t>(i)] = best_c;
          changed = true;
        }
      }
      if (!changed) break;

      std::vector<double> sums(static_cast<size_t>(k) * dim, 0.0);
      std::vector<int> counts(static_cast<size_t>(k), 0);
      for (int i = 0; i < n; ++i) {
        const int c = labels[static_cast<size_t>(i)];
        ++counts[static_cast<size_t>(c)];
        for (int d = 0; d < dim; ++d)
          sums[static_cast<size_t>(c) * dim + d] +=
              points[static_cast<size_t>(i) * dim + d];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<size_t>(c)] == 0) {
          // Reseed an empty cluster at the point farthest from its center.
          int far = 0;
          double far_d = -1.0;
          for (int i = 0; i < n; ++i) {
            const double d = sqdist(i, centers, labels[static_cast<size_t>(i)]);
            if (d > far_d) {
              far_d = d;
              far = i;
            }
          }
          for (int d = 0; d < dim; ++d)
            centers[static_cast<size_t>(c) * dim + d] =
                points[static_cast<size_t>(far) * dim + d];
        } else {
          for (int d = 0; d < dim; ++d)
            centers[static_cast<size_t>(c) * dim + d] =
                sums[static_cast<size_t>(c) * dim + d] / counts[static_cast<size_t>(c)];
        }
      }
    }

    double wcss = 0.0;
    for (int i = 0; i < n; ++i) wcss += sqdist(i, centers, labels[static_cast<size_t>(i)]);
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_labels = labels;
    }
  }
  return best_labels;
}

std::vector<std::vector<int>> spectral_cluster(const SimilarityMatrix& sim,
                                               Rng& rng, int restarts) {
  const int n = sim.n;
  if (n == 1) return {{sim.ids[0]}};

  const LaplacianSpectrum spec = compute_spectrum(sim);
  // The eigengap cannot express "every node its own component"; floor k at
  // the component count so fully disconnected candidate sets split apart.
  const int k = std::min(n, std::max(choose_k(spec), zero_eigenvalue_count(spec)));

  // Rows of the first-k eigenvector matrix embed the candidates.
  std::vector<double> points(static_cast<size_t>(n) * k);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c)
      points[static_cast<size_t>(i) * k + c] = spec.vec(i, c);

  const std::vector<int> labels =
      kmeans_cluster(points, n, /*dim=*/k, k, rng, restarts);

  std::vector<std::vector<int>> by_label(static_cast<size_t>(k));
  for (int i = 0; i < n; ++i)
    by_label[static_cast<size_t>(labels[static_cast<size_t>(i)])].push_back(
        sim.ids[static_cast<size_t>(i)]);

  std::vector<std::vector<int>> clusters;
  for (auto& c : by_label) {
    if (c.empty()) continue;
    std::sort(c.begin(), c.end());
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

namespace {

// Cluster centroid; x uses the circular mean so clusters straddling the ring
// seam do not average to the far side of the highway.
std::pair<double, double> cluster_centroid(const std::vector<int>& cluster,
                                           const std::vector<VehicleState>& vehicles,
                                           double length) {
  double sx = 0, sy = 0, ss = 0, sc = 0;
  for (int v : cluster) {
    const VehicleState& veh = vehicles[static_cast<size_t>(v)];
    sx += veh.x;
    sy += veh.y;
    if (length > 0) {
      const double th = 2.0 * M_PI * veh.x / length;
      ss += std::sin(th);
      sc += std::cos(th);
    }
  }
  const double n = static_cast<double>(cluster.size());
  double cx = sx / n;
  if (length > 0 && std::hypot(ss, sc) > 1e-12) {
    double th = std::atan2(ss / n, sc / n);
    if (th < 0) th += 2.0 * M_PI;
    cx = th * length / (2.0 * M_PI);
  }
  return {cx, sy / n};
}

}  // namespace

LeaderElection elect_leaders(const std::vector<std::vector<int>>& clusters,
                             const std::vector<VehicleState>& vehicles,
                             double highway_length_m) {
  LeaderElection out;
  out.leader.assign(clusters.size(), -1);
  if (clusters.empty()) return out;

  std::vector<bool> is_free(vehicles.size(), false);
  for (const auto& c : clusters)
    for (int v : c) is_free[static_cast<size_t>(v)] = true;

  struct Cand {
    double dist;
    int cluster;
    int vehicle;
  };
  std::vector<Cand> cands;
  for (size_t i = 0; i < clusters.size(); ++i) {
    const auto [cx, cy] =
        cluster_centroid(clusters[i], vehicles, highway_length_m);
    for (const VehicleState& veh : vehicles) {
      if (is_free[static_cast<size_t>(veh.id)]) continue;
      cands.push_back({ring_distance(cx, cy, veh.x, veh.y, highway_length_m),
                       static_cast<int>(i), veh.id});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.cluster != b.cluster) return a.cluster < b.cluster;
    return a.vehicle < b.vehicle;
  });

  std::vector<bool> taken(vehicles.size(), false);
  size_t assigned = 0;
  for (const Cand& c : cands) {
    if (assigned == clusters.size()) break;
    if (out.leader[static_cast<size_t>(c.cluster)] >= 0 ||
        taken[static_cast<size_t>(c.vehicle)])
      continue;
    out.leader[static_cast<size_t>(c.cluster)] = c.vehicle;
    taken[static_cast<size_t>(c.vehicle)] = true;
    ++assigned;
  }
  for (size_t i = 0; i < clusters.size(); ++i)
    if (out.leader[i] < 0) out.dissolved.push_back(static_cast<int>(i));
  return out;
}

SlicePartition make_partition(const std::vector<std::vector<int>>& clusters,
                              const LeaderElection& election,
                              const std::vector<VehicleState>& vehicles,
                              const std::vector<RsuSite>& rsus,
                              double highway_length_m) {
  const int n = static_cast<int>(vehicles.size());
  SlicePartition p;
  p.num_vehicles = n;
  p.role.assign(static_cast<size_t>(n), Role::Compelled);
  p.serving_rsu.assign(static_cast<size_t>(n), -1);
  p.serving_sl.assign(static_cast<size_t>(n), -1);

  struct LeaderGroup {
    int leader;
    std::vector<int> members;
  };
  std::vector<LeaderGroup> groups;
  for (size_t i = 0; i < clusters.size(); ++i) {
    if (election.leader[i] < 0) continue;  // dissolved: members stay compelled
    groups.push_back({election.leader[i], clusters[i]});
  }
  std::sort(groups.begin(), groups.end(),
            [](const LeaderGroup& a, const LeaderGroup& b) { return a.leader < b.leader; });

  for (const LeaderGroup& g : groups) {
    p.leaders.push_back(g.leader);
    p.members.push_back(g.members);
    p.role[static_cast<size_t>(g.leader)] = Role::SliceLeader;
    for (int v : g.members) {
      p.role[static_cast<size_t>(v)] = Role::Free;
      p.serving_sl[static_cast<size_t>(v)] = g.leader;
    }
  }

  for (const VehicleState& veh : vehicles) {
    if (p.role[static_cast<size_t>(veh.id)] == Role::Free) continue;
    p.serving_rsu[static_cast<size_t>(veh.id)] =
        nearest_rsu(rsus, veh.x, veh.y, highway_length_m);
  }
  // Free vehicles queue at the RSU behind their slice leader.
  for (size_t i = 0; i < p.leaders.size(); ++i) {
    const int b = p.serving_rsu[static_cast<size_t>(p.leaders[i])];
    for (int v : p.members[i]) p.serving_rsu[static_cast<size_t>(v)] = b;
  }
  return p;
}

}  // namespace slicesim
