#pragma once

#include <vector>

#include "slicesim/channel.hpp"
#include "slicesim/mobility.hpp"
#include "slicesim/model.hpp"

namespace slicesim {

// Gaussian similarity over vehicle positions, entries in (0, 1]. The kernel
// uses the plain Euclidean distance in the exponent by default; the squared
// form is available behind ScenarioConfig::squared_kernel.
struct SimilarityMatrix {
  int n = 0;
  std::vector<int> ids;      // candidate vehicle ids, ascending
  std::vector<double> w;     // row-major n*n, symmetric, unit diagonal
  double sigma_nb = 0;

  double at(int i, int j) const { return w[static_cast<size_t>(i) * n + j]; }
};

struct LaplacianSpectrum {
  std::vector<double> eigenvalues;        // ascending
  std::vector<double> eigenvectors;       // column-major n*n, aligned with eigenvalues
  int n = 0;
  double vec(int row, int col) const {
    return eigenvectors[static_cast<size_t>(col) * n + row];
  }
};

// Vehicles whose best V2I wideband SINR (linear mean over the RSU pool RBs,
// best across RSUs) falls below the threshold; these seed the clustering.
std::vector<int> weak_vehicle_set(const ChannelSnapshot& snap,
                                  const std::vector<VehicleState>& vehicles,
                                  double threshold_db);

// Similarity per the Gaussian kernel over pairwise distances; highway_length
// of 0 disables the ring wrap in x.
SimilarityMatrix build_similarity(const std::vector<int>& ids,
                                  const std::vector<std::pair<double, double>>& xy,
                                  double highway_length_m, double sigma_nb,
                                  bool squared_kernel);

// Unnormalized Laplacian spectrum L = D - W (ascending eigenvalues).
LaplacianSpectrum compute_spectrum(const SimilarityMatrix& sim);

// Eigengap rule: the 1-based index i maximizing chi_{i+1} - chi_i, ties
// broken toward the smallest i. Requires n >= 2.
int choose_k(const LaplacianSpectrum& spectrum);

// Eigenvalues below 1e-9 * chi_max count as zero (one per graph component).
int zero_eigenvalue_count(const LaplacianSpectrum& spectrum);

// Spectral clustering of the candidate set: k from the eigengap (floored at
// the component count), k-means++ over the first k eigenvector rows.
// Returns a partition of sim.ids; clusters ordered by smallest member id.
std::vector<std::vector<int>> spectral_cluster(const SimilarityMatrix& sim,
                                               Rng& rng, int restarts = 50);

// Leader election result: per-cluster leader (aligned with `clusters`) and
// the clusters dissolved for lack of candidates.
struct LeaderElection {
  std::vector<int> leader;          // per cluster, -1 when dissolved
  std::vector<int> dissolved;       // cluster indices without a leader
};

// Nearest non-free vehicle to each cluster centroid, one cluster per leader;
// collisions resolved greedily in ascending distance order.
LeaderElection elect_leaders(const std::vector<std::vector<int>>& clusters,
                             const std::vector<VehicleState>& vehicles,
                             double highway_length_m);

// Assembles the partition: S from the election, F keyed by leader, C the
// rest (including dissolved clusters); serving RSU by nearest site.
SlicePartition make_partition(const std::vector<std::vector<int>>& clusters,
                              const LeaderElection& election,
                              const std::vector<VehicleState>& vehicles,
                              const std::vector<RsuSite>& rsus,
                              double highway_length_m);

// K-means over n points in R^dim (row-major) with k-means++ seeding; labels
// out, best of `restarts` runs by within-cluster sum of squares.
std::vector<int> kmeans_cluster(const std::vector<double>& points, int n,
                                int dim, int k, Rng& rng, int restarts);

}  // namespace slicesim
