#include "iscc/subband_greedy.hpp"

#include <stdexcept>
#include <vector>

namespace iscc {

Eigen::MatrixXd interference_matrix(const Eigen::VectorXd& powers, const ChannelSet& channels) {
  const int K = channels.num_vehicles();
  const int L = channels.num_subbands();
  Eigen::MatrixXd gain = Eigen::MatrixXd::Zero(K, K);
  for (int l = 0; l < L; ++l) gain += channels.cross(l).cwiseAbs2();
  gain /= static_cast<double>(L);
  gain.diagonal().setZero();
  return powers.asDiagonal() * gain;
}

Allocation greedy_allocate(const Eigen::MatrixXd& metric, int num_subbands) {
  const int K = static_cast<int>(metric.rows());
  const int L = num_subbands;
  if (L < 1 || L > K) throw std::invalid_argument("greedy allocation needs 1 <= L <= K");

  Allocation alloc(L, K);
  if (L == 1) {
    for (int k = 0; k < K; ++k) alloc.assign(k, 0);
    return alloc;
  }

  const Eigen::MatrixXd mutual = metric + metric.transpose();

  // Seed pair with the strongest mutual interference.
  int seed_i = 0, seed_j = 1;
  double best = -1.0;
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      if (mutual(i, j) > best) {
        best = mutual(i, j);
        seed_i = i;
        seed_j = j;
      }
    }
  }
  std::vector<int> selected = {seed_i, seed_j};
  alloc.assign(seed_i, 0);
  alloc.assign(seed_j, 1);

  // Grow the orthogonal set until every sub-band has one vehicle.
  while (static_cast<int>(selected.size()) < L) {
    int pick = -1;
    double pick_score = -1.0;
    for (int k = 0; k < K; ++k) {
      if (alloc.band(k) >= 0) continue;
      double score = 0.0;
      for (int j : selected) score += mutual(k, j);
      if (score > pick_score) {
        pick_score = score;
        pick = k;
      }
    }
    alloc.assign(pick, static_cast<int>(selected.size()));
    selected.push_back(pick);
  }

  // Remaining vehicles, most constrained first.
  std::vector<double> load(L);
  for (int placed = L; placed < K; ++placed) {
    int pick = -1;
    int pick_band = 0;
    double pick_score = -1.0;
    for (int k = 0; k < K; ++k) {
      if (alloc.band(k) >= 0) continue;
      std::fill(load.begin(), load.end(), 0.0);
      for (int j = 0; j < K; ++j) {
        if (alloc.band(j) >= 0) load[alloc.band(j)] += metric(k, j);
      }
      double total = 0.0;
      int argmin = 0;
      for (int l = 0; l < L; ++l) {
        total += load[l];
        if (load[l] < load[argmin]) argmin = l;
      }
      const double score = (total - load[argmin]) / (L - 1);
      if (score > pick_score) {
        pick_score = score;
        pick = k;
        pick_band = argmin;
      }
    }
    alloc.assign(pick, pick_band);
  }
  return alloc;
}

}  // namespace iscc
