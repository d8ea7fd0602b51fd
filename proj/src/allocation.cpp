#include "iscc/allocation.hpp"

#include <stdexcept>

namespace iscc {

Allocation::Allocation(int num_subbands, int num_vehicles)
    : a_(Eigen::MatrixXi::Zero(num_subbands, num_vehicles)), band_(num_vehicles, -1) {}

Allocation Allocation::from_bands(std::span<const int> bands, int num_subbands) {
  Allocation a(num_subbands, static_cast<int>(bands.size()));
  for (std::size_t k = 0; k < bands.size(); ++k) {
    if (bands[k] >= 0) a.assign(static_cast<int>(k), bands[k]);
  }
  return a;
}

Allocation Allocation::from_matrix(const Eigen::MatrixXi& m) {
  Allocation a;
  a.a_ = m;
  a.band_.assign(m.cols(), -1);
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    for (Eigen::Index l = 0; l < m.rows(); ++l) {
      if (m(l, k) == 1) {
        a.band_[k] = static_cast<int>(l);
        break;
      }
    }
  }
  return a;
}

void Allocation::assign(int k, int l) {
  if (l < 0 || l >= num_subbands()) throw std::out_of_range("sub-band index out of range");
  a_.col(k).setZero();
  a_(l, k) = 1;
  band_[k] = l;
}

void Allocation::clear(int k) {
  a_.col(k).setZero();
  band_[k] = -1;
}

bool Allocation::valid() const {
  const bool binary = ((a_.array() == 0) || (a_.array() == 1)).all();
  return binary && (a_.colwise().sum().array() <= 1).all();
}

bool Allocation::complete() const {
  return valid() && (a_.colwise().sum().array() == 1).all();
}

}  // namespace iscc
