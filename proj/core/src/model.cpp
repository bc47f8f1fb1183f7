#include "tinlinq/model.hpp"

#include "tinlinq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tinlinq {

UserSet all_users(int k) {
  UserSet users(static_cast<std::size_t>(std::max(k, 0)));
  std::iota(users.begin(), users.end(), 0);
  return users;
}

void validate_subset(int k, const UserSet& subset) {
  for (std::size_t n = 0; n < subset.size(); ++n) {
    const int u = subset[n];
    if (u < 0 || u >= k) {
      throw Error(ErrorCode::IndexError,
                  "user index " + std::to_string(u) + " outside [0, " + std::to_string(k) + ")");
    }
    if (n > 0 && subset[n - 1] >= u) {
      throw Error(ErrorCode::IndexError, "user subset must be sorted and duplicate-free");
    }
  }
}

UserSet subset_from_mask(const UserSet& universe, unsigned long long mask) {
  UserSet out;
  for (std::size_t b = 0; b < universe.size(); ++b) {
    if (mask & (1ULL << b)) out.push_back(universe[b]);
  }
  return out;
}

ChannelMatrix::ChannelMatrix(Eigen::MatrixXd alpha) : alpha_(std::move(alpha)) {
  if (alpha_.rows() < 1 || alpha_.rows() != alpha_.cols()) {
    throw Error(ErrorCode::ShapeError, "channel matrix must be square with K >= 1");
  }
  for (Eigen::Index i = 0; i < alpha_.rows(); ++i) {
    for (Eigen::Index j = 0; j < alpha_.cols(); ++j) {
      const double a = alpha_(i, j);
      if (!std::isfinite(a) || a < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "channel strengths must be finite and >= 0");
      }
    }
  }
}

ChannelMatrix ChannelMatrix::restrict_to(const UserSet& subset) const {
  validate_subset(size(), subset);
  const auto n = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) sub(a, b) = alpha_(subset[a], subset[b]);
  }
  return ChannelMatrix(std::move(sub));
}

UserSet GdofTuple::support(double tol) const {
  UserSet out;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (d(k) > tol) out.push_back(static_cast<int>(k));
  }
  return out;
}

void PhysicalNetwork::validate() const {
  const auto k = gains.rows();
  if (k < 1 || gains.cols() != k || max_tx_power.size() != k) {
    throw Error(ErrorCode::ShapeError, "physical network dimensions are inconsistent");
  }
  if (!(reference_power > 1.0) || !std::isfinite(reference_power)) {
    throw Error(ErrorCode::InvalidReferencePower, "reference power P must exceed 1");
  }
  if (!(noise_power > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise power must be positive");
  }
  if ((gains.array() < 0.0).any() || !gains.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "channel gains must be finite and >= 0");
  }
  if ((max_tx_power.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "transmit power caps must be positive");
  }
}

Eigen::MatrixXd PhysicalNetwork::normalized_gains() const {
  Eigen::MatrixXd g = gains;
  for (Eigen::Index i = 0; i < g.rows(); ++i) g.row(i) *= max_tx_power(i) / noise_power;
  return g;
}

PhysicalNetwork realize(const ChannelMatrix& alpha, double reference_power) {
  if (!(reference_power > 1.0)) {
    throw Error(ErrorCode::InvalidReferencePower, "reference power P must exceed 1");
  }
  PhysicalNetwork net;
  const int k = alpha.size();
  net.gains.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) net.gains(i, j) = std::pow(reference_power, alpha(i, j));
  }
  net.max_tx_power = Eigen::VectorXd::Ones(k);
  net.noise_power = 1.0;
  net.reference_power = reference_power;
  return net;
}

ChannelMatrix strength_from_physical(const PhysicalNetwork& net) {
  net.validate();
  const double log_p = std::log(net.reference_power);
  Eigen::MatrixXd a = net.normalized_gains();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = std::log(std::max(1.0, a(i, j))) / log_p;
  }
  return ChannelMatrix(std::move(a));
}

GdofTuple achieved_gdof(const ChannelMatrix& alpha, const PowerAlloc& r, bool clamp) {
  const int k = alpha.size();
  if (r.size() != k) throw Error(ErrorCode::ShapeError, "power allocation length differs from K");
  GdofTuple out{Eigen::VectorXd(k)};
  for (int j = 0; j < k; ++j) {
    double interference = 0.0;
    for (int i = 0; i < k; ++i) {
      if (i != j) interference = std::max(interference, alpha(i, j) + r[i]);
    }
    double d = alpha(j, j) + r[j] - interference;
    if (clamp) d = std::max(0.0, d);
    out.d(j) = d;
  }
  return out;
}

Eigen::VectorXd sinr(const PhysicalNetwork& net, const PowerAlloc& r) {
  net.validate();
  const int k = net.size();
  if (r.size() != k) throw Error(ErrorCode::ShapeError, "power allocation length differs from K");
  const Eigen::MatrixXd g = net.normalized_gains();
  Eigen::VectorXd p(k);
  for (int i = 0; i < k; ++i) p(i) = std::isinf(r[i]) && r[i] < 0 ? 0.0 : std::pow(net.reference_power, r[i]);
  Eigen::VectorXd out(k);
  for (int j = 0; j < k; ++j) {
    double noise_plus_interference = 1.0;
    for (int i = 0; i < k; ++i) {
      if (i != j) noise_plus_interference += g(i, j) * p(i);
    }
    out(j) = g(j, j) * p(j) / noise_plus_interference;
  }
  return out;
}

}  // namespace tinlinq
