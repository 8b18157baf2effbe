#include "spc/rounding.hpp"

#include <algorithm>
#include <cmath>

namespace spc {

KtRounder::KtRounder(const MatrixXd& x)
    : num_labels_(static_cast<int>(x.rows())), num_elements_(static_cast<int>(x.cols())) {
  if (num_labels_ == 0 && num_elements_ > 0) throw InputError("rounding needs at least one label");
  phase_cap_ = 64LL * std::max(num_elements_, 1) * std::max(num_labels_, 1);
  MatrixXd m = x.cwiseMax(0.0).cwiseMin(1.0);
  for (int v = 0; v < num_elements_; ++v) {
    const double sum = m.col(v).sum();
    if (!(sum > 0.0)) throw InputError("element " + std::to_string(v) + " has no fractional mass");
    m.col(v) /= sum;
  }
  by_label_.resize(num_labels_);
  for (int l = 0; l < num_labels_; ++l) {
    auto& list = by_label_[l];
    for (int v = 0; v < num_elements_; ++v)
      if (m(l, v) > 0.0) list.emplace_back(m(l, v), v);
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
  }
}

std::vector<int> KtRounder::draw(CounterRng& rng) const {
  std::vector<int> label(num_elements_, -1);
  int remaining = num_elements_;
  for (std::int64_t phase = 0; remaining > 0; ++phase) {
    if (phase >= phase_cap_) throw RoundingError("rounding exceeded its phase cap of " + std::to_string(phase_cap_));
    const int l = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_labels_)));
    const double alpha = rng.uniform_open_closed();
    for (const auto& [mass, v] : by_label_[l]) {
      if (mass < alpha) break;
      if (label[v] < 0) {
        label[v] = l;
        --remaining;
      }
    }
  }
  return label;
}

void validate_rounding_input(const MatrixXd& x, std::span<const PointPair> pairs, const MatrixXd& z_pair,
                             const VectorXd& z, double tolerance) {
  const auto nl = x.rows();
  const auto nv = x.cols();
  const auto ne = static_cast<Eigen::Index>(pairs.size());
  if (nl == 0 && nv > 0) throw InputError("rounding needs at least one label");
  if (z_pair.rows() != ne || z_pair.cols() != nl || z.size() != ne)
    throw InputError("rounding input: z has the wrong shape");
  auto in_unit = [&](double v) { return v >= -tolerance && v <= 1.0 + tolerance; };
  for (Eigen::Index v = 0; v < nv; ++v) {
    if (std::abs(x.col(v).sum() - 1.0) > tolerance)
      throw InputError("rounding input: column " + std::to_string(v) + " of x does not sum to 1");
    for (Eigen::Index l = 0; l < nl; ++l)
      if (!in_unit(x(l, v))) throw InputError("rounding input: x outside [0, 1]");
  }
  for (Eigen::Index e = 0; e < ne; ++e) {
    const auto [a, b] = pairs[static_cast<std::size_t>(e)];
    if (a < 0 || b >= nv || a == b) throw InputError("rounding input: pair " + std::to_string(e) + " out of range");
    for (Eigen::Index l = 0; l < nl; ++l) {
      if (!in_unit(z_pair(e, l))) throw InputError("rounding input: z(e, l) outside [0, 1]");
      if (z_pair(e, l) < std::abs(x(l, a) - x(l, b)) - tolerance)
        throw InputError("rounding input: z(e, l) below |x(l, v) - x(l, w)| for pair " + std::to_string(e));
    }
    if (!in_unit(z(e)) || std::abs(z(e) - 0.5 * z_pair.row(e).sum()) > tolerance)
      throw InputError("rounding input: z(e) is not half the sum of z(e, l) for pair " + std::to_string(e));
  }
}

IntegralAssignment kt_round(const MatrixXd& x, std::span<const PointPair> pairs, const MatrixXd& z_pair,
                            const VectorXd& z, CounterRng& rng) {
  validate_rounding_input(x, pairs, z_pair, z);
  IntegralAssignment out;
  out.assignment = KtRounder(x).draw(rng);
  return out;
}

IntegralAssignment sample_assignment(const AssignmentDistribution& dist, std::uint64_t draw_index) {
  CounterRng rng(dist.master_seed(), draw_index);
  IntegralAssignment out;
  out.assignment = dist.rounder().draw(rng);
  for (int& l : out.assignment) l = dist.open_set()[l];
  out.seed_trace = dist.master_seed();
  out.draw_index = draw_index;
  return out;
}

AssignmentDistribution::AssignmentDistribution(std::vector<LocationId> open_set, FractionalAssignment fractional,
                                               std::uint64_t master_seed, GuaranteeRecord guarantee)
    : open_set_(std::move(open_set)),
      fractional_(std::move(fractional)),
      master_seed_(master_seed),
      guarantee_(std::move(guarantee)) {
  if (static_cast<Eigen::Index>(open_set_.size()) != fractional_.x.rows())
    throw InputError("distribution: open set size does not match the fractional assignment");
  rounder_ = std::make_shared<const KtRounder>(fractional_.x);
}

}  // namespace spc
