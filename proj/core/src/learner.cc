#include "rightsizer/learner.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rightsizer {

CostVector MakeLinearCostVector(int num_classes, int target, double alpha_over,
                                double alpha_under) {
  if (target < 1 || target > num_classes) {
    throw std::invalid_argument("cost target " + std::to_string(target) +
                                " outside [1, " + std::to_string(num_classes) +
                                "]");
  }
  CostVector cv;
  cv.target = target;
  cv.costs.resize(static_cast<size_t>(num_classes));
  for (int c = 1; c <= num_classes; ++c) {
    double d = std::abs(c - target);
    cv.costs[static_cast<size_t>(c - 1)] =
        1.0 + (c > target ? alpha_over : alpha_under) * d;
  }
  return cv;
}

CsoaaModel::CsoaaModel(int num_classes, int dim, double learning_rate)
    : num_classes_(num_classes), dim_(dim), learning_rate_(learning_rate) {
  if (num_classes < 2) {
    throw std::invalid_argument("CsoaaModel needs at least two classes");
  }
  if (dim < 1) throw std::invalid_argument("CsoaaModel needs dim >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be finite and >= 0");
  }
  weights_.assign(static_cast<size_t>(num_classes) * (dim + 1), 0.0);
  running_max_.assign(static_cast<size_t>(dim), 0.0);
}

void CsoaaModel::CheckInput(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw std::invalid_argument("feature dimension " +
                                std::to_string(x.size()) + " != model dim " +
                                std::to_string(dim_));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature");
  }
}

void CsoaaModel::Observe(std::span<const double> x) {
  for (int i = 0; i < dim_; ++i) {
    running_max_[i] = std::max(running_max_[i], std::abs(x[i]));
  }
}

std::vector<double> CsoaaModel::Augment(std::span<const double> x) const {
  std::vector<double> out(static_cast<size_t>(dim_) + 1);
  for (int i = 0; i < dim_; ++i) {
    out[i] = running_max_[i] > 0.0 ? x[i] / running_max_[i] : 0.0;
  }
  out[dim_] = 1.0;
  return out;
}

std::span<const double> CsoaaModel::weights(int cls) const {
  return std::span<const double>(weights_).subspan(
      static_cast<size_t>(cls - 1) * (dim_ + 1), dim_ + 1);
}

std::span<double> CsoaaModel::mutable_weights(int cls) {
  return std::span<double>(weights_).subspan(
      static_cast<size_t>(cls - 1) * (dim_ + 1), dim_ + 1);
}

double CsoaaModel::EstimateCost(int cls,
                                std::span<const double> augmented) const {
  auto w = weights(cls);
  double sum = 0.0;
  for (size_t i = 0; i < w.size(); ++i) sum += w[i] * augmented[i];
  return sum;
}

int CsoaaModel::Predict(std::span<const double> x) {
  CheckInput(x);
  Observe(x);
  auto xa = Augment(x);
  int best = 1;
  double best_cost = EstimateCost(1, xa);
  for (int c = 2; c <= num_classes_; ++c) {
    double cost = EstimateCost(c, xa);
    // Strict comparison keeps the lowest class on ties.
    if (cost < best_cost) {
      best = c;
      best_cost = cost;
    }
  }
  return best;
}

void CsoaaModel::Update(std::span<const double> x, const CostVector& costs) {
  CheckInput(x);
  if (costs.num_classes() != num_classes_) {
    throw std::invalid_argument("cost vector has " +
                                std::to_string(costs.num_classes()) +
                                " classes, model has " +
                                std::to_string(num_classes_));
  }
  for (double c : costs.costs) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite cost");
  }
  Observe(x);
  auto xa = Augment(x);
  for (int c = 1; c <= num_classes_; ++c) {
    double residual = EstimateCost(c, xa) - costs.cost(c);
    auto w = mutable_weights(c);
    for (size_t i = 0; i < w.size(); ++i) {
      w[i] -= learning_rate_ * residual * xa[i];
    }
  }
  ++updates_seen_;
}

}  // namespace rightsizer
