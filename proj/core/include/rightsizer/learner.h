#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rightsizer {

// Raw (unnormalized) feature values in schema order.
using FeatureVector = std::vector<double>;

// Per-class costs for one observation. Class ids are 1-based; costs[c - 1]
// holds the cost of class c. The target class carries the unique minimum 1.0.
struct CostVector {
  int target = 1;
  std::vector<double> costs;

  double cost(int cls) const { return costs[static_cast<size_t>(cls - 1)]; }
  int num_classes() const { return static_cast<int>(costs.size()); }
};

// Linear cost schedule around `target`: 1 + alpha_over * d above the target
// and 1 + alpha_under * d below it, d being the class distance.
CostVector MakeLinearCostVector(int num_classes, int target, double alpha_over,
                                double alpha_under);

// Cost-sensitive one-vs-all classifier. Each class owns a linear regressor
// that estimates the cost of choosing that class; prediction is the argmin.
//
// Inputs are scaled per dimension by the largest magnitude seen so far, so
// features measured in bytes and in counts train at the same rate. A bias
// term of 1 is appended after scaling.
class CsoaaModel {
 public:
  static constexpr double kDefaultLearningRate = 0.1;

  // Throws std::invalid_argument for num_classes < 2, dim < 1 or a
  // non-positive learning rate.
  CsoaaModel(int num_classes, int dim,
             double learning_rate = kDefaultLearningRate);

  // Returns the 1-based class with the lowest estimated cost. Ties go to the
  // lowest class id. Observing `x` may raise the running maxima.
  int Predict(std::span<const double> x);

  // One squared-loss SGD step per class toward `costs`.
  void Update(std::span<const double> x, const CostVector& costs);

  // Estimated cost of `cls` for an already normalized, bias-augmented input.
  double EstimateCost(int cls, std::span<const double> augmented) const;

  // Scales `x` by the current running maxima (without updating them) and
  // appends the bias term.
  std::vector<double> Augment(std::span<const double> x) const;

  int num_classes() const { return num_classes_; }
  int dim() const { return dim_; }
  double learning_rate() const { return learning_rate_; }
  uint64_t updates_seen() const { return updates_seen_; }

  std::span<const double> weights(int cls) const;
  std::span<double> mutable_weights(int cls);
  std::span<const double> running_max() const { return running_max_; }

 private:
  void CheckInput(std::span<const double> x) const;
  void Observe(std::span<const double> x);

  int num_classes_;
  int dim_;
  double learning_rate_;
  uint64_t updates_seen_ = 0;
  // num_classes_ rows of dim_ + 1 weights, bias last.
  std::vector<double> weights_;
  std::vector<double> running_max_;
};

}  // namespace rightsizer
