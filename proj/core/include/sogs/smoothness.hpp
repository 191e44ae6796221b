#pragma once

#include <cstddef>

#include "sogs/attributes.hpp"
#include "sogs/grid.hpp"

namespace sogs {

struct SmoothnessParams {
  std::size_t kernel_size = 5;  // odd
  double sigma = 3.0;
  double lambda = 1.0;
  AttributeWeights weights{0.0, 0.0, 0.0, 0.09, 0.0, 0.91};
  double huber_delta = 1.0;
  // Treat the blurred grid as a constant: the gradient skips the blur branch.
  bool detach_target = false;

  void validate() const;
};

double huber(double x, double delta) noexcept;
double huber_derivative(double x, double delta) noexcept;

struct SmoothnessLoss {
  double loss = 0.0;
  BasicGridStack<double> gradient;  // same shape as the input stack
};

// loss = lambda * sum_a weight_a * mean(huber(plane_a - blur(plane_a)))
// with the mean taken over every cell and channel of the plane, plus its
// exact gradient with respect to the plane values.
SmoothnessLoss smoothness_loss(const BasicGridStack<double>& stack,
                               const SmoothnessParams& params);

}  // namespace sogs
