#include "sogs/smoothness.hpp"

#include <cmath>

#include "sogs/blur.hpp"
#include "sogs/error.hpp"

namespace sogs {

void SmoothnessParams::validate() const {
  if (kernel_size == 0 || kernel_size % 2 == 0) {
    throw Error(ErrorCode::kInvalidInput, "smoothness kernel size must be odd");
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidInput, "sigma must be > 0");
  if (!(huber_delta > 0.0)) throw Error(ErrorCode::kInvalidInput, "huber delta must be > 0");
  for (Attribute a : kAllAttributes) {
    if (!(weights[a] >= 0.0)) {
      throw Error(ErrorCode::kInvalidInput, "smoothness weights must be >= 0");
    }
  }
}

double huber(double x, double delta) noexcept {
  const double ax = std::abs(x);
  return ax <= delta ? 0.5 * x * x : delta * (ax - 0.5 * delta);
}

double huber_derivative(double x, double delta) noexcept {
  if (x > delta) return delta;
  if (x < -delta) return -delta;
  return x;
}

SmoothnessLoss smoothness_loss(const BasicGridStack<double>& stack,
                               const SmoothnessParams& params) {
  params.validate();
  const std::size_t side = stack.layout.side;
  const std::size_t half = params.kernel_size / 2;

  SmoothnessLoss out;
  out.gradient.layout = stack.layout;
  out.gradient.sh_rest_channels = stack.sh_rest_channels;

  for (Attribute a : kAllAttributes) {
    const std::size_t ch = stack.channels(a);
    const auto& plane = stack.planes[a];
    out.gradient.planes[a].assign(plane.size(), 0.0);
    if (ch == 0 || plane.empty()) continue;
    if (plane.size() != side * side * ch) {
      throw Error(ErrorCode::kInvalidInput,
                  "plane " + std::string(attribute_name(a)) + " has the wrong size");
    }
    const double w = params.weights[a];
    if (w == 0.0 || params.lambda == 0.0) continue;

    Grid<double> x(side, ch);
    x.values = plane;
    const Grid<double> blurred = gaussian_blur(x, half, params.sigma);
    const double norm = w / static_cast<double>(plane.size());

    // d loss / d residual, scaled into the loss units.
    Grid<double> dr(side, ch);
    double sum = 0.0;
    for (std::size_t i = 0; i < plane.size(); ++i) {
      const double r = x.values[i] - blurred.values[i];
      sum += huber(r, params.huber_delta);
      dr.values[i] = norm * huber_derivative(r, params.huber_delta);
    }
    out.loss += norm * sum;

    auto& g = out.gradient.planes[a];
    g = dr.values;
    if (!params.detach_target) {
      // residual = (I - B) x, so the gradient is (I - B)^T dr.
      const Grid<double> back = gaussian_blur_transpose(dr, half, params.sigma);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= back.values[i];
    }
  }
  // lambda is applied last so that scaling it scales the results exactly.
  out.loss *= params.lambda;
  for (Attribute a : kAllAttributes) {
    for (double& v : out.gradient.planes[a]) v *= params.lambda;
  }
  return out;
}

}  // namespace sogs
