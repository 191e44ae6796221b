#include "sogs/blur.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "sogs/error.hpp"

namespace sogs {
namespace {

// out row i = sum_j w(i, j) * in row j over |i - j| <= half_width, where
// w(i, j) = k[|i - j|] / z[i] for the blur and k[|i - j|] / z[j] for its
// adjoint. z[i] is the kernel mass inside the grid around row i.
template <class T>
void row_pass(const T* in, T* out, std::size_t rows, std::size_t row_len,
              const std::vector<double>& k, bool adjoint) {
  const auto h = static_cast<std::ptrdiff_t>(k.size()) - 1;
  const auto n = static_cast<std::ptrdiff_t>(rows);
  std::vector<double> z(rows);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - h);
         j <= std::min(n - 1, i + h); ++j) {
      s += k[static_cast<std::size_t>(std::abs(i - j))];
    }
    z[static_cast<std::size_t>(i)] = s;
  }

  tbb::parallel_for(
      tbb::blocked_range<std::ptrdiff_t>(0, n),
      [&](const tbb::blocked_range<std::ptrdiff_t>& range) {
        for (std::ptrdiff_t i = range.begin(); i != range.end(); ++i) {
          T* dst = out + static_cast<std::size_t>(i) * row_len;
          std::fill(dst, dst + row_len, T{0});
          for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - h);
               j <= std::min(n - 1, i + h); ++j) {
            const double kij = k[static_cast<std::size_t>(std::abs(i - j))];
            const auto w = static_cast<T>(
                kij / z[static_cast<std::size_t>(adjoint ? j : i)]);
            const T* src = in + static_cast<std::size_t>(j) * row_len;
            for (std::size_t x = 0; x < row_len; ++x) dst[x] += w * src[x];
          }
        }
      });
}

template <class T>
void transpose_cells(const Grid<T>& in, Grid<T>& out) {
  const std::size_t s = in.side, ch = in.channels;
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, s),
                    [&](const tbb::blocked_range<std::size_t>& range) {
                      for (std::size_t r = range.begin(); r != range.end(); ++r) {
                        for (std::size_t c = 0; c < s; ++c) {
                          const T* src = in.values.data() + (r * s + c) * ch;
                          std::copy_n(src, ch, out.values.data() + (c * s + r) * ch);
                        }
                      }
                    });
}

template <class T>
Grid<T> separable(const Grid<T>& in, std::size_t half_width, double sigma,
                  bool adjoint) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "blur sigma must be positive");
  }
  const auto k = gaussian_weights(half_width, sigma);
  const std::size_t row_len = in.side * in.channels;
  Grid<T> tmp(in.side, in.channels);
  Grid<T> out(in.side, in.channels);
  row_pass(in.values.data(), tmp.values.data(), in.side, row_len, k, adjoint);
  transpose_cells(tmp, out);
  row_pass(out.values.data(), tmp.values.data(), in.side, row_len, k, adjoint);
  transpose_cells(tmp, out);
  return out;
}

}  // namespace

std::vector<double> gaussian_weights(std::size_t half_width, double sigma) {
  std::vector<double> k(half_width + 1);
  for (std::size_t d = 0; d <= half_width; ++d) {
    const double x = static_cast<double>(d);
    k[d] = std::exp(-x * x / (2.0 * sigma * sigma));
  }
  return k;
}

template <class T>
Grid<T> gaussian_blur(const Grid<T>& in, std::size_t half_width, double sigma) {
  return separable(in, half_width, sigma, false);
}

template <class T>
Grid<T> gaussian_blur_transpose(const Grid<T>& in, std::size_t half_width,
                                double sigma) {
  return separable(in, half_width, sigma, true);
}

template Grid<float> gaussian_blur(const Grid<float>&, std::size_t, double);
template Grid<double> gaussian_blur(const Grid<double>&, std::size_t, double);
template Grid<float> gaussian_blur_transpose(const Grid<float>&, std::size_t, double);
template Grid<double> gaussian_blur_transpose(const Grid<double>&, std::size_t,
                                              double);

}  // namespace sogs
