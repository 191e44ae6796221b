#pragma once

#include <cstddef>
#include <vector>

#include "sogs/grid.hpp"

namespace sogs {

// Truncated Gaussian weights k[d] = exp(-d^2 / (2 sigma^2)), d = 0..half_width.
std::vector<double> gaussian_weights(std::size_t half_width, double sigma);

// Separable Gaussian blur of every channel. Near the border the kernel is
// restricted to cells inside the grid and renormalized to sum to one, so
// constant grids are fixed points and no padding values are invented.
template <class T>
Grid<T> gaussian_blur(const Grid<T>& in, std::size_t half_width, double sigma);

// Adjoint of gaussian_blur: <blur(x), y> == <x, blur_transpose(y)>.
template <class T>
Grid<T> gaussian_blur_transpose(const Grid<T>& in, std::size_t half_width,
                                double sigma);

extern template Grid<float> gaussian_blur(const Grid<float>&, std::size_t, double);
extern template Grid<double> gaussian_blur(const Grid<double>&, std::size_t, double);
extern template Grid<float> gaussian_blur_transpose(const Grid<float>&, std::size_t,
                                                    double);
extern template Grid<double> gaussian_blur_transpose(const Grid<double>&, std::size_t,
                                                     double);

}  // namespace sogs
