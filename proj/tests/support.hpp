#pragma once

#include "maslovkit/flow.hpp"
#include "maslovkit/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

namespace testsupport {

using maslovkit::Mat;

inline constexpr double kPi = 3.14159265358979323846;

// Smallest integer >= x, for x known to be away from integers.
inline long long ceil_of(double x) { return static_cast<long long>(std::ceil(x - 1e-12)); }

inline Mat random_symmetric(std::mt19937& rng, int d, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat s(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k <= i; ++k) s(i, k) = s(k, i) = u(rng);
  return s;
}

// Piecewise-autonomous Hamiltonian path e^{(t−t_k) J S_k} ⋯ e^{J S_0 /pieces}
// on [0, 1] in Sp(4).
inline maslovkit::SymplecticPath random_hamiltonian_path(std::mt19937& rng, int pieces, int samples,
                                                         double scale = 3.0) {
  const Mat j = maslovkit::standard_j(2);
  std::vector<Mat> gens;
  for (int k = 0; k < pieces; ++k) gens.push_back(j * random_symmetric(rng, 4, scale));
  const double h = 1.0 / pieces;
  std::vector<Mat> ends{Mat::Identity(4, 4)};
  for (int k = 0; k < pieces; ++k) ends.push_back(Mat((h * gens[k]).exp()) * ends.back());
  return maslovkit::path_from_function(1.0, samples, [=](double t) -> Mat {
    const int k = std::min(pieces - 1, static_cast<int>(t / h));
    return Mat(((t - k * h) * gens[k]).exp()) * ends[k];
  });
}

// Half path ψ(t), t ∈ [0, 1], of a constructed symmetric hyperbolic orbit:
// plane 1 turns by π with the ellipsoid-like shear, plane 2 turns by π while
// stretching by `stretch`, so ψ(1) = −N ⋄ −diag(s, 1/s).
inline maslovkit::SymplecticPath hyperbolic_half_path(int samples, double stretch = 2.0, double shear = 0.3) {
  return maslovkit::path_from_function(1.0, samples, [=](double t) -> Mat {
    Mat a = maslovkit::rotation(kPi * t) * (Mat(2, 2) << 1.0, 0.0, -shear * t, 1.0).finished();
    Mat b = maslovkit::rotation(kPi * t) * (Mat(2, 2) << std::pow(stretch, t), 0.0, 0.0, std::pow(stretch, -t)).finished();
    return maslovkit::diamond(a, b);
  });
}

}  // namespace testsupport
