#include "maslovkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maslovkit {

Mat standard_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.block(0, n, n, n) = -Mat::Identity(n, n);
  j.block(n, 0, n, n) = Mat::Identity(n, n);
  return j;
}

Mat diamond(const Mat& a, const Mat& b) {
  const int i = static_cast<int>(a.rows()) / 2;
  const int j = static_cast<int>(b.rows()) / 2;
  const int n = i + j;
  Mat out = Mat::Zero(2 * n, 2 * n);
  // a occupies indices {0..i-1} ∪ {n..n+i-1}, b occupies {i..n-1} ∪ {n+i..2n-1}
  auto map_a = [&](int r) { return r < i ? r : n + (r - i); };
  auto map_b = [&](int r) { return r < j ? i + r : n + i + (r - j); };
  for (int r = 0; r < 2 * i; ++r)
    for (int c = 0; c < 2 * i; ++c) out(map_a(r), map_a(c)) = a(r, c);
  for (int r = 0; r < 2 * j; ++r)
    for (int c = 0; c < 2 * j; ++c) out(map_b(r), map_b(c)) = b(r, c);
  return out;
}

Mat rotation(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Mat jordan_block(double lambda, double b) {
  Mat m(2, 2);
  m << lambda, b, 0.0, lambda;
  return m;
}

Mat plane_block(const Mat& m, int k) {
  const int n = static_cast<int>(m.rows()) / 2;
  Mat out(2, 2);
  out << m(k, k), m(k, k + n), m(k + n, k), m(k + n, k + n);
  return out;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

double symplectic_defect(const Mat& m) {
  const Mat j = standard_j(static_cast<int>(m.rows()) / 2);
  return max_abs(m.transpose() * j * m - j);
}

Mat rotation_all(int n, double s) {
  Mat out = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    out(k, k) = std::cos(s);
    out(k, k + n) = -std::sin(s);
    out(k + n, k) = std::sin(s);
    out(k + n, k + n) = std::cos(s);
  }
  return out;
}

int kernel_dimension(const CMat& m, double tol) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  int count = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) < tol) ++count;
  return count;
}

std::vector<Complex> sorted_eigenvalues(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, false);
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](const Complex& a, const Complex& b) {
    if (std::abs(std::arg(a) - std::arg(b)) > 1e-12) return std::arg(a) < std::arg(b);
    return std::abs(a) < std::abs(b);
  });
  return ev;
}

}  // namespace maslovkit
