#include "emg/burg.hpp"

#include <string>

#include "emg/error.hpp"

namespace emg {

std::vector<double> burg_ar(std::span<const double> x, int order) {
  if (order < 0) throw Error("AR order must be non-negative");
  const auto m = static_cast<std::size_t>(order);
  if (x.size() <= m) {
    throw Error("Burg AR(" + std::to_string(order) + ") needs more than " + std::to_string(order) + " samples");
  }
  const std::size_t n = x.size() - 1;

  // a holds the prediction-error filter [1, a1, ..., am].
  std::vector<double> a(m + 1, 0.0);
  a[0] = 1.0;
  std::vector<double> f(x.begin(), x.end());
  std::vector<double> b(x.begin(), x.end());

  double dk = 0.0;
  for (std::size_t j = 0; j <= n; ++j) dk += 2.0 * x[j] * x[j];
  dk -= x[0] * x[0] + x[n] * x[n];

  for (std::size_t k = 0; k < m; ++k) {
    if (!(dk > 0.0)) break;
    double mu = 0.0;
    for (std::size_t i = 0; i + k + 1 <= n; ++i) mu += f[i + k + 1] * b[i];
    mu *= -2.0 / dk;

    for (std::size_t i = 0; i <= (k + 1) / 2; ++i) {
      const double t1 = a[i] + mu * a[k + 1 - i];
      const double t2 = a[k + 1 - i] + mu * a[i];
      a[i] = t1;
      a[k + 1 - i] = t2;
    }
    for (std::size_t i = 0; i + k + 1 <= n; ++i) {
      const double t1 = f[i + k + 1] + mu * b[i];
      const double t2 = b[i] + mu * f[i + k + 1];
      f[i + k + 1] = t1;
      b[i] = t2;
    }
    dk = (1.0 - mu * mu) * dk - f[k + 1] * f[k + 1] - b[n - k - 1] * b[n - k - 1];
  }

  std::vector<double> coeffs(m);
  for (std::size_t k = 0; k < m; ++k) coeffs[k] = -a[k + 1];
  return coeffs;
}

}  // namespace emg
