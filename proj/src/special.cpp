#include "aniso/special.hpp"

#include <cmath>
#include <stdexcept>

namespace aniso {

namespace {

// Lanczos coefficients, g = 607/128, 15 terms (Godfrey's set).
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczos[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
};

double lanczos_gamma_positive(double x) {
  // valid for x > 0
  double acc = kLanczos[0];
  for (int k = 1; k < 15; ++k) acc += kLanczos[k] / (x - 1.0 + k);
  const double t = x + kLanczosG - 0.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, x - 0.5) * std::exp(-t) * acc;
}

}  // namespace

double gamma_function(double x) {
  if (x <= 0.0 && x == std::floor(x))
    throw std::invalid_argument("gamma_function: pole at non-positive integer");
  if (x > 0.0) return lanczos_gamma_positive(x);
  // reflection for negative non-integer arguments
  return M_PI / (std::sin(M_PI * x) * lanczos_gamma_positive(1.0 - x));
}

double kernel_constant(int N, double s) {
  if (N < 1) throw std::invalid_argument("kernel_constant: N must be >= 1");
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("kernel_constant: exponent out of (0,1)");
  const double abs_gamma_neg_s = gamma_function(1.0 - s) / s;
  return std::pow(2.0, 2.0 * s - 1.0) * gamma_function(s + 0.5 * N) /
         (std::pow(M_PI, 0.5 * N) * abs_gamma_neg_s);
}

double eta(int N, double s) {
  if (N < 1) throw std::invalid_argument("eta: N must be >= 1");
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("eta: exponent out of (0,1]");
  // at s = 1 the ratio collapses exactly: Gamma(1 + N/2) = (N/2) Gamma(N/2)
  if (s == 1.0) return 0.5 / N;
  return gamma_function(0.5 * N) /
         (std::pow(2.0, 2.0 * s) * gamma_function(s + 1.0) *
          gamma_function(s + 0.5 * N));
}

double bump_fraclap_constant(int N, double s) { return 1.0 / eta(N, s); }

double sphere_measure(int N) {
  if (N < 1) throw std::invalid_argument("sphere_measure: N must be >= 1");
  return 2.0 * std::pow(M_PI, 0.5 * N) / gamma_function(0.5 * N);
}

}  // namespace aniso
