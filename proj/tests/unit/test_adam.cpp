#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pip2/common/errors.hpp"
#include "pip2/diffcore/adam.hpp"

using namespace pip2;
using namespace pip2::diffcore;

TEST_CASE("zero gradient from a fresh state leaves parameters unchanged") {
  AdamState s(3);
  std::vector<double> p{1.0, -2.0, 0.5};
  const auto before = p;
  adam_step(s, p, std::vector<double>(3, 0.0), 1e-3);
  CHECK(p == before);
  CHECK(s.step == 1);
}

TEST_CASE("first step moves each entry by about -lr * sign(g)") {
  AdamState s(4);
  std::vector<double> p{0.0, 1.0, 2.0, -3.0};
  const std::vector<double> g{0.3, -7.0, 2e-2, 50.0};
  const auto before = p;
  const double lr = 1e-3;
  adam_step(s, p, g, lr);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double expect = -lr * (g[i] > 0 ? 1.0 : -1.0);
    CHECK(std::abs((p[i] - before[i]) - expect) <= lr * 1e-6);
  }
}

TEST_CASE("five steps on a quadratic match a scripted Adam") {
  const std::vector<double> a{1.0, 3.0, 0.2};
  std::vector<double> p{0.7, -1.2, 4.0};
  std::vector<double> q = p, m(3, 0.0), v(3, 0.0);
  AdamState s(3);
  const double lr = 0.05;
  for (int t = 1; t <= 5; ++t) {
    std::vector<double> g(3);
    for (int i = 0; i < 3; ++i) g[i] = a[i] * p[i];
    adam_step(s, p, g, lr);
    for (int i = 0; i < 3; ++i) {
      const double gi = a[i] * q[i];
      m[i] = 0.9 * m[i] + 0.1 * gi;
      v[i] = 0.999 * v[i] + 0.001 * gi * gi;
      const double mh = m[i] / (1.0 - std::pow(0.9, t));
      const double vh = v[i] / (1.0 - std::pow(0.999, t));
      q[i] -= lr * mh / (std::sqrt(vh) + 1e-8);
    }
    for (int i = 0; i < 3; ++i) CHECK(std::abs(p[i] - q[i]) <= 1e-12);
    CHECK(s.step == static_cast<std::uint64_t>(t));
    for (double vi : s.v) CHECK(vi >= 0.0);
  }
}

TEST_CASE("invalid inputs are rejected") {
  AdamState s(2);
  std::vector<double> p{0.0, 0.0};
  CHECK_THROWS_AS(adam_step(s, p, std::vector<double>{1.0}, 1e-3), ConfigError);
  CHECK_THROWS_AS(adam_step(s, p, std::vector<double>{1.0, 1.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(adam_step(s, p, std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, 1e-3),
                  NumericalError);
}
