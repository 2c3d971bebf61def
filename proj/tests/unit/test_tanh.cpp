#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "pip2/diffcore/tanh.hpp"

using pip2::diffcore::tanh_into;

TEST_CASE("packet tanh matches std::tanh to a few ulp") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> wide(-25.0, 25.0);
  std::uniform_real_distribution<double> narrow(-1.0, 1.0);
  Eigen::MatrixXd in(37, 53);  // odd sizes exercise the packet tail
  for (Eigen::Index i = 0; i < in.size(); ++i) in(i) = (i % 2 ? wide(rng) : narrow(rng));
  in(0) = 0.0;
  in(1) = -0.0;
  in(2) = 0.625;
  in(3) = -0.625;
  in(4) = 1e-300;
  in(5) = 800.0;
  in(6) = -800.0;
  Eigen::MatrixXd out;
  tanh_into(in, out);
  REQUIRE(out.rows() == in.rows());
  REQUIRE(out.cols() == in.cols());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    const double ref = std::tanh(in(i));
    const double scale = std::max(std::abs(ref), std::numeric_limits<double>::min());
    worst = std::max(worst, std::abs(out(i) - ref) / scale);
  }
  CHECK(worst < 4.0 * std::numeric_limits<double>::epsilon());
  CHECK(out(5) == 1.0);
  CHECK(out(6) == -1.0);
  CHECK(std::signbit(out(1)));
}

TEST_CASE("packet tanh propagates NaN and saturates infinities") {
  Eigen::MatrixXd in(1, 5);
  in << std::nan(""), std::numeric_limits<double>::infinity(),
      -std::numeric_limits<double>::infinity(), 0.3, std::nan("");
  Eigen::MatrixXd out;
  tanh_into(in, out);
  CHECK(std::isnan(out(0)));
  CHECK(std::isnan(out(4)));
  CHECK(out(1) == 1.0);
  CHECK(out(2) == -1.0);
  CHECK(out(3) == doctest::Approx(std::tanh(0.3)).epsilon(1e-15));
}

TEST_CASE("packet tanh result does not depend on the element position") {
  Eigen::MatrixXd a(1, 9), b(3, 3);
  for (int i = 0; i < 9; ++i) a(i) = 0.37 * i - 1.4;
  b = Eigen::Map<Eigen::MatrixXd>(a.data(), 3, 3);
  Eigen::MatrixXd ra, rb;
  tanh_into(a, ra);
  tanh_into(b, rb);
  Eigen::MatrixXd single(1, 1), rs;
  for (int i = 0; i < 9; ++i) {
    single(0) = a(i);
    tanh_into(single, rs);
    CHECK(rs(0) == ra(i));
    CHECK(rb(i) == ra(i));
  }
}
