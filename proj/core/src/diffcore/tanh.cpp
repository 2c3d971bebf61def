#include "pip2/diffcore/tanh.hpp"

#include <algorithm>

namespace pip2::diffcore {

namespace {

namespace ei = Eigen::internal;
using Packet = ei::packet_traits<double>::type;
constexpr int kWidth = static_cast<int>(sizeof(Packet) / sizeof(double));

// Cephes tanh coefficients for the small-argument branch.
inline Packet tanh_packet(const Packet& x) {
  const Packet ax = ei::pabs(x);
  const Packet z = ei::pmul(x, x);
  Packet num = ei::pset1<Packet>(-9.64399179425052238628e-1);
  num = ei::padd(ei::pmul(num, z), ei::pset1<Packet>(-9.92877231001918586564e1));
  num = ei::padd(ei::pmul(num, z), ei::pset1<Packet>(-1.61468768441708447952e3));
  Packet den = ei::padd(z, ei::pset1<Packet>(1.12811678491632931402e2));
  den = ei::padd(ei::pmul(den, z), ei::pset1<Packet>(2.23548839060100448583e3));
  den = ei::padd(ei::pmul(den, z), ei::pset1<Packet>(4.84406305325125486048e3));
  const Packet e = ei::pexp(ei::pmul(ei::pset1<Packet>(2.0), ei::pmin(ax, ei::pset1<Packet>(22.0))));
  // One division serves both branches: num/den below the cut, 2/(e+1) above.
  const Packet is_small = ei::pcmp_lt(ax, ei::pset1<Packet>(0.625));
  const Packet q = ei::pdiv(ei::pselect(is_small, num, ei::pset1<Packet>(2.0)),
                            ei::pselect(is_small, den, ei::padd(e, ei::pset1<Packet>(1.0))));
  const Packet small = ei::padd(x, ei::pmul(ei::pmul(x, z), q));
  const Packet big = ei::por(ei::psub(ei::pset1<Packet>(1.0), q), ei::pand(x, ei::pset1<Packet>(-0.0)));
  Packet r = ei::pselect(is_small, small, big);
  // Keep the sign of zero.
  r = ei::pselect(ei::pcmp_eq(x, ei::pzero(x)), x, r);
  // pmin drops NaN on some targets; put it back.
  return ei::pselect(ei::pcmp_eq(x, x), r, x);
}

}  // namespace

void tanh_into(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
  out.resize(in.rows(), in.cols());
  const double* src = in.data();
  double* dst = out.data();
  const Eigen::Index n = in.size();
  Eigen::Index i = 0;
  for (; i + kWidth <= n; i += kWidth) ei::pstoreu(dst + i, tanh_packet(ei::ploadu<Packet>(src + i)));
  if (i < n) {
    alignas(64) double buf[kWidth] = {};
    std::copy(src + i, src + n, buf);
    ei::pstoreu(buf, tanh_packet(ei::ploadu<Packet>(buf)));
    std::copy(buf, buf + (n - i), dst + i);
  }
}

}  // namespace pip2::diffcore
