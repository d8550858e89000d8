#pragma once

// Fixed-width 320-bit binary floating point (~96 significant digits).  The
// trace-moment route to e_k loses roughly k(k-1)/2 * log10(8*delta) digits to
// cancellation on the shifted kernel family, which exhausts double precision
// already at k = 5, delta = 250.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "polygauss/scalar.hpp"

namespace polygauss {

namespace mp = boost::multiprecision;

using hp_real = mp::number<mp::cpp_bin_float<320, mp::digit_base_2>, mp::et_off>;
using hp_complex = mp::number<mp::complex_adaptor<mp::cpp_bin_float<320, mp::digit_base_2>>, mp::et_off>;

template <>
struct scalar_traits<hp_real> {
  using real = hp_real;
  using complex = hp_complex;
  static constexpr bool is_complex = false;
  static real prune_tolerance() { return std::numeric_limits<hp_real>::epsilon() * 100; }
};

template <>
struct scalar_traits<hp_complex> {
  using real = hp_real;
  using complex = hp_complex;
  static constexpr bool is_complex = true;
  static real prune_tolerance() { return scalar_traits<hp_real>::prune_tolerance(); }
};

}  // namespace polygauss
