#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace polygauss {

// Invalid input: malformed specs, violated preconditions, dimension mismatches.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Internal numerical-consistency failure (a cross-check that must hold did not).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bracketing scan or bracket_root found no sign change.
class no_bracket_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Maps a real scalar to its complex counterpart and back.  Specialised for
/// the multiprecision types in high_precision.hpp.
template <class T>
struct scalar_traits {
  using real = T;
  using complex = std::complex<T>;
  static constexpr bool is_complex = false;
  // Relative coefficient magnitude below which polynomial terms are dropped.
  static real prune_tolerance() { return real(1e-14); }
};

template <class T>
struct scalar_traits<std::complex<T>> {
  using real = T;
  using complex = std::complex<T>;
  static constexpr bool is_complex = true;
  static real prune_tolerance() { return scalar_traits<T>::prune_tolerance(); }
};

template <class S>
using real_t = typename scalar_traits<S>::real;
template <class S>
using complex_t = typename scalar_traits<S>::complex;

template <class S>
inline constexpr bool is_complex_v = scalar_traits<S>::is_complex;

template <class T>
T pi_v() {
  using std::acos;
  return acos(T(-1));
}

// real/imag/conj that also accept real scalars
template <class S>
real_t<S> re(const S& z) {
  if constexpr (is_complex_v<S>) {
    using std::real;
    return real(z);
  } else {
    return z;
  }
}

template <class S>
real_t<S> im(const S& z) {
  if constexpr (is_complex_v<S>) {
    using std::imag;
    return imag(z);
  } else {
    return real_t<S>(0);
  }
}

template <class S>
S cconj(const S& z) {
  if constexpr (is_complex_v<S>) {
    using std::conj;
    return S(conj(z));
  } else {
    return z;
  }
}

template <class S>
real_t<S> magnitude(const S& z) {
  using std::abs;
  return real_t<S>(abs(z));
}

template <class S>
bool finite(const S& z) {
  using std::isfinite;
  if constexpr (is_complex_v<S>) {
    return isfinite(re(z)) && isfinite(im(z));
  } else {
    return isfinite(z);
  }
}

template <class T>
complex_t<T> make_complex(const T& r, const T& i) {
  return complex_t<T>(r, i);
}

template <class T>
double to_double(const T& x) {
  return static_cast<double>(x);
}

}  // namespace polygauss
