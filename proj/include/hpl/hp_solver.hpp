#pragma once

// Hermite-Pade polynomials of the first and second kind for a vector of
// Laurent series at infinity.

#include <cstddef>
#include <string>
#include <vector>

#include "hpl/series.hpp"

namespace hpl {

struct DegreeVector {
  std::vector<int> d;

  int total() const;  // N = sum d_k + s
  std::size_t size() const { return d.size(); }
  void validate() const;
  static DegreeVector diagonal(int n, std::size_t s) { return {std::vector<int>(s, n)}; }
};

class TruncationError : public std::invalid_argument {
 public:
  TruncationError(std::size_t required, std::size_t available);
  std::size_t required;
  std::size_t available;
};

template <class T>
struct HPFirst {
  DegreeVector degrees;
  std::vector<T> q0;
  std::vector<std::vector<T>> q;  // q[k] has d_k + 1 ascending coefficients
  // Index of the first nonzero remainder coefficient, or order+1 if none is
  // nonzero within the available truncation.
  std::size_t achieved_order = 0;
  std::size_t kernel_dim = 0;
  unsigned precision_bits = 0;
  bool normalization_fallback = false;

  // Coefficient of z^{d_k} in q_k.
  const T& leading(std::size_t k) const { return q.at(k).at(static_cast<std::size_t>(degrees.d.at(k))); }
};

template <class T>
struct HPSecond {
  int n = 0;
  std::vector<T> P;                        // ascending, degree <= n s
  std::vector<std::vector<T>> numerators;  // polynomial parts of P f_k
  std::size_t kernel_dim = 0;
  unsigned precision_bits = 0;
};

using HPFirstQ = HPFirst<Rational>;
using HPFirstC = HPFirst<BigComplex>;
using HPSecondQ = HPSecond<Rational>;
using HPSecondC = HPSecond<BigComplex>;

enum class NormalizationPolicy { unit_c1, spherical, monic_k };

// Smallest truncation order each input series must have.
std::size_t required_order_first_kind(const DegreeVector& d);
std::size_t required_order_second_kind(int n, std::size_t s);

template <class T>
HPFirst<T> solve_first_kind(const std::vector<LaurentSeries>& series, const DegreeVector& d);

template <class T>
HPSecond<T> solve_second_kind(const std::vector<LaurentSeries>& series, int n);

// Expansion of R = q_0 + sum q_k f_k through z^{-order}.
template <class T>
LaurentSeries remainder_series(const HPFirst<T>& hp, const std::vector<LaurentSeries>& series, std::size_t order);

// For monic_k, k is 1-based. A zero reference coefficient falls back to spherical
// scaling and sets normalization_fallback.
template <class T>
HPFirst<T> normalize(const HPFirst<T>& hp, NormalizationPolicy policy, std::size_t k = 1);

template <class T>
HPFirst<T> scaled(const HPFirst<T>& hp, const T& factor);

// Kernel of a dense matrix, as column-ordered basis vectors. The returned basis
// is in echelon form: leading indices are strictly increasing.
std::vector<std::vector<Rational>> kernel_exact(const std::vector<std::vector<Rational>>& rows, std::size_t cols);
std::vector<std::vector<BigComplex>> kernel_float(const std::vector<std::vector<BigComplex>>& rows, std::size_t cols,
                                                  unsigned precision_bits);

template <class T>
nlohmann::json to_json(const HPFirst<T>& hp);
template <class T>
nlohmann::json to_json(const HPSecond<T>& hp);

NormalizationPolicy normalization_from_string(const std::string& s);

}  // namespace hpl
