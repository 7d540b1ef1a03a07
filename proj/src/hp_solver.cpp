#include "hpl/hp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace hpl {

using nlohmann::json;

int DegreeVector::total() const {
  int sum = 0;
  for (int x : d) sum += x;
  return sum + static_cast<int>(d.size());
}

void DegreeVector::validate() const {
  if (d.empty()) throw std::invalid_argument("degree vector is empty");
  for (int x : d)
    if (x < 0) throw std::invalid_argument("degrees must be nonnegative");
  if (total() < 2) throw std::invalid_argument("sum of degrees plus s must be at least 2");
}

TruncationError::TruncationError(std::size_t req, std::size_t avail)
    : std::invalid_argument("series truncation order " + std::to_string(avail) + " is below the required order " +
                            std::to_string(req)),
      required(req),
      available(avail) {}

std::size_t required_order_first_kind(const DegreeVector& d) {
  const int dmax = *std::max_element(d.d.begin(), d.d.end());
  return static_cast<std::size_t>(dmax + d.total());
}

std::size_t required_order_second_kind(int n, std::size_t s) {
  return static_cast<std::size_t>(n) * s + static_cast<std::size_t>(n) + 1;
}

namespace {

// Magnitude used for pivoting and thresholds.
double mag(const Rational& q) { return std::abs(q.get_d()); }
double mag(const BigComplex& z) { return std::abs(z.to_cd()); }

template <class T>
bool negligible(const T& x, double tol);

template <>
bool negligible<Rational>(const Rational& x, double) {
  return sgn(x) == 0;
}

template <>
bool negligible<BigComplex>(const BigComplex& x, double tol) {
  return x.is_zero() || mag(x) <= tol;
}

// Brings a kernel basis to echelon form with respect to position order and
// scales each vector so its leading entry is one.
template <class T>
std::vector<std::vector<T>> echelon_basis(std::vector<std::vector<T>> basis, std::size_t cols, double tol) {
  std::vector<std::vector<T>> out;
  for (std::size_t pos = 0; pos < cols && !basis.empty(); ++pos) {
    std::size_t best = basis.size();
    double best_mag = 0.0;
    for (std::size_t v = 0; v < basis.size(); ++v) {
      if (!negligible(basis[v][pos], tol) && mag(basis[v][pos]) > best_mag) {
        best = v;
        best_mag = mag(basis[v][pos]);
      }
    }
    if (best == basis.size()) continue;
    std::vector<T> piv = std::move(basis[best]);
    basis.erase(basis.begin() + static_cast<long>(best));
    const T lead = piv[pos];
    for (auto& x : piv) x /= lead;
    for (auto& other : basis) {
      const T f = other[pos];
      if (is_zero(f)) continue;
      for (std::size_t j = 0; j < cols; ++j) other[j] -= f * piv[j];
    }
    out.push_back(std::move(piv));
  }
  return out;
}

}  // namespace

std::vector<std::vector<Rational>> kernel_exact(const std::vector<std::vector<Rational>>& rows, std::size_t cols) {
  const std::size_t m = rows.size();
  // Clear denominators row by row, then eliminate fraction-free.
  std::vector<std::vector<mpz_class>> M(m, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < m; ++i) {
    mpz_class l = 1;
    for (const auto& q : rows[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) M[i][j] = rows[i][j].get_num() * (l / rows[i][j].get_den());
  }
  std::vector<std::size_t> pivots;
  mpz_class prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m; ++c) {
    std::size_t p = r;
    while (p < m && M[p][c] == 0) ++p;
    if (p == m) continue;
    std::swap(M[p], M[r]);
    for (std::size_t i = r + 1; i < m; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_class t = M[r][c] * M[i][j] - M[i][c] * M[r][j];
        mpz_divexact(M[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      M[i][c] = 0;
    }
    prev = M[r][c];
    pivots.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> x(cols, Rational(0));
    x[f] = 1;
    for (std::size_t i = pivots.size(); i-- > 0;) {
      const std::size_t pc = pivots[i];
      Rational acc(0);
      for (std::size_t j = pc + 1; j < cols; ++j)
        if (sgn(x[j]) != 0 && M[i][j] != 0) acc += Rational(M[i][j]) * x[j];
      x[pc] = -acc / Rational(M[i][pc]);
    }
    basis.push_back(std::move(x));
  }
  return echelon_basis(std::move(basis), cols, 0.0);
}

std::vector<std::vector<BigComplex>> kernel_float(const std::vector<std::vector<BigComplex>>& rows, std::size_t cols,
                                                  unsigned bits) {
  const std::size_t m = rows.size();
  std::vector<std::vector<BigComplex>> A = rows;
  std::vector<std::size_t> perm(cols);
  for (std::size_t j = 0; j < cols; ++j) perm[j] = j;
  auto col_norm2 = [&](std::size_t j, std::size_t from) {
    BigFloat s(bits);
    for (std::size_t i = from; i < m; ++i) s += A[i][j].norm();
    return s;
  };
  const double rel_tol = std::ldexp(1.0, -static_cast<int>(bits * 4 / 5));
  double first_norm = 0.0;
  std::size_t rank = 0;
  for (std::size_t k = 0; k < std::min(m, cols); ++k) {
    std::size_t best = k;
    BigFloat best_n = col_norm2(k, k);
    for (std::size_t j = k + 1; j < cols; ++j) {
      BigFloat nj = col_norm2(j, k);
      if (nj > best_n) {
        best = j;
        best_n = std::move(nj);
      }
    }
    const double nrm = std::sqrt(best_n.to_double());
    if (k == 0) first_norm = nrm;
    if (nrm <= rel_tol * first_norm || nrm == 0.0) break;
    if (best != k) {
      for (auto& row : A) std::swap(row[k], row[best]);
      std::swap(perm[k], perm[best]);
    }
    BigFloat sigma = sqrt(best_n);
    BigComplex alpha(bits);
    const BigFloat x0 = A[k][k].abs();
    if (x0.is_zero()) {
      alpha = BigComplex(-sigma, BigFloat(bits));
    } else {
      BigFloat f = sigma / x0;
      alpha = BigComplex(-(A[k][k].re * f), -(A[k][k].im * f));
    }
    std::vector<BigComplex> v(m - k, BigComplex(bits));
    for (std::size_t i = k; i < m; ++i) v[i - k] = A[i][k];
    v[0] -= alpha;
    BigFloat vn2(bits);
    for (const auto& x : v) vn2 += x.norm();
    for (std::size_t j = k; j < cols; ++j) {
      BigComplex s(bits);
      for (std::size_t i = k; i < m; ++i) s += v[i - k].conj() * A[i][j];
      BigComplex f = s * BigComplex(BigFloat(2.0, bits) / vn2, BigFloat(bits));
      for (std::size_t i = k; i < m; ++i) A[i][j] -= f * v[i - k];
    }
    ++rank;
  }
  std::vector<std::vector<BigComplex>> basis;
  for (std::size_t f = rank; f < cols; ++f) {
    std::vector<BigComplex> y(cols, BigComplex(bits));
    y[f] = BigComplex(Rational(1), bits);
    for (std::size_t i = rank; i-- > 0;) {
      BigComplex acc = A[i][f];
      for (std::size_t j = i + 1; j < rank; ++j) acc += A[i][j] * y[j];
      y[i] = -(acc / A[i][i]);
    }
    std::vector<BigComplex> x(cols, BigComplex(bits));
    for (std::size_t j = 0; j < cols; ++j) x[perm[j]] = y[j];
    basis.push_back(std::move(x));
  }
  // Rescale so the tie-break sees comparable magnitudes.
  for (auto& x : basis) {
    double mx = 0.0;
    for (const auto& e : x) mx = std::max(mx, mag(e));
    if (mx > 0) {
      const BigComplex s(cd(1.0 / mx, 0.0), bits);
      for (auto& e : x) e *= s;
    }
  }
  return echelon_basis(std::move(basis), cols, std::sqrt(rel_tol));
}

namespace {

template <class T>
const std::vector<T>& coeffs_of(const LaurentSeries& f) {
  return f.as<T>();
}

template <class T>
unsigned common_bits(const std::vector<LaurentSeries>& series) {
  if constexpr (std::is_same_v<T, Rational>) {
    for (const auto& f : series)
      if (f.kind() != ScalarKind::exact_rational) throw std::invalid_argument("series kinds differ from requested exact mode");
    return 0;
  } else {
    unsigned bits = 0;
    for (const auto& f : series) {
      if (f.kind() != ScalarKind::big_float_complex) throw std::invalid_argument("series kinds differ from requested float mode");
      bits = std::max(bits, f.precision_bits());
    }
    return bits;
  }
}

template <class T>
std::vector<std::vector<T>> kernel_of(const std::vector<std::vector<T>>& rows, std::size_t cols, unsigned bits) {
  if constexpr (std::is_same_v<T, Rational>) {
    (void)bits;
    return kernel_exact(rows, cols);
  } else {
    return kernel_float(rows, cols, bits);
  }
}

// First index m >= 1 whose remainder coefficient is nonzero. In float mode a
// coefficient counts as zero when it is below the cancellation level of its terms.
template <class T>
std::size_t first_nonzero(const std::vector<T>& tail, const std::vector<double>& term_scale, unsigned bits) {
  const double rel = bits == 0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(bits / 2));
  for (std::size_t m = 1; m < tail.size(); ++m) {
    if (bits == 0) {
      if (!is_zero(tail[m])) return m;
    } else if (mag(tail[m]) > rel * term_scale[m]) {
      return m;
    }
  }
  return tail.size();
}

}  // namespace

template <class T>
HPFirst<T> solve_first_kind(const std::vector<LaurentSeries>& series, const DegreeVector& d) {
  d.validate();
  if (series.size() != d.size()) throw std::invalid_argument("number of series must match the degree vector");
  const unsigned bits = common_bits<T>(series);
  const std::size_t need = required_order_first_kind(d);
  for (const auto& f : series)
    if (f.order() < need) throw TruncationError(need, f.order());
  const std::size_t s = d.size();
  const std::size_t N = static_cast<std::size_t>(d.total());
  // Columns: q_s from high to low degree, then q_{s-1}, ..., q_1.
  std::vector<std::pair<std::size_t, std::size_t>> col;  // (k, j)
  for (std::size_t k = s; k-- > 0;)
    for (int j = d.d[k]; j >= 0; --j) col.emplace_back(k, static_cast<std::size_t>(j));
  std::vector<std::vector<T>> rows;
  for (std::size_t i = 1; i <= N - 1; ++i) {
    std::vector<T> row;
    row.reserve(N);
    for (const auto& [k, j] : col) row.push_back(coeffs_of<T>(series[k])[j + i]);
    rows.push_back(std::move(row));
  }
  auto basis = kernel_of<T>(rows, N, bits);
  if (basis.empty()) throw std::runtime_error("internal error: empty kernel for an underdetermined system");
  const auto& v = basis.back();

  HPFirst<T> hp;
  hp.degrees = d;
  hp.kernel_dim = basis.size();
  hp.precision_bits = bits;
  hp.q.assign(s, {});
  for (std::size_t k = 0; k < s; ++k) hp.q[k].assign(static_cast<std::size_t>(d.d[k]) + 1, FieldOps<T>::zero(bits));
  for (std::size_t c = 0; c < N; ++c) hp.q[col[c].first][col[c].second] = v[c];

  // q_0 is minus the polynomial part of sum q_k f_k.
  const std::size_t dmax = static_cast<std::size_t>(*std::max_element(d.d.begin(), d.d.end()));
  hp.q0.assign(dmax + 1, FieldOps<T>::zero(bits));
  std::size_t avail = series[0].order();
  for (std::size_t k = 0; k < s; ++k) avail = std::min(avail, series[k].order() - static_cast<std::size_t>(d.d[k]));
  std::vector<T> tail(avail + 1, FieldOps<T>::zero(bits));
  std::vector<double> term_scale(avail + 1, 0.0);
  for (std::size_t k = 0; k < s; ++k) {
    const auto& f = coeffs_of<T>(series[k]);
    const auto& qk = hp.q[k];
    for (std::size_t e = 0; e < qk.size(); ++e)
      for (std::size_t j = e; j < qk.size(); ++j) hp.q0[e] -= qk[j] * f[j - e];
    for (std::size_t m = 1; m <= avail; ++m)
      for (std::size_t j = 0; j < qk.size(); ++j) {
        tail[m] += qk[j] * f[j + m];
        if constexpr (!std::is_same_v<T, Rational>) term_scale[m] += mag(qk[j]) * mag(f[j + m]);
      }
  }
  hp.achieved_order = first_nonzero(tail, term_scale, bits);
  return hp;
}

template <class T>
HPSecond<T> solve_second_kind(const std::vector<LaurentSeries>& series, int n) {
  if (n < 1) throw std::invalid_argument("second-kind index n must be positive");
  if (series.empty()) throw std::invalid_argument("no series given");
  const unsigned bits = common_bits<T>(series);
  const std::size_t s = series.size();
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t need = required_order_second_kind(n, s);
  for (const auto& f : series)
    if (f.order() < need) throw TruncationError(need, f.order());
  const std::size_t cols = nn * s + 1;
  std::vector<std::vector<T>> rows;
  for (std::size_t k = 0; k < s; ++k) {
    const auto& f = coeffs_of<T>(series[k]);
    for (std::size_t i = 1; i <= nn; ++i) {
      std::vector<T> row;
      for (std::size_t c = 0; c < cols; ++c) row.push_back(f[(cols - 1 - c) + i]);
      rows.push_back(std::move(row));
    }
  }
  auto basis = kernel_of<T>(rows, cols, bits);
  if (basis.empty()) throw std::runtime_error("internal error: empty kernel for an underdetermined system");
  const auto& v = basis.back();
  HPSecond<T> hp;
  hp.n = n;
  hp.kernel_dim = basis.size();
  hp.precision_bits = bits;
  hp.P.assign(cols, FieldOps<T>::zero(bits));
  for (std::size_t c = 0; c < cols; ++c) hp.P[cols - 1 - c] = v[c];
  // Leading entry of the echelon vector is one, so P is monic in its true degree.
  for (std::size_t k = 0; k < s; ++k) {
    const auto& f = coeffs_of<T>(series[k]);
    std::vector<T> num(cols, FieldOps<T>::zero(bits));
    for (std::size_t e = 0; e < cols; ++e)
      for (std::size_t j = e; j < cols; ++j) num[e] += hp.P[j] * f[j - e];
    hp.numerators.push_back(std::move(num));
  }
  return hp;
}

template <class T>
LaurentSeries remainder_series(const HPFirst<T>& hp, const std::vector<LaurentSeries>& series, std::size_t order) {
  const std::size_t s = hp.q.size();
  if (series.size() != s) throw std::invalid_argument("number of series must match the solution");
  std::size_t avail = series[0].order();
  for (std::size_t k = 0; k < s; ++k) avail = std::min(avail, series[k].order() - static_cast<std::size_t>(hp.degrees.d[k]));
  if (order > avail) throw TruncationError(order + static_cast<std::size_t>(*std::max_element(hp.degrees.d.begin(), hp.degrees.d.end())), series[0].order());
  const unsigned bits = hp.precision_bits;
  std::vector<T> r(order + 1, FieldOps<T>::zero(bits));
  r[0] = hp.q0.empty() ? FieldOps<T>::zero(bits) : hp.q0[0];
  for (std::size_t k = 0; k < s; ++k) {
    const auto& f = coeffs_of<T>(series[k]);
    const auto& qk = hp.q[k];
    for (std::size_t m = 0; m <= order; ++m)
      for (std::size_t j = 0; j < qk.size(); ++j) r[m] += qk[j] * f[j + m];
  }
  if constexpr (std::is_same_v<T, Rational>) {
    return LaurentSeries(std::move(r));
  } else {
    return LaurentSeries(std::move(r), bits);
  }
}

template <class T>
HPFirst<T> scaled(const HPFirst<T>& hp, const T& factor) {
  HPFirst<T> out = hp;
  for (auto& x : out.q0) x *= factor;
  for (auto& qk : out.q)
    for (auto& x : qk) x *= factor;
  return out;
}

template <class T>
HPFirst<T> normalize(const HPFirst<T>& hp, NormalizationPolicy policy, std::size_t k) {
  const unsigned bits = hp.precision_bits;
  auto spherical = [&]() {
    double mx = 0.0;
    std::size_t bk = 0, bj = 0;
    for (std::size_t a = 0; a < hp.q.size(); ++a)
      for (std::size_t j = 0; j < hp.q[a].size(); ++j)
        if (mag(hp.q[a][j]) > mx) {
          mx = mag(hp.q[a][j]);
          bk = a;
          bj = j;
        }
    if constexpr (std::is_same_v<T, Rational>) {
      Rational m = abs(hp.q[bk][bj]);
      return scaled(hp, Rational(Rational(1) / m));
    } else {
      BigFloat m = hp.q[bk][bj].abs();
      return scaled(hp, BigComplex(BigFloat(1.0, bits) / m, BigFloat(bits)));
    }
  };
  if (policy == NormalizationPolicy::spherical) return spherical();
  const T* ref = nullptr;
  if (policy == NormalizationPolicy::unit_c1) {
    ref = &hp.leading(0);
  } else {
    if (k < 1 || k > hp.q.size()) throw std::invalid_argument("monic_k index out of range");
    const auto& qk = hp.q[k - 1];
    for (std::size_t j = qk.size(); j-- > 0;)
      if (!is_zero(qk[j])) {
        ref = &qk[j];
        break;
      }
  }
  if (ref == nullptr || is_zero(*ref)) {
    HPFirst<T> out = spherical();
    out.normalization_fallback = true;
    return out;
  }
  const T inv = T(FieldOps<T>::one(bits) / *ref);
  HPFirst<T> out = scaled(hp, inv);
  out.normalization_fallback = false;
  return out;
}

namespace {

json poly_json(const std::vector<Rational>& p) { return poly_to_json(p); }
json poly_json(const std::vector<BigComplex>& p) { return poly_to_json(p); }

template <class T>
const char* kind_name() {
  return std::is_same_v<T, Rational> ? "exact-rational" : "big-float-complex";
}

}  // namespace

template <class T>
json to_json(const HPFirst<T>& hp) {
  json j;
  j["kind"] = kind_name<T>();
  if (hp.precision_bits) j["precision_bits"] = hp.precision_bits;
  j["degrees"] = hp.degrees.d;
  j["q0"] = poly_json(hp.q0);
  j["q"] = json::array();
  for (const auto& qk : hp.q) j["q"].push_back(poly_json(qk));
  j["achieved_order"] = hp.achieved_order;
  j["kernel_dim"] = hp.kernel_dim;
  j["normalization_fallback"] = hp.normalization_fallback;
  return j;
}

template <class T>
json to_json(const HPSecond<T>& hp) {
  json j;
  j["kind"] = kind_name<T>();
  if (hp.precision_bits) j["precision_bits"] = hp.precision_bits;
  j["n"] = hp.n;
  j["P"] = poly_json(hp.P);
  j["numerators"] = json::array();
  for (const auto& p : hp.numerators) j["numerators"].push_back(poly_json(p));
  j["kernel_dim"] = hp.kernel_dim;
  return j;
}

NormalizationPolicy normalization_from_string(const std::string& s) {
  if (s == "unit_c1") return NormalizationPolicy::unit_c1;
  if (s == "spherical") return NormalizationPolicy::spherical;
  if (s == "monic_k") return NormalizationPolicy::monic_k;
  throw std::invalid_argument("unknown normalization policy: " + s);
}

#define HPL_INSTANTIATE(T)                                                                                   \
  template HPFirst<T> solve_first_kind<T>(const std::vector<LaurentSeries>&, const DegreeVector&);           \
  template HPSecond<T> solve_second_kind<T>(const std::vector<LaurentSeries>&, int);                         \
  template LaurentSeries remainder_series<T>(const HPFirst<T>&, const std::vector<LaurentSeries>&, std::size_t); \
  template HPFirst<T> normalize<T>(const HPFirst<T>&, NormalizationPolicy, std::size_t);                     \
  template HPFirst<T> scaled<T>(const HPFirst<T>&, const T&);                                                \
  template json to_json<T>(const HPFirst<T>&);                                                               \
  template json to_json<T>(const HPSecond<T>&);

HPL_INSTANTIATE(Rational)
HPL_INSTANTIATE(BigComplex)

}  // namespace hpl
