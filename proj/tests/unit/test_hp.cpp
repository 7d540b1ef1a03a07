#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

#include "hpl/hp_solver.hpp"

using namespace hpl;

namespace {

std::vector<LaurentSeries> angelesco_pair(std::size_t order, Rational a1 = -2, Rational b1 = -1, Rational a2 = 1,
                                          Rational b2 = 2) {
  return {expand_markov(MarkovSpec::unit(a1, b1), order, ScalarKind::exact_rational),
          expand_markov(MarkovSpec::unit(a2, b2), order, ScalarKind::exact_rational)};
}

LaurentSeries pole_at_two(std::size_t order) {
  std::vector<Rational> c{0};
  Rational p(1);
  for (std::size_t m = 1; m <= order; ++m) {
    c.push_back(p);
    p *= 2;
  }
  return LaurentSeries(c);
}

// Independent oracle: fix c_1 = 1 and solve the square inhomogeneous system by
// Gauss-Jordan elimination over columns in natural order (q_1 low to high,
// then q_2 ...), choosing the last available row as pivot.
std::vector<std::vector<Rational>> oracle_unit_c1(const std::vector<LaurentSeries>& f, const std::vector<int>& d) {
  const std::size_t s = d.size();
  std::vector<std::pair<std::size_t, std::size_t>> col;
  std::size_t N = 0;
  for (std::size_t k = 0; k < s; ++k) {
    for (int j = 0; j <= d[k]; ++j) col.emplace_back(k, static_cast<std::size_t>(j));
    N += static_cast<std::size_t>(d[k]) + 1;
  }
  // Unknown index of c_1 (q_1's top coefficient) is d[0]; move it to the right-hand side.
  const std::size_t fixed = static_cast<std::size_t>(d[0]);
  std::vector<std::vector<Rational>> A;
  for (std::size_t i = 1; i < N; ++i) {
    std::vector<Rational> row;
    Rational rhs(0);
    for (std::size_t c = 0; c < N; ++c) {
      const Rational v = f[col[c].first].exact()[col[c].second + i];
      if (c == fixed)
        rhs = -v;
      else
        row.push_back(v);
    }
    row.push_back(rhs);
    A.push_back(row);
  }
  const std::size_t n = N - 1;
  std::vector<bool> used(n, false);
  std::vector<std::size_t> where(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = n;
    for (std::size_t r = n; r-- > 0;)
      if (!used[r] && sgn(A[r][c]) != 0) {
        p = r;
        break;
      }
    REQUIRE(p < n);
    used[p] = true;
    where[c] = p;
    const Rational piv = A[p][c];
    for (auto& x : A[p]) x /= piv;
    for (std::size_t r = 0; r < n; ++r)
      if (r != p && sgn(A[r][c]) != 0) {
        const Rational fct = A[r][c];
        for (std::size_t j = 0; j <= n; ++j) A[r][j] -= fct * A[p][j];
      }
  }
  std::vector<std::vector<Rational>> q(s);
  for (std::size_t k = 0; k < s; ++k) q[k].assign(static_cast<std::size_t>(d[k]) + 1, Rational(0));
  std::size_t u = 0;
  for (std::size_t c = 0; c < N; ++c) {
    if (c == fixed) {
      q[col[c].first][col[c].second] = 1;
    } else {
      q[col[c].first][col[c].second] = A[where[u]][n];
      ++u;
    }
  }
  return q;
}

// Monic Chebyshev polynomial T_n / 2^{n-1} by the three-term recurrence.
std::vector<Rational> monic_chebyshev(int n) {
  std::vector<Rational> t0{1}, t1{0, 1};
  if (n == 0) return t0;
  for (int k = 1; k < n; ++k) {
    std::vector<Rational> t2(t1.size() + 1, Rational(0));
    for (std::size_t j = 0; j < t1.size(); ++j) t2[j + 1] += 2 * t1[j];
    for (std::size_t j = 0; j < t0.size(); ++j) t2[j] -= t0[j];
    t0 = t1;
    t1 = t2;
  }
  Rational lead = t1.back();
  for (auto& x : t1) x /= lead;
  return t1;
}

}  // namespace

TEST_CASE("rational function is reproduced by the first kind solve") {
  std::vector<LaurentSeries> f{pole_at_two(12)};
  auto hp = solve_first_kind<Rational>(f, DegreeVector{{1}});
  CHECK(hp.kernel_dim == 1);
  CHECK(hp.q[0] == std::vector<Rational>{-2, 1});
  auto r = remainder_series(hp, f, 10);
  for (const auto& x : r.exact()) CHECK(x == 0);
  CHECK(hp.achieved_order == 12);
}

TEST_CASE("Angelesco pair matches the independent elimination oracle") {
  for (int n = 1; n <= 6; ++n) {
    DegreeVector d = DegreeVector::diagonal(n, 2);
    auto f = angelesco_pair(required_order_first_kind(d));
    auto hp = normalize(solve_first_kind<Rational>(f, d), NormalizationPolicy::unit_c1);
    CHECK(hp.kernel_dim == 1);
    CHECK_FALSE(hp.normalization_fallback);
    auto oracle = oracle_unit_c1(f, d.d);
    CHECK(hp.q == oracle);
    CHECK(hp.leading(1) / hp.leading(0) == oracle[1].back() / oracle[0].back());
  }
  DegreeVector d{{2, 4}};
  auto f = angelesco_pair(required_order_first_kind(d), -3, -1, 1, 2);
  CHECK(normalize(solve_first_kind<Rational>(f, d), NormalizationPolicy::unit_c1).q == oracle_unit_c1(f, d.d));
}

TEST_CASE("defect exactness and first nonzero remainder index") {
  for (int n = 1; n <= 12; ++n) {
    DegreeVector d = DegreeVector::diagonal(n, 2);
    const std::size_t N = static_cast<std::size_t>(d.total());
    auto f = angelesco_pair(required_order_first_kind(d) + 2);
    auto hp = solve_first_kind<Rational>(f, d);
    auto r = remainder_series(hp, f, N + 1);
    for (std::size_t m = 0; m < N; ++m) CHECK(r.exact()[m] == 0);
    CHECK(r.exact()[N] != 0);
    CHECK(hp.achieved_order == N);
  }
}

TEST_CASE("truncation requirement is enforced") {
  DegreeVector d = DegreeVector::diagonal(3, 2);
  auto f = angelesco_pair(required_order_first_kind(d) - 1);
  CHECK_THROWS_AS(solve_first_kind<Rational>(f, d), TruncationError);
  try {
    solve_first_kind<Rational>(f, d);
  } catch (const TruncationError& e) {
    CHECK(e.required == required_order_first_kind(d));
  }
}

TEST_CASE("scaling inputs leaves the polynomial vector unchanged") {
  DegreeVector d = DegreeVector::diagonal(3, 2);
  auto f = angelesco_pair(required_order_first_kind(d));
  std::vector<LaurentSeries> g{scale(f[0], Rational(7, 3)), scale(f[1], Rational(7, 3))};
  auto a = normalize(solve_first_kind<Rational>(f, d), NormalizationPolicy::unit_c1);
  auto b = normalize(solve_first_kind<Rational>(g, d), NormalizationPolicy::unit_c1);
  CHECK(a.q == b.q);
}

TEST_CASE("normalization policies") {
  DegreeVector d = DegreeVector::diagonal(4, 2);
  auto f = angelesco_pair(required_order_first_kind(d));
  auto hp = solve_first_kind<Rational>(f, d);
  auto u1 = normalize(hp, NormalizationPolicy::unit_c1);
  CHECK(u1.leading(0) == 1);
  CHECK(normalize(u1, NormalizationPolicy::unit_c1).q == u1.q);
  auto sp = normalize(hp, NormalizationPolicy::spherical);
  Rational mx(0);
  for (const auto& qk : sp.q)
    for (const auto& x : qk) mx = std::max(mx, Rational(abs(x)));
  CHECK(mx == 1);
  auto m2 = normalize(hp, NormalizationPolicy::monic_k, 2);
  CHECK(m2.q[1].back() == 1);
  // All policies are scalar multiples of each other: ratios of coefficients agree.
  CHECK(sp.q[1][2] / sp.q[0][1] == u1.q[1][2] / u1.q[0][1]);
  // Remainder is linear in the solution.
  auto r1 = remainder_series(u1, f, 8);
  auto r3 = remainder_series(scaled(u1, Rational(3)), f, 8);
  for (std::size_t m = 0; m <= 8; ++m) CHECK(r3.exact()[m] == 3 * r1.exact()[m]);
  // Zero reference coefficient falls back to spherical.
  HPFirstQ z = u1;
  z.q[0].back() = 0;
  auto fb = normalize(z, NormalizationPolicy::unit_c1);
  CHECK(fb.normalization_fallback);
}

TEST_CASE("first kind solution satisfies real-axis orthogonality and sign changes") {
  const int n = 5;
  DegreeVector d = DegreeVector::diagonal(n, 2);
  auto f = angelesco_pair(required_order_first_kind(d));
  auto hp = normalize(solve_first_kind<Rational>(f, d), NormalizationPolicy::spherical);
  auto q = [&](std::size_t k, double x) {
    double acc = 0;
    for (std::size_t j = hp.q[k].size(); j-- > 0;) acc = acc * x + hp.q[k][j].get_d();
    return acc;
  };
  using G = boost::math::quadrature::gauss<double, 30>;
  const int top = 2 * n + 2 - 2;
  for (int j = 0; j <= top + 1; ++j) {
    const double I = G::integrate([&](double x) { return q(0, x) * std::pow(x, j); }, -2.0, -1.0) +
                     G::integrate([&](double x) { return q(1, x) * std::pow(x, j); }, 1.0, 2.0);
    if (j <= top)
      CHECK(std::abs(I) <= 1e-10);
    else
      CHECK(std::abs(I) > 1e-6);
  }
  int changes = 0;
  double last = 0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = -2.0 + 4.0 * i / 20000.0;
    const double v = x <= -1.0 ? q(0, x) : (x >= 1.0 ? q(1, x) : 0.0);
    if (v != 0.0) {
      if (last != 0.0 && (v > 0) != (last > 0)) ++changes;
      last = v;
    }
  }
  CHECK(changes >= 2 * n + 2 - 1);
}

TEST_CASE("second kind reduces to Chebyshev for the arcsine measure") {
  for (int n = 1; n <= 10; ++n) {
    std::vector<LaurentSeries> f{expand_markov(MarkovSpec::arcsine(-1, 1), required_order_second_kind(n, 1),
                                               ScalarKind::exact_rational)};
    auto hp = solve_second_kind<Rational>(f, n);
    CHECK(hp.kernel_dim == 1);
    CHECK(hp.P == monic_chebyshev(n));
  }
}

TEST_CASE("second kind defect exactness and rational reproduction") {
  for (int n = 1; n <= 8; ++n) {
    auto f = angelesco_pair(required_order_second_kind(n, 2) + 1);
    auto hp = solve_second_kind<Rational>(f, n);
    CHECK(hp.P.size() == static_cast<std::size_t>(2 * n + 1));
    CHECK(hp.P.back() == 1);
    for (std::size_t k = 0; k < 2; ++k) {
      auto pr = polynomial_multiply(hp.P, f[k]);
      CHECK(pr.polynomial_part == hp.numerators[k]);
      for (int i = 1; i <= n; ++i) CHECK(pr.tail.exact()[static_cast<std::size_t>(i)] == 0);
    }
  }
  std::vector<LaurentSeries> g{pole_at_two(6)};
  auto hp = solve_second_kind<Rational>(g, 1);
  CHECK(hp.P == std::vector<Rational>{-2, 1});
  auto pr = polynomial_multiply(hp.P, g[0]);
  for (const auto& x : pr.tail.exact()) CHECK(x == 0);
}

TEST_CASE("float mode agrees with exact mode") {
  DegreeVector d = DegreeVector::diagonal(6, 2);
  auto f = angelesco_pair(required_order_first_kind(d));
  std::vector<LaurentSeries> fc{f[0].promoted(256), f[1].promoted(256)};
  auto a = normalize(solve_first_kind<Rational>(f, d), NormalizationPolicy::unit_c1);
  auto b = normalize(solve_first_kind<BigComplex>(fc, d), NormalizationPolicy::unit_c1);
  CHECK(b.kernel_dim == 1);
  CHECK(b.achieved_order == a.achieved_order);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < a.q[k].size(); ++j) {
      const double x = a.q[k][j].get_d();
      CHECK((b.q[k][j] - BigComplex(a.q[k][j], 256)).abs().to_double() <= 1e-30 * (1 + std::abs(x)));
    }
  auto s = solve_second_kind<BigComplex>(std::vector<LaurentSeries>{fc[0].truncated(20), fc[1].truncated(20)}, 5);
  auto se = solve_second_kind<Rational>(std::vector<LaurentSeries>{f[0].truncated(20), f[1].truncated(20)}, 5);
  for (std::size_t j = 0; j < se.P.size(); ++j) CHECK((s.P[j] - BigComplex(se.P[j], 256)).abs().to_double() <= 1e-30 * (1 + std::abs(se.P[j].get_d())));
}

TEST_CASE("degenerate kernels are reported and tie-broken by degree") {
  // f_1 = f_2: every (q, -q) pair is in the kernel, so the kernel is large.
  auto f = angelesco_pair(20);
  std::vector<LaurentSeries> same{f[0], f[0]};
  auto hp = solve_first_kind<Rational>(same, DegreeVector{{2, 2}});
  CHECK(hp.kernel_dim > 1);
  // Lexicographically minimal (deg q_2, deg q_1): q_2 is a constant.
  CHECK(hp.q[1][2] == 0);
  CHECK(hp.q[1][1] == 0);
}

TEST_CASE("exact kernel of a small known matrix") {
  std::vector<std::vector<Rational>> rows{{1, 2, 3}, {2, 4, 6}};
  auto k = kernel_exact(rows, 3);
  CHECK(k.size() == 2);
  for (const auto& v : k) CHECK(v[0] + 2 * v[1] + 3 * v[2] == 0);
}
