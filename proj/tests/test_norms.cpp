#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "polylab/errors.hpp"
#include "polylab/norms.hpp"
#include "test_oracles.hpp"

using namespace polylab;

namespace {

Vector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (double& x : v) x = g(rng);
  return v;
}

bool is_partition(const PartitionCertificate& c, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& b : c.blocks)
    for (std::size_t i : b) {
      if (i >= n) return false;
      ++seen[i];
    }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

Vector add(const Vector& a, const Vector& b) {
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

Vector scale(const Vector& a, double s) {
  Vector c(a);
  for (double& v : c) v *= s;
  return c;
}

}  // namespace

TEST_CASE("k_norm examples and sandwich") {
  CHECK(k_norm(std::vector{3.0, -1.0, 2.0, 0.0}, 2) == doctest::Approx(std::sqrt(13.0)));
  CHECK(k_norm(std::vector{1.0, 1.0, 1.0, 1.0}, 1) == 1.0);
  CHECK_THROWS_AS(k_norm(std::vector{1.0, 2.0}, 0), std::domain_error);
  CHECK_THROWS_AS(k_norm(std::vector{1.0, 2.0}, 3), std::domain_error);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + rng() % 30, k = 1 + rng() % n;
    const Vector a = random_vector(rng, n);
    const double kn = k_norm(a, k), l2 = norm2(a);
    CHECK(k_norm(a, n) == doctest::Approx(l2));
    CHECK(kn <= l2 + 1e-12);
    CHECK(l2 <= std::sqrt(double(n) / double(k)) * kn + 1e-12);
  }
}

TEST_CASE("ms_norm_brute examples") {
  const auto c = ms_norm_brute(std::vector{1.0, 1.0, 1.0, 1.0}, 2);
  CHECK(c.value == doctest::Approx(2.0 * std::sqrt(2.0)));
  REQUIRE(c.blocks.size() == 2);
  CHECK(c.blocks[0].size() == 2);
  CHECK(c.blocks[1].size() == 2);
  for (std::size_t m : {1, 2, 5}) CHECK(ms_norm_brute(std::vector{1.0, 0.0, 0.0}, m).value == doctest::Approx(1.0));
  const Vector z{0.3, -2.0, 1.5, 0.7};
  CHECK(ms_norm_brute(z, 4).value == doctest::Approx(norm1(z)));
  CHECK(ms_norm_brute(z, 9).value == doctest::Approx(norm1(z)));
  CHECK(ms_norm_brute(z, 1).value == doctest::Approx(norm2(z)));
  CHECK_THROWS_AS(ms_norm_brute(Vector(13, 1.0), 2), SizeError);
  CHECK_THROWS_AS(ms_norm_brute(z, 0), std::domain_error);
}

TEST_CASE("ms_norm_brute matches labelled-assignment enumeration") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 8, m = 1 + rng() % 4;
    const Vector z = random_vector(rng, n);
    const auto c = ms_norm_brute(z, m);
    CHECK(std::abs(c.value - oracle::ms_norm_by_labelling(z, m)) <= 1e-9);
    CHECK(is_partition(c, n));
    CHECK(c.blocks.size() <= m);
  }
}

TEST_CASE("ms_norm_heuristic") {
  CHECK(ms_norm_heuristic(std::vector{1.0, 1.0, 1.0, 1.0}, 2).value == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(ms_norm_heuristic(std::vector{1.0, 0.0, 0.0}, 3).value == doctest::Approx(1.0));
  const Vector z{0.3, -2.0, 1.5, 0.7};
  CHECK(ms_norm_heuristic(z, 1).value == doctest::Approx(norm2(z)));
  std::mt19937_64 rng(23);
  double worst = 1.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 10, m = 1 + rng() % 5;
    const Vector v = random_vector(rng, n);
    const auto h = ms_norm_heuristic(v, m);
    const auto b = ms_norm_brute(v, m);
    CHECK(is_partition(h, n));
    CHECK(h.value <= b.value + 1e-9);
    worst = std::min(worst, h.value / b.value);
  }
  MESSAGE("heuristic / exact worst ratio: " << worst);
}

TEST_CASE("support_cube_cap examples") {
  CHECK(support_cube_cap(std::vector{2.0, 1.0}, 1.0) == doctest::Approx(std::sqrt(5.0)));
  CHECK(support_cube_cap(std::vector{1.0, 1.0, 1.0}, std::sqrt(2.0)) == doctest::Approx(std::sqrt(6.0)));
  const Vector z{0.3, -2.0, 1.5, 0.7};
  CHECK(support_cube_cap(z, 2.0) == doctest::Approx(norm1(z)));
  CHECK(support_cube_cap(z, 5.0) == doctest::Approx(norm1(z)));
  CHECK(support_cube_cap(Vector(3, 0.0), 1.5) == 0.0);
  CHECK_THROWS_AS(support_cube_cap(z, 0.0), std::domain_error);
}

TEST_CASE("support_cube_cap agrees with the primal maximizer") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.2, 4.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + rng() % 8;
    Vector z = random_vector(rng, n);
    if (t % 5 == 0) z[0] = z[n - 1];  // ties
    const double alpha = u(rng);
    const double h = support_cube_cap(z, alpha);
    CHECK(std::abs(h - oracle::cube_cap_support_primal(z, alpha)) <= 1e-9 * (1.0 + h));
    const Vector y = support_cube_cap_maximizer(z, alpha);
    CHECK(norm_inf(y) <= 1.0 + 1e-12);
    CHECK(norm2(y) <= alpha * (1.0 + 1e-12));
    CHECK(std::abs(dot(z, y) - h) <= 1e-9 * (1.0 + h));
  }
}

TEST_CASE("Montgomery-Smith bound and constructive partition") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 10;
    const Vector x = random_vector(rng, n);
    const double alpha = 1.0 + u01(rng) * (std::sqrt(double(n)) - 1.0);
    const auto m = static_cast<std::size_t>(std::ceil(1.0 + 4.0 * alpha * alpha));
    const double h = support_cube_cap(x, alpha);
    CHECK(h <= ms_norm_brute(x, m).value + 1e-6);
  }
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const Vector x = random_vector(rng, n);
    const double alpha = 1.0 + u01(rng) * (std::sqrt(double(n)) - 1.0 + 0.5);
    // A feasible witness: random direction clipped to the cube, then into the ball.
    Vector y = random_vector(rng, n);
    for (double& v : y) v = std::clamp(v, -1.0, 1.0);
    const double r = norm2(y);
    if (r > alpha) y = scale(y, alpha / r);
    const auto c = ms_block_partition(y, x, alpha);
    CHECK(is_partition(c, n));
    CHECK(c.blocks.size() <= static_cast<std::size_t>(std::ceil(1.0 + 4.0 * alpha * alpha)));
    CHECK(c.value >= dot(x, y) - 1e-9);
  }
}

TEST_CASE("ms_block_partition examples") {
  const auto a = ms_block_partition(std::vector{1.0, 0.0, 0.0}, std::vector{2.0, -1.0, 3.0}, 1.0);
  REQUIRE(!a.blocks.empty());
  CHECK(std::count(a.blocks.begin(), a.blocks.end(), std::vector<std::size_t>{0}) == 1);
  CHECK(a.value >= 2.0);
  const double s = 1.0 / std::sqrt(2.0);
  const auto b = ms_block_partition(Vector(4, s), Vector(4, 1.0), std::sqrt(2.0));
  CHECK(b.value >= 2.0 * std::sqrt(2.0) - 1e-12);
  CHECK(b.blocks.size() == 4);  // y_k² = 1/2 makes every index a singleton
  CHECK_THROWS_AS(ms_block_partition(std::vector{1.5}, std::vector{1.0}, 2.0), std::domain_error);
  CHECK_THROWS_AS(ms_block_partition(std::vector{1.0, 1.0}, std::vector{1.0, 1.0}, 1.0), std::domain_error);
}

TEST_CASE("norm axioms on random triples") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto body = IntersectionBody::explicit_body(6, 0.4, 1.7);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 6;
    const Vector a = random_vector(rng, n), b = random_vector(rng, n);
    const double s = u(rng);
    const std::vector<std::function<double(const Vector&)>> norms = {
        [](const Vector& v) { return k_norm(v, 3); },
        [](const Vector& v) { return ms_norm_brute(v, 3).value; },
        [](const Vector& v) { return support_cube_cap(v, 1.7); },
        [&](const Vector& v) { return h_L(body, v); },
        [](const Vector& v) { return mixed_norm_kkr(v, 40); },
    };
    for (const auto& f : norms) {
      CHECK(f(add(a, b)) <= f(a) + f(b) + 1e-9);
      CHECK(std::abs(f(scale(a, s)) - std::abs(s) * f(a)) <= 1e-9 * (1.0 + f(a)));
      CHECK(f(a) > 0.0);
      CHECK(f(Vector(n, 0.0)) == 0.0);
    }
  }
}

TEST_CASE("IntersectionBody and h_L") {
  const auto k = small_ball_constants(0.5, 0.5, 1.0);
  const auto body = IntersectionBody::from_constants(20, 400, 0.5, k);
  CHECK(body.alpha == doctest::Approx(std::sqrt(0.5 * std::log(20.0) / k.C_v)));
  CHECK(body.c == doctest::Approx(k.c_uv));
  const auto b = IntersectionBody::explicit_body(2, 0.5, 1.0);
  CHECK(h_L(b, std::vector{2.0, 1.0}) == doctest::Approx(0.5 * std::sqrt(5.0)));
  const auto b3 = IntersectionBody::explicit_body(3, 0.25, std::sqrt(2.0));
  CHECK(h_L(b3, std::vector{1.0, 1.0, 1.0}) == doctest::Approx(0.25 * std::sqrt(6.0)));
  CHECK_THROWS_AS(IntersectionBody::from_constants(20, 20, 0.5, k), std::domain_error);
  CHECK_THROWS_AS(IntersectionBody::from_constants(20, 400, 1.0, k), std::domain_error);
  CHECK_THROWS_AS(IntersectionBody::explicit_body(2, 1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(h_L(b, std::vector{1.0}), std::domain_error);
}

TEST_CASE("sample_boundary_L_polar") {
  const auto body = IntersectionBody::explicit_body(5, 0.3, 1.8);
  const auto pts = sample_boundary_L_polar(body, 1000, 9);
  REQUIRE(pts.size() == 1000);
  double max_l2 = 0.0;
  std::size_t sparse = 0;
  for (const auto& z : pts) {
    CHECK(std::abs(h_L(body, z) - 1.0) <= 1e-9);
    max_l2 = std::max(max_l2, norm2(z));
    sparse += std::count(z.begin(), z.end(), 0.0) > 0;
  }
  CHECK(max_l2 <= 1.0 / body.c + 1e-6);
  CHECK(sparse > 250);
  CHECK(sample_boundary_L_polar(body, 50, 3) == sample_boundary_L_polar(body, 50, 3));

  const auto ball = IntersectionBody::explicit_body(4, 1.0, 1.0);
  for (const auto& z : sample_boundary_L_polar(ball, 200, 1)) CHECK(norm2(z) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sample_boundary_L_polar(body, 0, 1), std::domain_error);
}

TEST_CASE("mixed_norm_kkr") {
  // √ln(eN/n) = 2 when N/n = e³.
  const double ratio = std::exp(3.0);
  const std::size_t n = 1, big_n = static_cast<std::size_t>(std::round(ratio * 1000.0));
  Vector e1(n, 0.0);
  e1[0] = 1.0;
  CHECK(mixed_norm_kkr(e1, big_n) ==
        doctest::Approx(std::sqrt(std::log(std::exp(1.0) * double(big_n)))));
  Vector flat(100, 1.0);
  CHECK(mixed_norm_kkr(flat, 200) == doctest::Approx(10.0));
  const Vector y{0.3, -2.0, 1.5};
  CHECK(mixed_norm_kkr(y, 3) == doctest::Approx(norm2(y)));
  CHECK_THROWS_AS(mixed_norm_kkr(y, 2), std::domain_error);
}
