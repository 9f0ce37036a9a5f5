#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhit/base_process.hpp"
#include "qhit/error.hpp"

using namespace qhit;

namespace {

BaseProcess example_markov() {
  Eigen::Matrix2d q;
  q << 0.9, 0.1, 0.2, 0.8;
  return BaseProcess::markov(q);
}

double sum_all_words(const BaseProcess& proc, int n) {
  const int s = proc.alphabet_size();
  std::vector<int> w(static_cast<std::size_t>(n), 0);
  double total = 0.0;
  while (true) {
    total += base_cylinder_prob(proc, w);
    int i = n;
    while (i > 0 && w[static_cast<std::size_t>(i - 1)] == s - 1) w[static_cast<std::size_t>(--i)] = 0;
    if (i == 0) return total;
    ++w[static_cast<std::size_t>(i - 1)];
  }
}

// max_{i,j} |Q^{g+1}(i,j) / pi(j) - 1|, which is what the ratio reduces to for
// a Markov chain whatever the cylinder ranks.
double psi_closed_form(const BaseProcess& proc, int gap) {
  Eigen::MatrixXd p = proc.transition();
  for (int i = 0; i < gap; ++i) p = p * proc.transition();
  double worst = 0.0;
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) worst = std::max(worst, std::abs(p(i, j) / proc.stationary()(j) - 1.0));
  return worst;
}

}  // namespace

TEST_CASE("sample_window shapes and validation") {
  const auto fair = BaseProcess::bernoulli(Eigen::Vector2d(0.5, 0.5));
  const BaseWindow w = sample_window(fair, 1, 8);
  CHECK(w.size() == 8);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK((w[i] == 0 || w[i] == 1));
  CHECK_THROWS_AS(sample_window(fair, 1, 0), InvalidArgument);
  CHECK_THROWS_AS(BaseProcess::bernoulli(Eigen::Vector2d(1.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(BaseProcess::bernoulli(Eigen::Vector2d(0.6, 0.6)), InvalidArgument);
}

TEST_CASE("windows are reproducible and extend deterministically") {
  const auto proc = example_markov();
  const BaseWindow a = sample_window(proc, 99, 500);
  BaseWindow b(proc, 99);
  b.extend_to(17);
  b.extend_to(230);
  b.extend_to(500);
  CHECK(std::equal(a.symbols().begin(), a.symbols().end(), b.symbols().begin()));
  const BaseWindow s = a.shifted(10);
  CHECK(s.start_index() == 10);
  CHECK(s[0] == a[10]);
}

TEST_CASE("Markov path frequencies match the stationary law") {
  const auto proc = example_markov();
  CHECK(proc.stationary()(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK((proc.stationary().transpose() * proc.transition() - proc.stationary().transpose()).cwiseAbs().maxCoeff() <
        1e-12);
  const std::size_t len = 100000;
  const BaseWindow w = sample_window(proc, 7, len);
  double ones = 0;
  for (std::size_t i = 0; i < len; ++i) ones += w[i];
  // Asymptotic variance of a two-state occupation frequency: pi0 pi1 (1+l)/(1-l) / N, l = 0.7.
  const double pi1 = 1.0 / 3.0, lambda = 0.7;
  const double sigma = std::sqrt(pi1 * (1 - pi1) * (1 + lambda) / (1 - lambda) / static_cast<double>(len));
  CHECK(std::abs(ones / static_cast<double>(len) - pi1) < 3 * sigma);
}

TEST_CASE("base cylinder probabilities") {
  const auto fair = BaseProcess::bernoulli(Eigen::Vector2d(0.5, 0.5));
  const auto biased = BaseProcess::bernoulli(Eigen::Vector2d(0.3, 0.7));
  const auto markov = example_markov();
  CHECK(base_cylinder_prob(fair, std::vector<int>{0, 1}) == 0.25);
  CHECK(base_cylinder_prob(biased, std::vector<int>{1}) == 0.7);
  CHECK(base_cylinder_prob(markov, std::vector<int>{0, 1}) == doctest::Approx(2.0 / 30.0).epsilon(1e-12));
  CHECK_THROWS_AS(base_cylinder_prob(fair, std::vector<int>{2}), InvalidArgument);
  CHECK_THROWS_AS(base_cylinder_prob(fair, std::vector<int>{}), InvalidArgument);

  Eigen::Matrix3d q3;
  q3 << 0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.25, 0.25, 0.5;
  const auto three = BaseProcess::markov(q3);
  const auto tri = BaseProcess::bernoulli(Eigen::Vector3d(0.2, 0.5, 0.3));
  for (int n = 1; n <= 6; ++n) {
    CHECK(std::abs(sum_all_words(markov, n) - 1.0) < 1e-10);
    CHECK(std::abs(sum_all_words(three, n) - 1.0) < 1e-10);
    CHECK(std::abs(sum_all_words(tri, n) - 1.0) < 1e-10);
  }
}

TEST_CASE("psi mixing coefficient") {
  const auto tri = BaseProcess::bernoulli(Eigen::Vector3d(0.2, 0.5, 0.3));
  for (int gap : {0, 1, 5}) CHECK(psi_mixing_coefficient(tri, gap, 2, 2) == 0.0);

  const auto markov = example_markov();
  const double psi0 = psi_mixing_coefficient(markov, 0, 1, 1);
  CHECK(psi0 == doctest::Approx(psi_closed_form(markov, 0)).epsilon(1e-12));
  // Q(1,1)/pi(1) - 1 = 2.4 - 1 is the largest entry.
  CHECK(psi0 == doctest::Approx(1.4).epsilon(1e-12));
  for (int gap : {0, 3, 9}) {
    CHECK(psi_mixing_coefficient(markov, gap, 2, 3) == doctest::Approx(psi_closed_form(markov, gap)).epsilon(1e-9));
  }

  const double lambda2 = 0.7;
  CHECK(psi_mixing_coefficient(markov, 20, 1, 1) <= psi0 * std::pow(lambda2, 20) * (1 + 1e-6));
  double prev = psi0;
  for (int gap = 1; gap <= 30; ++gap) {
    const double cur = psi_mixing_coefficient(markov, gap, 1, 1);
    CHECK(cur <= prev);
    prev = cur;
  }
  CHECK_THROWS_AS(psi_mixing_coefficient(tri, 0, 12, 12), ResourceLimit);
}
