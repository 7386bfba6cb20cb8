#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "lisr/libsvm.hpp"
#include "lisr/logistic.hpp"
#include "lisr/quadratic.hpp"
#include "support.hpp"

using namespace lisr;
using test_support::fd_gradient;
using test_support::fd_hessian;
using test_support::random_vector;

namespace {

/* Relative check scaled by 1 + the reference norm, so tiny references do not
   inflate the bound. */
bool close_rel(const Vector& got, const Vector& want, double tol) {
  return (got - want).norm() <= tol * (1.0 + want.norm());
}

bool close_rel(const Matrix& got, const Matrix& want, double tol) {
  return (got - want).norm() <= tol * (1.0 + want.norm());
}

/* Two-feature logistic instance with a hand-computable smoothness profile:
   row 0 has norm exactly 2, so L = lambda + 1 and the Hessian Lipschitz
   bound is 8 / (6 sqrt 3). */
LogisticProblem two_row_logistic(double lambda = 1e-3) {
  LogisticProblem p;
  p.features = Matrix::Zero(2, 3);
  p.features(0, 0) = 2.0;
  p.features(1, 1) = 1.0;
  p.features(1, 2) = 0.5;
  p.labels = {1, -1};
  p.lambda = lambda;
  return p;
}

}  // namespace

TEST_CASE("generate_quadratic is bit-reproducible from the seed") {
  const QuadraticProblem p1 = generate_quadratic(7, 6, 3.0, 99);
  const QuadraticProblem p2 = generate_quadratic(7, 6, 3.0, 99);
  REQUIRE(p1.n == p2.n);
  for (int i = 0; i < p1.n; ++i) {
    REQUIRE(p1.a[i] == p2.a[i]);
    REQUIRE(p1.b[i] == p2.b[i]);
  }
  // a different seed must actually change the draw
  const QuadraticProblem p3 = generate_quadratic(7, 6, 3.0, 100);
  REQUIRE(p1.a[0] != p3.a[0]);
}

TEST_CASE("generate_quadratic rejects bad shapes") {
  REQUIRE_THROWS_AS(generate_quadratic(5, 7, 4.0, 1), InvalidDimension);
  REQUIRE_THROWS_AS(generate_quadratic(5, 0, 4.0, 1), InvalidDimension);
  REQUIRE_THROWS_AS(generate_quadratic(0, 4, 4.0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(generate_quadratic(5, 4, 0.0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(generate_quadratic(5, 4, -2.0, 1), std::invalid_argument);
}

TEST_CASE("generated diagonals respect the half/half spectral ranges") {
  const double xi = 4.0;
  const double hi = std::pow(10.0, xi / 2.0);
  const double lo = std::pow(10.0, -xi / 2.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const QuadraticProblem p = generate_quadratic(5, 6, xi, seed);
    for (int i = 0; i < p.n; ++i) {
      for (int j = 0; j < p.d; ++j) {
        REQUIRE(p.a[i][j] >= lo);
        REQUIRE(p.a[i][j] <= hi);
        if (j < p.d / 2)
          REQUIRE(p.a[i][j] >= 1.0);
        else
          REQUIRE(p.a[i][j] <= 1.0);
        REQUIRE(p.b[i][j] >= 0.0);
        REQUIRE(p.b[i][j] <= 1.0e3);
      }
    }
  }
}

TEST_CASE("averaged Hessian of the n=1000 instance is conditioned around 1e2") {
  const QuadraticProblem p = generate_quadratic(1000, 50, 4.0, 42);
  Vector mean = Vector::Zero(p.d);
  for (const Vector& a : p.a) mean += a;
  mean /= static_cast<double>(p.n);
  const double kappa = mean.maxCoeff() / mean.minCoeff();
  REQUIRE(kappa >= 1.0e2);
  REQUIRE(kappa <= 1.0e3);
}

TEST_CASE("quadratic oracle matches the closed forms") {
  const QuadraticProblem p = generate_quadratic(6, 8, 3.0, 17);
  const QuadraticOracle oracle(p);
  REQUIRE(oracle.component_count() == 6);
  REQUIRE(oracle.dim() == 8);

  SplitMix64 rng(5);
  const Vector x = random_vector(rng, 8, -2.0, 2.0);
  const Vector y = random_vector(rng, 8, -2.0, 2.0);
  for (int i = 0; i < p.n; ++i) {
    // gradient at the origin is the linear term alone
    REQUIRE(oracle.gradient(i, Vector::Zero(8)) == p.b[i]);
    // the Hessian is constant in x
    REQUIRE(oracle.hessian(i, x).mat() == oracle.hessian(i, y).mat());
    REQUIRE(oracle.hessian(i, x).mat() == Matrix(p.a[i].asDiagonal()));
    // column and diagonal access agree with the full matrix bit for bit
    const SymMatrix h = oracle.hessian(i, x);
    REQUIRE(oracle.hessian_diagonal(i, x) == h.diagonal());
    for (int c = 0; c < p.d; ++c) REQUIRE(oracle.hessian_column(i, x, c) == Vector(h.mat().col(c)));
    const double want = 0.5 * x.dot(p.a[i].cwiseProduct(x)) + p.b[i].dot(x);
    REQUIRE(oracle.value(i, x) == Catch::Approx(want).epsilon(1e-14));
  }

  double mn = p.a[0].minCoeff(), mx = p.a[0].maxCoeff();
  for (const Vector& a : p.a) {
    mn = std::min(mn, a.minCoeff());
    mx = std::max(mx, a.maxCoeff());
  }
  REQUIRE(oracle.strong_convexity() == mn);
  REQUIRE(oracle.smoothness() == mx);
  REQUIRE(oracle.hessian_lipschitz() == 0.0);
}

TEST_CASE("quadratic exact optimum is stationary for the averaged objective") {
  const QuadraticProblem p = generate_quadratic(12, 10, 4.0, 8);
  const QuadraticOracle oracle(p);
  const Vector star = *oracle.exact_optimum();
  Vector bsum = Vector::Zero(p.d);
  for (const Vector& b : p.b) bsum += b;
  REQUIRE(oracle.full_gradient(star).norm() <= 1e-10 * bsum.norm() / p.n);
}

TEST_CASE("quadratic snapshot round-trips bit for bit") {
  const QuadraticProblem p = generate_quadratic(4, 6, 2.5, 1234);
  std::ostringstream first;
  save_quadratic(p, first);
  std::istringstream in(first.str());
  const QuadraticProblem q = load_quadratic(in);
  REQUIRE(q.n == p.n);
  REQUIRE(q.d == p.d);
  REQUIRE(q.xi == p.xi);
  REQUIRE(q.seed == p.seed);
  for (int i = 0; i < p.n; ++i) {
    REQUIRE(q.a[i] == p.a[i]);
    REQUIRE(q.b[i] == p.b[i]);
  }
  std::ostringstream second;
  save_quadratic(q, second);
  REQUIRE(second.str() == first.str());

  std::istringstream junk("not-a-snapshot 1\n");
  REQUIRE_THROWS_AS(load_quadratic(junk), ParseError);
}

TEST_CASE("logistic oracle values and gradients at the origin") {
  const LogisticOracle oracle(two_row_logistic());
  const Vector zero = Vector::Zero(3);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(oracle.value(i, zero) == Catch::Approx(std::log(2.0)).epsilon(1e-15));
    const Vector want =
        Vector(-0.5 * oracle.problem().labels[i] * oracle.problem().features.row(i).transpose());
    REQUIRE(oracle.gradient(i, zero) == want);
  }
}

TEST_CASE("logistic constants follow the documented bounds") {
  const double lambda = 1e-3;
  const LogisticOracle oracle(two_row_logistic(lambda));
  REQUIRE(oracle.strong_convexity() == lambda);
  // max ||z_i||^2 = 4 exactly, so L = lambda + 1
  REQUIRE(oracle.smoothness() == Catch::Approx(lambda + 1.0).epsilon(1e-15));
  REQUIRE(*oracle.hessian_lipschitz() ==
          Catch::Approx(8.0 / (6.0 * std::sqrt(3.0))).epsilon(1e-15));

  const DerivedConstants c = problem_constants(oracle);
  REQUIRE(c.mu == lambda);
  REQUIRE(c.kappa == Catch::Approx(c.L / c.mu).epsilon(1e-15));
  REQUIRE(c.M == Catch::Approx(c.L_tilde / std::pow(lambda, 1.5)).epsilon(1e-12));
}

TEST_CASE("logistic Hessian spectrum stays in the rank-1-plus-ridge band") {
  const LogisticProblem p = synthetic_logistic(8, 5, 31, 1e-2);
  const LogisticOracle oracle(p);
  SplitMix64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_vector(rng, 5, -3.0, 3.0);
    const int i = trial % 8;
    Eigen::SelfAdjointEigenSolver<Matrix> es(oracle.hessian(i, x).mat());
    const double znorm2 = p.features.row(i).squaredNorm();
    REQUIRE(es.eigenvalues().minCoeff() >= p.lambda - 1e-10);
    REQUIRE(es.eigenvalues().maxCoeff() <= p.lambda + znorm2 / 4.0 + 1e-10);
  }
}

TEST_CASE("logistic oracle is overflow-safe at extreme margins") {
  const LogisticOracle oracle(two_row_logistic());
  for (double sign : {1.0, -1.0}) {
    const Vector x = Vector::Constant(3, sign * 1e4);
    for (int i = 0; i < 2; ++i) {
      REQUIRE(std::isfinite(oracle.value(i, x)));
      REQUIRE(oracle.gradient(i, x).allFinite());
      REQUIRE(oracle.hessian(i, x).mat().allFinite());
    }
  }
}

TEST_CASE("logistic column and diagonal access match the full Hessian bitwise") {
  const LogisticProblem p = synthetic_logistic(6, 7, 11, 1e-2);
  const LogisticOracle oracle(p);
  SplitMix64 rng(3);
  const Vector x = random_vector(rng, 7);
  for (int i = 0; i < 6; ++i) {
    const SymMatrix h = oracle.hessian(i, x);
    REQUIRE(oracle.hessian_diagonal(i, x) == h.diagonal());
    for (int c = 0; c < 7; ++c) REQUIRE(oracle.hessian_column(i, x, c) == Vector(h.mat().col(c)));
  }
}

TEST_CASE("logistic oracle rejects malformed problems") {
  LogisticProblem p = two_row_logistic();
  p.labels = {1, 2};
  REQUIRE_THROWS_AS(LogisticOracle(p), std::invalid_argument);
  p = two_row_logistic();
  p.labels = {1};
  REQUIRE_THROWS_AS(LogisticOracle(p), std::invalid_argument);
  p = two_row_logistic();
  p.lambda = 0.0;
  REQUIRE_THROWS_AS(LogisticOracle(p), std::invalid_argument);
}

TEST_CASE("synthetic_logistic rows stay inside the norm-2 ball") {
  for (std::uint64_t seed : {0ull, 9ull, 42ull}) {
    const LogisticProblem p = synthetic_logistic(30, 12, seed, 1e-3);
    for (int i = 0; i < 30; ++i) {
      REQUIRE(p.features.row(i).norm() <= 2.0);
      REQUIRE((p.labels[i] == 1 || p.labels[i] == -1));
    }
  }
  const LogisticProblem p1 = synthetic_logistic(10, 4, 5, 1e-2);
  const LogisticProblem p2 = synthetic_logistic(10, 4, 5, 1e-2);
  REQUIRE(p1.features == p2.features);
  REQUIRE(p1.labels == p2.labels);
  REQUIRE_THROWS_AS(synthetic_logistic(0, 4, 1, 1e-2), InvalidDimension);
  REQUIRE_THROWS_AS(synthetic_logistic(4, 4, 1, 0.0), std::invalid_argument);
}

TEST_CASE("problem_constants on quadratics and oracles without a Hessian bound") {
  const QuadraticOracle oracle(generate_quadratic(5, 4, 2.0, 7));
  const DerivedConstants c = problem_constants(oracle);
  REQUIRE(c.L_tilde == 0.0);
  REQUIRE(c.M == 0.0);
  REQUIRE(c.kappa == c.L / c.mu);

  // an oracle that cannot bound the Hessian variation cannot feed the scaler
  struct NoBound final : ObjectiveOracle {
    int component_count() const override { return 1; }
    int dim() const override { return 2; }
    double value(int, const Vector& x) const override { return 0.5 * x.squaredNorm(); }
    Vector gradient(int, const Vector& x) const override { return x; }
    SymMatrix hessian(int, const Vector&) const override { return SymMatrix::identity(2); }
    Vector hessian_column(int, const Vector&, int col) const override {
      return Vector::Unit(2, col);
    }
    Vector hessian_diagonal(int, const Vector&) const override { return Vector::Ones(2); }
    double strong_convexity() const override { return 1.0; }
    double smoothness() const override { return 1.0; }
  } stub;
  REQUIRE_THROWS_AS(problem_constants(stub), MissingConstants);
}

TEST_CASE("gradients and Hessians match finite differences over 100 points") {
  const QuadraticOracle quad(generate_quadratic(10, 8, 4.0, 3));
  const LogisticOracle logi(synthetic_logistic(20, 8, 5, 1e-2));
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector xq = random_vector(rng, 8, -2.0, 2.0);
    const int iq = trial % quad.component_count();
    const double hq = 1e-5 * (1.0 + xq.norm());
    REQUIRE(close_rel(fd_gradient(quad, iq, xq, hq), quad.gradient(iq, xq), 1e-6));
    REQUIRE(close_rel(fd_hessian(quad, iq, xq), quad.hessian(iq, xq).mat(), 1e-5));

    const Vector xl = random_vector(rng, 8, -2.0, 2.0);
    const int il = trial % logi.component_count();
    const double hl = 1e-5 * (1.0 + xl.norm());
    REQUIRE(close_rel(fd_gradient(logi, il, xl, hl), logi.gradient(il, xl), 1e-6));
    REQUIRE(close_rel(fd_hessian(logi, il, xl), logi.hessian(il, xl).mat(), 1e-5));
  }
}

TEST_CASE("parse_libsvm reads the interchange format") {
  std::istringstream in(
      "1 1:0.5 3:-2\n"
      "0 2:1\n"
      "+1 1:2\n"
      "-1 1:3\n");
  const LibsvmData data = parse_libsvm(in);
  REQUIRE(data.rows.size() == 4);
  REQUIRE(data.labels == std::vector<int>{1, -1, 1, -1});
  REQUIRE(data.max_index == 3);
  REQUIRE(data.rows[0] ==
          std::vector<std::pair<int, double>>{{1, 0.5}, {3, -2.0}});
  REQUIRE(data.rows[1] == std::vector<std::pair<int, double>>{{2, 1.0}});

  const LogisticProblem p = to_logistic(data, 1e-3);
  REQUIRE(p.features.rows() == 4);
  REQUIRE(p.features.cols() == 3);
  REQUIRE(p.features(0, 0) == 0.5);
  REQUIRE(p.features(0, 1) == 0.0);
  REQUIRE(p.features(0, 2) == -2.0);
}

TEST_CASE("parse_libsvm skips blanks and comments") {
  std::istringstream in(
      "# leading comment\n"
      "\n"
      "1 1:1 # trailing comment\n"
      "   \n"
      "0 1:2\n");
  const LibsvmData data = parse_libsvm(in);
  REQUIRE(data.rows.size() == 2);
  REQUIRE(data.labels == std::vector<int>{1, -1});
  // a label-only record carries an empty feature row
  std::istringstream bare("1\n");
  REQUIRE(parse_libsvm(bare).rows[0].empty());
}

TEST_CASE("parse_libsvm reports malformed lines with their numbers") {
  const auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_libsvm(in);
    } catch (const ParseError& e) {
      return e.line;
    }
    return -1;
  };
  REQUIRE(line_of("1 3:1 2:1\n") == 1);               // non-increasing indices
  REQUIRE(line_of("1 1:1\n2 1:1\n") == 2);            // label outside the set
  REQUIRE(line_of("1 1:1\n0 2:2\n1 1:abc\n") == 3);   // unparsable value
  REQUIRE(line_of("1 :5\n") == 1);                    // empty index
  REQUIRE(line_of("1 4:\n") == 1);                    // empty value
  REQUIRE(line_of("1 0:1\n") == 1);                   // 1-based indices
  REQUIRE(line_of("1 1:1 1:2\n") == 1);               // repeated index
}

TEST_CASE("libsvm round-trip is the identity") {
  std::istringstream in(
      "1 1:0.1 2:1e-3 5:-2.5e17\n"
      "0 3:0.30000000000000004\n"
      "-1 1:-0 4:12345.6789\n");
  const LibsvmData first = parse_libsvm(in);
  std::ostringstream text1;
  write_libsvm(first, text1);
  std::istringstream back(text1.str());
  const LibsvmData second = parse_libsvm(back);
  REQUIRE(second.labels == first.labels);
  REQUIRE(second.rows == first.rows);
  std::ostringstream text2;
  write_libsvm(second, text2);
  REQUIRE(text2.str() == text1.str());
}

TEST_CASE("to_logistic honors and validates the dimension override") {
  std::istringstream in("1 2:1\n0 3:5\n");
  const LibsvmData data = parse_libsvm(in);
  REQUIRE(to_logistic(data, 1e-3).features.cols() == 3);
  REQUIRE(to_logistic(data, 1e-3, 6).features.cols() == 6);
  REQUIRE_THROWS_AS(to_logistic(data, 1e-3, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(to_logistic(LibsvmData{}, 1e-3), std::invalid_argument);
}
