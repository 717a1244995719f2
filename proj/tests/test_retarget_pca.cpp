#include "fabricore/retarget_pca.hpp"
#include "fabricore/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace testing;

TEST_CASE("saturation")
{
  const Eigen::VectorXd lo = Eigen::Vector2d(-1, 0.2), hi = Eigen::Vector2d(2, 1.4);
  CHECK((saturate<double>(Eigen::Vector2d::Zero(), lo, hi) - 0.5 * (lo + hi)).norm() < 1e-15);
  CHECK((saturate<double>(Eigen::Vector2d::Constant(50), lo, hi) - hi).norm() < 1e-12);
  CHECK((saturate_derivative<double>(Eigen::Vector2d::Zero(), lo, hi) - 0.5 * (hi - lo)).norm() < 1e-15);
  const Eigen::VectorXd q = Eigen::Vector2d(0.3, 0.9);
  CHECK((saturate<double>(unsaturate<double>(q, lo, hi), lo, hi) - q).norm() < 1e-12);
}

TEST_CASE("retarget loss")
{
  const auto hand_model = io::load_model(source_path("configs/hand16.json"));
  auto cfg = RetargetConfig<double>::allegro_defaults();
  const RetargetHand<double> hand(hand_model, cfg.fingertips);
  std::mt19937_64 rng(2);
  const Eigen::VectorXd q_free = uniform(rng, 16, -1, 1);
  const auto& lim = hand_model.limits();
  const Eigen::VectorXd x_r = hand.tips(saturate(q_free, lim.lower, lim.upper));

  SUBCASE("exactly achievable human points give zero loss")
  {
    cfg.regularization = 0;
    CHECK(retarget_loss<double>(q_free, Eigen::VectorXd(x_r / cfg.scale), 1.0, GripType::power, cfg, hand) ==
          doctest::Approx(0.0).epsilon(1e-24));
  }
  SUBCASE("gamma = 0 is the closure objective")
  {
    cfg.regularization = 0;
    Eigen::VectorXd x_c(12);
    for (int i = 0; i < 4; ++i) x_c.segment<3>(3 * i) = cfg.focal_precision;
    const Eigen::VectorXd x_h = uniform(rng, 12, -0.1, 0.1);
    CHECK(retarget_loss<double>(q_free, x_h, 0.0, GripType::precision, cfg, hand) ==
          doctest::Approx((x_r - x_c).squaredNorm()).epsilon(1e-14));
  }
  SUBCASE("regulariser is unsquared and zero at q_reg")
  {
    const Eigen::VectorXd x_h = x_r / cfg.scale;
    const double base = retarget_loss<double>(q_free, x_h, 1.0, GripType::power, cfg, hand);
    const Eigen::VectorXd q_r = saturate(q_free, lim.lower, lim.upper);
    CHECK(base == doctest::Approx(cfg.regularization * (q_r - cfg.q_reg_power).norm()).epsilon(1e-12));
  }
}

TEST_CASE("adam")
{
  AdamParams<double> p;
  p.learning_rate = 0.1;
  p.iterations = 500;
  std::function<double(const Eigen::VectorXd&)> f = [](const Eigen::VectorXd& x) { return (x[0] - 3) * (x[0] - 3); };
  CHECK(std::abs(adam_minimize<double>(f, Eigen::VectorXd::Zero(1), p).x[0] - 3) < 1e-3);

  std::function<double(const Eigen::VectorXd&)> bowl = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  CHECK(adam_minimize<double>(bowl, Eigen::VectorXd::Constant(4, 2.0), p).x.norm() < 1e-2);
  CHECK(adam_minimize<double>(bowl, Eigen::VectorXd::Zero(4), p).x.norm() == 0.0);

  std::function<double(const Eigen::VectorXd&)> bad = [](const Eigen::VectorXd& x) { return std::log(x[0]); };
  CHECK_THROWS(adam_minimize<double>(bad, Eigen::VectorXd::Constant(1, 0.01), p));
}

TEST_CASE("blend factor")
{
  CHECK(blend_factor<double>(0, 2) == 0.5);
  CHECK(blend_factor<double>(1, 2) == 0.0);
  CHECK(blend_factor<double>(29, 30) == 0.0);
}

TEST_CASE("retarget_trace")
{
  const auto hand_model = io::load_model(source_path("configs/hand16.json"));
  auto cfg = RetargetConfig<double>::allegro_defaults();
  const RetargetHand<double> hand(hand_model, cfg.fingertips);
  const auto max_delta = [](const Eigen::MatrixXd& out) {
    double worst = 0;
    for (Eigen::Index i = 1; i < out.rows(); ++i) worst = std::max(worst, (out.row(i) - out.row(i - 1)).cwiseAbs().maxCoeff());
    return worst;
  };
  SUBCASE("a constant trace at the closure point gives a near-constant joint trajectory")
  {
    // Matching and closure targets coincide, so every frame solves the same problem.
    HumanGraspTrace<double> trace;
    trace.grip = GripType::precision;
    trace.points = cfg.focal_precision.transpose().replicate(30, 4) / cfg.scale;
    const Eigen::MatrixXd out = retarget_trace(trace, hand, cfg);
    CHECK(out.rows() == 30);
    MESSAGE("max frame-to-frame delta " << max_delta(out));
    CHECK(max_delta(out) < 0.05);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      CHECK((out.row(i).transpose().array() >= hand_model.limits().lower.array()).all());
      CHECK((out.row(i).transpose().array() <= hand_model.limits().upper.array()).all());
    }
  }
  SUBCASE("a constant trace elsewhere drifts only through the blend")
  {
    Eigen::VectorXd q = Eigen::VectorXd::Constant(16, 0.4);
    q.tail<4>() << 0.8, 0.4, 0.3, 0.3;
    HumanGraspTrace<double> trace;
    trace.points = hand.tips(q).transpose().replicate(30, 1) / cfg.scale;
    const double d = max_delta(retarget_trace(trace, hand, cfg));
    MESSAGE("max frame-to-frame delta with a moving blend " << d);
    CHECK(d < 0.1);
  }
  SUBCASE("malformed traces are rejected")
  {
    HumanGraspTrace<double> one;
    one.points = Eigen::MatrixXd::Zero(1, 12);
    CHECK_THROWS_AS(retarget_trace(one, hand, cfg), ConfigError);
    HumanGraspTrace<double> wide;
    wide.points = Eigen::MatrixXd::Zero(3, 9);
    CHECK_THROWS_AS(retarget_trace(wide, hand, cfg), ConfigError);
  }
}

TEST_CASE("pca")
{
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  SUBCASE("samples on a line")
  {
    const Eigen::VectorXd dir = uniform(rng, 16, -1, 1).normalized(), mean = uniform(rng, 16, -1, 1);
    Eigen::MatrixXd data(50, 16);
    for (int i = 0; i < 50; ++i) data.row(i) = (mean + g(rng) * dir).transpose();
    const auto b = fit_pca<double>(data, 5);
    CHECK(std::abs(std::abs(b.components.row(0).dot(dir)) - 1) < 1e-10);
    CHECK(b.explained_variance_ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("isotropic samples spread variance evenly")
  {
    Eigen::MatrixXd data(100000, 16);
    for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = g(rng);
    const auto b = fit_pca<double>(data, 5);
    CHECK(b.explained_variance_ratio == doctest::Approx(5.0 / 16.0).epsilon(0.03));
  }
  SUBCASE("orthonormal rows and the reconstruction identity")
  {
    Eigen::MatrixXd mix = Eigen::MatrixXd::Random(16, 16);
    Eigen::MatrixXd latent(400, 16);
    for (Eigen::Index i = 0; i < latent.size(); ++i) latent.data()[i] = g(rng);
    const Eigen::MatrixXd data = latent * mix;
    const auto b = fit_pca<double>(data, 5);
    CHECK((b.components * b.components.transpose() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);

    // Oracle: eigendecomposition of the covariance, done here without the library.
    const Eigen::RowVectorXd mu = data.colwise().mean();
    const Eigen::MatrixXd c = data.rowwise() - mu;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.transpose() * c / 400.0);
    const double discarded = eig.eigenvalues().head(11).sum();
    CHECK(std::abs(reconstruction_error(b, data) - discarded) <= 1e-8);
    const Eigen::MatrixXd residual = c - c * b.components.transpose() * b.components;
    CHECK(std::abs(residual.squaredNorm() / (400.0 * 11.0) - eig.eigenvalues().head(11).mean()) <= 1e-8);
    CHECK((b.eigenvalues.reverse() - eig.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("projection round trip")
  {
    Eigen::MatrixXd data = Eigen::MatrixXd::Random(40, 16);
    const auto b = fit_pca<double>(data, 16);
    const Eigen::VectorXd q = data.row(3).transpose();
    CHECK((b.reconstruct(b.project(q)) - q).norm() < 1e-12);
  }
  CHECK_THROWS_AS(fit_pca<double>(Eigen::MatrixXd::Random(3, 16), 5), ConfigError);
  CHECK_THROWS_AS(fit_pca<double>(Eigen::MatrixXd::Random(30, 16), 0), ConfigError);
}

TEST_CASE("synthetic traces")
{
  const auto hand_model = io::load_model(source_path("configs/hand16.json"));
  const auto cfg = RetargetConfig<double>::allegro_defaults();
  env::Rng a(5), b(5);
  SyntheticTraceConfig sc;
  sc.traces = 4;
  const auto t1 = generate_synthetic_traces(hand_model, cfg.fingertips, a, sc);
  const auto t2 = generate_synthetic_traces(hand_model, cfg.fingertips, b, sc);
  REQUIRE(t1.size() == 4);
  CHECK(t1[0].grip == GripType::power);
  CHECK(t1[1].grip == GripType::precision);
  CHECK(t1[2].points == t2[2].points);
  CHECK(t1[0].points.cols() == 12);
  // Human-scale points: a robot fingertip sits ~0.15-0.3 m from the palm origin.
  CHECK(t1[0].points.row(0).segment<3>(0).norm() < 0.3 / 1.6 + 0.01);
}
