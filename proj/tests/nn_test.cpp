#include <gtest/gtest.h>

#include <cmath>

#include "dronesafe/nn.hpp"

using namespace dronesafe;

TEST(Mlp, ParameterCount) {
  const Mlp m({13, 64, 64, 7});
  EXPECT_EQ(m.parameter_count(), 13 * 64 + 64 + 64 * 64 + 64 + 64 * 7 + 7);
  EXPECT_EQ(m.input_size(), 13);
  EXPECT_EQ(m.output_size(), 7);
  EXPECT_THROW(Mlp({3}), std::invalid_argument);
  EXPECT_THROW(Mlp({3, 0, 2}), std::invalid_argument);
}

TEST(Mlp, LinearWhenNoHiddenLayer) {
  Mlp m({2, 1});
  m.parameters() << 2.0, -3.0, 0.5;  // W then b
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 0.0, 1.0, 2.0;
  const Eigen::MatrixXd y = m.forward(x);
  EXPECT_DOUBLE_EQ(y(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(y(0, 1), -5.5);
}

TEST(Mlp, InitZeroBiasesAndScaledOutput) {
  Rng rng(3);
  Mlp m({4, 8, 3});
  m.init(rng, 0.0);
  const Eigen::MatrixXd y = m.forward(Eigen::MatrixXd::Random(4, 5));
  EXPECT_EQ(y.cwiseAbs().maxCoeff(), 0.0);
  const double bound = std::sqrt(6.0 / (4 + 8));
  EXPECT_LE(m.parameters().head(32).cwiseAbs().maxCoeff(), bound);
  EXPECT_EQ(m.parameters().segment(32, 8).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mlp, BackwardMatchesFiniteDifferences) {
  Rng rng(11);
  Mlp m({5, 6, 4, 3});
  m.init(rng);
  m.parameters() += 0.1 * Eigen::VectorXd::Random(m.parameter_count());
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 4);
  const Eigen::MatrixXd dout = Eigen::MatrixXd::Random(3, 4);

  Mlp::Tape tape;
  m.forward(x, &tape);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(m.parameter_count());
  m.backward(tape, dout, grad);

  const double h = 1e-6;
  for (Eigen::Index i = 0; i < m.parameter_count(); ++i) {
    Mlp plus = m;
    Mlp minus = m;
    plus.parameters()(i) += h;
    minus.parameters()(i) -= h;
    const double fd = ((plus.forward(x).cwiseProduct(dout)).sum() - (minus.forward(x).cwiseProduct(dout)).sum()) / (2 * h);
    EXPECT_NEAR(grad(i), fd, 1e-7 * std::max(1.0, std::abs(fd))) << "parameter " << i;
  }
}

TEST(Mlp, BackwardAccumulates) {
  Rng rng(5);
  Mlp m({3, 4, 2});
  m.init(rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 2);
  const Eigen::MatrixXd dout = Eigen::MatrixXd::Ones(2, 2);
  Mlp::Tape tape;
  m.forward(x, &tape);
  Eigen::VectorXd once = Eigen::VectorXd::Zero(m.parameter_count());
  m.backward(tape, dout, once);
  Eigen::VectorXd twice = once;
  m.backward(tape, dout, twice);
  EXPECT_LT((twice - 2.0 * once).norm(), 1e-12);
}
