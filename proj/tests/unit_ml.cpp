#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "ml/kmeans.hpp"
#include "ml/svm.hpp"
#include "ml/tree.hpp"

using namespace ipd;

namespace {

// Two gaussian blobs in d dims, centers at +-offset on every coordinate.
void make_blobs(int n_per, int d, double offset, uint64_t seed, Eigen::MatrixXd& X,
                std::vector<int>& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  X.resize(2 * n_per, d);
  y.assign(static_cast<size_t>(2 * n_per), 0);
  for (int i = 0; i < 2 * n_per; ++i) {
    const int cls = i < n_per ? 1 : -1;
    y[static_cast<size_t>(i)] = cls;
    for (int j = 0; j < d; ++j) X(i, j) = g(rng) + cls * offset;
  }
}

}  // namespace

TEST_CASE("RbfSvm: separates gaussian blobs and serializes exactly") {
  Eigen::MatrixXd X;
  std::vector<int> y;
  make_blobs(40, 4, 2.0, 5, X, y);
  ml::RbfSvm svm;
  ml::SvmConfig cfg;
  cfg.C = 10.0;
  svm.fit(X, y, cfg);
  REQUIRE(svm.fitted());

  int correct = 0;
  for (int i = 0; i < X.rows(); ++i) {
    if (svm.predict(X.row(i).transpose()) == y[static_cast<size_t>(i)]) ++correct;
  }
  CHECK(correct >= 78);  // >= 97.5% on well-separated train data

  // Fresh holdout from the same distribution.
  Eigen::MatrixXd Xt;
  std::vector<int> yt;
  make_blobs(40, 4, 2.0, 6, Xt, yt);
  correct = 0;
  for (int i = 0; i < Xt.rows(); ++i) {
    if (svm.predict(Xt.row(i).transpose()) == yt[static_cast<size_t>(i)]) ++correct;
  }
  CHECK(correct >= 76);

  // predict agrees with the sign of decision.
  for (int i = 0; i < 10; ++i) {
    const double d = svm.decision(Xt.row(i).transpose());
    CHECK(svm.predict(Xt.row(i).transpose()) == (d > 0.0 ? 1 : -1));
  }

  // JSON round-trip preserves the decision function bit for bit.
  const auto j = svm.to_json();
  const ml::RbfSvm back = ml::RbfSvm::from_json(j);
  CHECK(back.gamma() == svm.gamma());
  for (int i = 0; i < Xt.rows(); ++i) {
    CHECK(back.decision(Xt.row(i).transpose()) == svm.decision(Xt.row(i).transpose()));
  }
}

TEST_CASE("RbfSvm: inseparable labels stay near chance, single-class fit throws") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(60, 3);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = g(rng);
    y[static_cast<size_t>(i)] = i % 2 == 0 ? 1 : -1;  // labels independent of X
  }
  ml::RbfSvm svm;
  ml::SvmConfig cfg;
  svm.fit(X, y, cfg);
  Eigen::MatrixXd Xt(40, 3);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 3; ++j) Xt(i, j) = g(rng);
  }
  int pos = 0;
  for (int i = 0; i < 40; ++i) pos += svm.predict(Xt.row(i).transpose()) == 1 ? 1 : 0;
  CHECK(pos >= 2);  // not a constant classifier collapsed by bad training
  CHECK(pos <= 38);

  std::vector<int> ones(60, 1);
  ml::RbfSvm bad;
  CHECK_THROWS(bad.fit(X, ones, cfg));
}

TEST_CASE("median_gamma: 1 / median pairwise squared distance") {
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 3.0;
  // Pairwise squared distances: 1, 9, 4 -> median 4 -> gamma 0.25.
  CHECK(ml::median_gamma(X) == doctest::Approx(0.25));
}

TEST_CASE("kmeans: recovers two separated clusters, deterministic per seed") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 0.3);
  Eigen::MatrixXd X(50, 2);
  for (int i = 0; i < 50; ++i) {
    const double c = i < 25 ? 0.0 : 5.0;
    X(i, 0) = g(rng) + c;
    X(i, 1) = g(rng) - c;
  }
  const ml::KMeansResult r1 = ml::kmeans(X, 2, 13);
  const ml::KMeansResult r2 = ml::kmeans(X, 2, 13);
  CHECK(r1.assignments == r2.assignments);
  CHECK((r1.centroids - r2.centroids).cwiseAbs().maxCoeff() == 0.0);

  // All of the first 25 share one label and the rest the other.
  for (int i = 1; i < 25; ++i) CHECK(r1.assignments[static_cast<size_t>(i)] == r1.assignments[0]);
  for (int i = 26; i < 50; ++i) {
    CHECK(r1.assignments[static_cast<size_t>(i)] == r1.assignments[25]);
  }
  CHECK(r1.assignments[0] != r1.assignments[25]);

  // Centroids sit near the true means and each point is closest to its own centroid.
  for (int i = 0; i < 50; ++i) {
    const int a = r1.assignments[static_cast<size_t>(i)];
    const double own = (X.row(i) - r1.centroids.row(a)).squaredNorm();
    const double other = (X.row(i) - r1.centroids.row(1 - a)).squaredNorm();
    CHECK(own <= other);
  }
}

TEST_CASE("kmeans: duplicate points leave surplus clusters empty") {
  Eigen::MatrixXd X(6, 2);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = 1.5;
    X(i, 1) = -2.0;
  }
  const ml::KMeansResult r = ml::kmeans(X, 2, 13);
  // One cluster takes everything; the other is empty.
  for (int i = 1; i < 6; ++i) CHECK(r.assignments[static_cast<size_t>(i)] == r.assignments[0]);
}

TEST_CASE("DecisionTree: classification fits an axis-aligned rule") {
  // y = 1 iff x0 > 0.5, one clean split suffices.
  Eigen::MatrixXd X(30, 2);
  std::vector<int> y(30);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    X(i, 0) = u(rng);
    X(i, 1) = u(rng);
    y[static_cast<size_t>(i)] = X(i, 0) > 0.5 ? 1 : 0;
  }
  ml::DecisionTree tree;
  ml::TreeConfig cfg;
  cfg.min_samples_leaf = 1;
  tree.fit_classification(X, y, cfg);
  for (int i = 0; i < 30; ++i) {
    const double p = tree.predict(X.row(i).transpose());
    CHECK((p >= 0.5 ? 1 : 0) == y[static_cast<size_t>(i)]);
  }
}

TEST_CASE("DecisionTree: regression reproduces piecewise-constant targets") {
  Eigen::MatrixXd X(20, 1);
  Eigen::VectorXd t(20), h = Eigen::VectorXd::Ones(20);
  for (int i = 0; i < 20; ++i) {
    X(i, 0) = i;
    t(i) = i < 10 ? -1.5 : 2.5;
  }
  ml::DecisionTree tree;
  ml::TreeConfig cfg;
  cfg.min_samples_leaf = 1;
  tree.fit_regression(X, t, h, cfg);
  // Leaves carry L2-regularized Newton weights: sum(target) / (sum(weight) + 1).
  CHECK(tree.predict(Eigen::VectorXd::Constant(1, 3.0)) == doctest::Approx(-15.0 / 11.0));
  CHECK(tree.predict(Eigen::VectorXd::Constant(1, 15.0)) == doctest::Approx(25.0 / 11.0));
}

TEST_CASE("RandomForest and GradientBoostedTrees: blobs, probabilities, determinism") {
  Eigen::MatrixXd X;
  std::vector<int> y01;
  {
    std::vector<int> ypm;
    make_blobs(30, 3, 2.0, 41, X, ypm);
    for (int v : ypm) y01.push_back(v == 1 ? 1 : 0);
  }
  ml::RandomForest rf1, rf2;
  ml::RandomForest::Config rf_cfg;
  rf_cfg.n_trees = 30;
  rf1.fit(X, y01, rf_cfg);
  rf2.fit(X, y01, rf_cfg);
  int correct = 0;
  for (int i = 0; i < X.rows(); ++i) {
    const double p = rf1.predict_proba(X.row(i).transpose());
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(rf1.predict_proba(X.row(i).transpose()) == rf2.predict_proba(X.row(i).transpose()));
    if (rf1.predict(X.row(i).transpose()) == y01[static_cast<size_t>(i)]) ++correct;
  }
  CHECK(correct >= 57);

  ml::GradientBoostedTrees gbt1, gbt2;
  ml::GradientBoostedTrees::Config gb_cfg;
  gb_cfg.n_rounds = 40;
  gbt1.fit(X, y01, gb_cfg);
  gbt2.fit(X, y01, gb_cfg);
  correct = 0;
  for (int i = 0; i < X.rows(); ++i) {
    const double p = gbt1.predict_proba(X.row(i).transpose());
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(gbt1.predict_proba(X.row(i).transpose()) == gbt2.predict_proba(X.row(i).transpose()));
    if (gbt1.predict(X.row(i).transpose()) == y01[static_cast<size_t>(i)]) ++correct;
  }
  CHECK(correct >= 57);
}
