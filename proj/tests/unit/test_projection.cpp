#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "aftrack/corrfilter.hpp"
#include "aftrack/projection.hpp"
#include "oracles.hpp"

using namespace aftrack;

namespace {

FeatureMap single(int cols, int rows, auto&& f) {
  FeatureMap m(cols, rows, 1);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) m.at(0, x, y) = f(x, y);
  }
  return m;
}

// Spatial evaluation of the factorized objective: the filter spectrum is
// brought back to a (possibly complex) spatial filter and applied by direct
// cyclic convolution.
double spatial_objective(const std::vector<FeatureMap>& samples, const std::vector<RealGrid>& labels,
                         const ProjectionMatrix& p, const Spectrum& filter, double filter_reg,
                         double projection_reg) {
  const int cols = filter.cols, rows = filter.rows, nc = filter.channels;
  const std::size_t n = filter.plane_size();
  std::vector<std::vector<Complex>> g(nc);
  for (int c = 0; c < nc; ++c) {
    const auto s = filter.channel(c);
    g[c] = oracle::naive_dft(std::vector<Complex>(s.begin(), s.end()), cols, rows, +1);
    for (auto& v : g[c]) v /= static_cast<double>(n);
  }
  double data = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const FeatureMap z = apply_projection(samples[j], p);
    for (int ty = 0; ty < rows; ++ty) {
      for (int tx = 0; tx < cols; ++tx) {
        Complex acc{};
        for (int c = 0; c < nc; ++c) {
          for (int ny = 0; ny < rows; ++ny) {
            for (int nx = 0; nx < cols; ++nx) {
              acc += g[c][ny * cols + nx] * z.at(c, ((tx - nx) % cols + cols) % cols, ((ty - ny) % rows + rows) % rows);
            }
          }
        }
        data += std::norm(acc - labels[j].at(tx, ty));
      }
    }
  }
  double ge = 0.0;
  for (const auto& ch : g) {
    for (const auto& v : ch) ge += std::norm(v);
  }
  double pe = 0.0;
  for (double v : p.data) pe += v * v;
  return data / static_cast<double>(samples.size()) + filter_reg * ge + projection_reg * pe;
}

struct Instance {
  std::vector<FeatureMap> samples;
  std::vector<RealGrid> labels;
  std::vector<Spectrum> x;
  std::vector<Spectrum> y;
};

Instance make_instance(int cols, int rows, int d, int m, std::mt19937_64& rng) {
  Instance in;
  for (int j = 0; j < m; ++j) {
    in.samples.push_back(oracle::random_features(cols, rows, d, rng));
    in.labels.push_back(gaussian_label(cols, rows, 1.0));
    in.x.push_back(fft2(in.samples.back()));
    in.y.push_back(fft2(in.labels.back()));
  }
  return in;
}

}  // namespace

TEST(Kernel, PartitionOfUnity) {
  const InterpolationKernel k;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double t = u(rng);
    double s = 0.0;
    for (int i = -6; i <= 6; ++i) s += k(t - i);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_EQ(k(0.0), 1.0);
  EXPECT_EQ(k(1.0), 0.0);
  EXPECT_EQ(k(2.0), 0.0);
  for (double t : {0.1, 0.5, 0.9, 1.3, 1.7}) EXPECT_NEAR(k(t), oracle::keys(t), 1e-14);
}

TEST(Resample, SameGridIsIdentity) {
  std::mt19937_64 rng(2);
  const FeatureMap m = oracle::random_features(7, 5, 1, rng);
  const FeatureMap r = resample_channel(m, 7, 5);
  for (std::size_t i = 0; i < m.data.size(); ++i) EXPECT_NEAR(r.data[i], m.data[i], 1e-12);
}

TEST(Resample, ConstantIsPreserved) {
  const FeatureMap m = single(6, 4, [](int, int) { return 2.75; });
  for (auto [c, r] : {std::pair{13, 9}, std::pair{3, 2}, std::pair{1, 1}}) {
    const FeatureMap out = resample_channel(m, c, r);
    for (double v : out.data) EXPECT_NEAR(v, 2.75, 1e-12);
  }
}

TEST(Resample, RampMatchesDirectSummation) {
  std::vector<double> ramp(8);
  for (int i = 0; i < 8; ++i) ramp[i] = i / 7.0;
  const FeatureMap m = single(8, 3, [&](int x, int) { return ramp[x]; });
  const FeatureMap out = resample_channel(m, 16, 3);
  for (int k = 0; k < 16; ++k) {
    const double expected = oracle::interpolate(ramp, (k + 0.5) * 8.0 / 16.0 - 0.5);
    for (int y = 0; y < 3; ++y) EXPECT_NEAR(out.at(0, k, y), expected, 1e-12);
  }
}

TEST(Resample, RandomFieldMatchesSeparableOracle) {
  std::mt19937_64 rng(3);
  const FeatureMap m = oracle::random_features(6, 5, 1, rng);
  const FeatureMap out = resample_channel(m, 11, 8);
  for (int ty = 0; ty < 8; ++ty) {
    const double py = (ty + 0.5) * 5.0 / 8.0 - 0.5;
    for (int tx = 0; tx < 11; ++tx) {
      const double px = (tx + 0.5) * 6.0 / 11.0 - 0.5;
      std::vector<double> column(5);
      for (int y = 0; y < 5; ++y) {
        std::vector<double> row(6);
        for (int x = 0; x < 6; ++x) row[x] = m.at(0, x, y);
        column[y] = oracle::interpolate(row, px);
      }
      EXPECT_NEAR(out.at(0, tx, ty), oracle::interpolate(column, py), 1e-12);
    }
  }
}

TEST(Resample, LinearFieldRoundTrip) {
  const FeatureMap m = single(7, 5, [](int x, int y) { return 0.3 + 1.7 * x - 0.4 * y; });
  const FeatureMap up = resample_channel(m, 13, 11);
  const FeatureMap back = resample_channel(up, 7, 5);
  for (std::size_t i = 0; i < m.data.size(); ++i) EXPECT_NEAR(back.data[i], m.data[i], 1e-9);
}

TEST(Resample, RejectsMultiChannelInput) {
  EXPECT_THROW(resample_channel(FeatureMap(4, 4, 2), 8, 8), std::invalid_argument);
}

TEST(ApplyProjection, IdentityZerosAndDotProduct) {
  std::mt19937_64 rng(4);
  const FeatureMap f = oracle::random_features(5, 4, 6, rng);
  const FeatureMap same = apply_projection(f, ProjectionMatrix::identity(6));
  EXPECT_EQ(same.data, f.data);

  ProjectionMatrix p(6, 2);
  for (double& v : p.data) v = std::normal_distribution<double>()(rng);
  for (double v : apply_projection(FeatureMap(5, 4, 6), p).data) EXPECT_EQ(v, 0.0);

  FeatureMap one(1, 1, 3);
  one.data = {4.0, 5.0, 6.0};
  ProjectionMatrix col(3, 1);
  col.data = {1.0, 2.0, 3.0};
  EXPECT_EQ(apply_projection(one, col).data.at(0), 32.0);
}

TEST(ApplyProjection, Linear) {
  std::mt19937_64 rng(5);
  const FeatureMap a = oracle::random_features(4, 3, 5, rng);
  const FeatureMap b = oracle::random_features(4, 3, 5, rng);
  ProjectionMatrix p(5, 3);
  for (double& v : p.data) v = std::normal_distribution<double>()(rng);
  FeatureMap mix(4, 3, 5);
  for (std::size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = 2.5 * a.data[i] - 0.75 * b.data[i];
  const FeatureMap pa = apply_projection(a, p), pb = apply_projection(b, p), pm = apply_projection(mix, p);
  for (std::size_t i = 0; i < pm.data.size(); ++i) {
    EXPECT_NEAR(pm.data[i], 2.5 * pa.data[i] - 0.75 * pb.data[i], 1e-12);
  }
}

TEST(ApplyProjection, ChannelMismatchThrows) {
  EXPECT_THROW(apply_projection(FeatureMap(2, 2, 3), ProjectionMatrix(4, 2)), std::invalid_argument);
  EXPECT_THROW(apply_projection(Spectrum(2, 2, 3), ProjectionMatrix(4, 2)), std::invalid_argument);
}

TEST(ApplyProjection, FeatureAndFilterReorderingAgree) {
  std::mt19937_64 rng(6);
  const int d = 5, c = 2;
  const FeatureMap z = oracle::random_features(6, 5, d, rng);
  ProjectionMatrix p(d, c);
  for (double& v : p.data) v = std::normal_distribution<double>()(rng);
  const FeatureMap t = oracle::random_features(6, 5, c, rng);
  const Spectrum f = fft2(t);

  // Project the features, or fold the projection into a D-channel filter.
  const ResponseMap a = detect(f, fft2(apply_projection(z, p)));
  Spectrum folded(6, 5, d);
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < c; ++j) {
      for (std::size_t u = 0; u < f.plane_size(); ++u) folded.channel(k)[u] += p.at(k, j) * f.channel(j)[u];
    }
  }
  const ResponseMap b = detect(folded, fft2(z));
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
}

TEST(Pca, ColumnsOrthonormal) {
  std::mt19937_64 rng(7);
  std::vector<FeatureMap> samples{oracle::random_features(6, 6, 8, rng), oracle::random_features(6, 6, 8, rng)};
  const ProjectionMatrix p = pca_projection(samples, 3);
  ASSERT_EQ(p.rows, 8);
  ASSERT_EQ(p.cols, 3);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += p.at(k, a) * p.at(k, b);
      EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(Pca, RankOneDataPutsMassOnLiveChannel) {
  std::mt19937_64 rng(8);
  FeatureMap f = oracle::random_features(5, 5, 2, rng);
  for (double& v : f.channel(1)) v = 0.0;
  std::vector<FeatureMap> samples{f};
  const ProjectionMatrix p = pca_projection(samples, 1);
  EXPECT_NEAR(std::abs(p.at(0, 0)), 1.0, 1e-12);
  EXPECT_LE(std::abs(p.at(1, 0)), 1e-6);

  std::vector<RealGrid> labels{gaussian_label(5, 5, 1.0)};
  const ProjectionResult r = learn_projection(samples, labels, {.c_dim = 1});
  EXPECT_GT(std::abs(r.projection.at(0, 0)), 0.0);
  EXPECT_LE(std::abs(r.projection.at(1, 0)), 1e-6);
}

TEST(Pca, RejectsBadDimension) {
  std::vector<FeatureMap> samples{FeatureMap(3, 3, 4)};
  EXPECT_THROW(pca_projection(samples, 5), std::invalid_argument);
  EXPECT_THROW(pca_projection(samples, 0), std::invalid_argument);
}

TEST(Cg, IdentitySystemConvergesInOneStep) {
  const std::vector<double> b{1.0, -2.0, 3.5, 0.25};
  const CgResult r = cg_solve([](std::span<const double> x, std::span<double> out) {
    std::copy(x.begin(), x.end(), out.begin());
  }, b, 10, 1e-12);
  EXPECT_EQ(r.iterations, 1);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(r.x[i], b[i], 1e-15);
}

TEST(Cg, ZeroRightHandSide) {
  const std::vector<double> b(5, 0.0);
  const CgResult r = cg_solve([](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 3.0 * x[i];
  }, b, 10, 1e-12);
  for (double v : r.x) EXPECT_EQ(v, 0.0);
}

TEST(Cg, MatchesDenseSolve) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(6, 6, [&] { return std::normal_distribution<double>()(rng); });
    const Eigen::MatrixXd a = m * m.transpose() + 0.5 * Eigen::MatrixXd::Identity(6, 6);
    const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(6, [&] { return std::normal_distribution<double>()(rng); });
    const Eigen::VectorXd expected = a.ldlt().solve(b);
    const CgResult r = cg_solve([&](std::span<const double> x, std::span<double> out) {
      Eigen::Map<Eigen::VectorXd>(out.data(), 6) = a * Eigen::Map<const Eigen::VectorXd>(x.data(), 6);
    }, std::span<const double>(b.data(), 6), 100, 1e-10);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.x[i], expected[i], 1e-8);
  }
}

TEST(Cg, NonFiniteOperatorThrows) {
  const std::vector<double> b{1.0, 1.0};
  EXPECT_THROW(cg_solve([](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), std::numeric_limits<double>::quiet_NaN());
  }, b, 5, 1e-9), std::runtime_error);
}

TEST(FactorizedObjective, MatchesSpatialEvaluation) {
  std::mt19937_64 rng(10);
  const Instance in = make_instance(4, 4, 3, 2, rng);
  ProjectionMatrix p(3, 2);
  for (double& v : p.data) v = std::normal_distribution<double>()(rng);
  Spectrum f(4, 4, 2);
  for (auto& v : f.data) v = {std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)};
  const ProjectionOptions opt{.c_dim = 2, .filter_reg = 0.3, .projection_reg = 0.05};
  EXPECT_NEAR(factorized_objective(in.x, in.y, p, f, opt), spatial_objective(in.samples, in.labels, p, f, 0.3, 0.05),
              1e-9);
}

TEST(LearnProjection, IdentityCollapseReproducesUnprojectedFilter) {
  std::mt19937_64 rng(11);
  const Instance in = make_instance(6, 5, 4, 1, rng);
  ProjectionOptions opt{.c_dim = 4, .filter_reg = 1e-2, .gn_iters = 0};
  opt.initial = ProjectionMatrix::identity(4);
  const ProjectionResult r = learn_projection(in.samples, in.labels, opt);
  const Spectrum direct = solve_filter(train_filter(in.samples[0], in.labels[0], 1e-2));
  ASSERT_EQ(r.filter.data.size(), direct.data.size());
  for (std::size_t i = 0; i < direct.data.size(); ++i) EXPECT_LE(std::abs(r.filter.data[i] - direct.data[i]), 1e-6);
}

TEST(LearnProjection, ObjectiveNeverIncreases) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance in = make_instance(5, 4, 6, 1 + trial % 2, rng);
    const ProjectionResult r = learn_projection(in.samples, in.labels, {.c_dim = 3, .gn_iters = 6});
    ASSERT_EQ(r.objective.size(), 7u);
    for (std::size_t k = 1; k < r.objective.size(); ++k) EXPECT_LE(r.objective[k], r.objective[k - 1] + 1e-9);
    EXPECT_LT(r.objective.back(), r.objective.front());
  }
}

TEST(LearnProjection, BeatsPcaWithDenseLeastSquaresFilter) {
  std::mt19937_64 rng(13);
  const Instance in = make_instance(4, 4, 3, 1, rng);
  const ProjectionOptions opt{.c_dim = 2, .filter_reg = 1e-2, .projection_reg = 1e-2};
  const ProjectionMatrix p0 = pca_projection(in.samples, 2);

  // Best filter for the PCA projection, from a dense spatial ridge solve.
  const FeatureMap z = apply_projection(in.samples[0], p0);
  const FeatureMap t = oracle::dense_ridge_template(z, in.labels[0], opt.filter_reg);
  const RealGrid corr = oracle::cyclic_correlation(t, z);
  double e0 = 0.0;
  for (std::size_t i = 0; i < corr.values.size(); ++i) e0 += std::pow(corr.values[i] - in.labels[0].values[i], 2);
  for (double v : t.data) e0 += opt.filter_reg * v * v;
  for (double v : p0.data) e0 += opt.projection_reg * v * v;

  const ProjectionResult r = learn_projection(in.samples, in.labels, opt);
  EXPECT_NEAR(r.objective.front(), e0, 1e-9);
  EXPECT_LE(r.objective.back(), e0 + 1e-12);
  EXPECT_NEAR(r.objective.back(),
              spatial_objective(in.samples, in.labels, r.projection, r.filter, opt.filter_reg, opt.projection_reg), 1e-9);
}

TEST(LearnProjection, RejectsOversizedTarget) {
  std::mt19937_64 rng(14);
  const Instance in = make_instance(4, 4, 3, 1, rng);
  EXPECT_THROW(learn_projection(in.samples, in.labels, {.c_dim = 4}), std::invalid_argument);
}
