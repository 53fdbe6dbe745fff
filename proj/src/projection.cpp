#include "aftrack/projection.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aftrack/corrfilter.hpp"

namespace aftrack {

ProjectionMatrix::ProjectionMatrix(int d, int c, double fill) : rows(d), cols(c) {
  if (d < 1 || c < 1) throw std::invalid_argument("ProjectionMatrix: dimensions must be >= 1");
  data.assign(static_cast<std::size_t>(d) * c, fill);
}

ProjectionMatrix ProjectionMatrix::identity(int d) {
  ProjectionMatrix p(d, d);
  for (int i = 0; i < d; ++i) p.at(i, i) = 1.0;
  return p;
}

double InterpolationKernel::operator()(double t) const {
  const double x = std::abs(t);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

double extended_sample(std::span<const double> samples, long index) {
  const long n = static_cast<long>(samples.size());
  if (index >= 0 && index < n) return samples[index];
  if (n == 1) return samples[0];
  if (index < 0) return samples[0] + static_cast<double>(index) * (samples[1] - samples[0]);
  return samples[n - 1] + static_cast<double>(index - n + 1) * (samples[n - 1] - samples[n - 2]);
}

namespace {

// 1-D resampling of `src` (size n) to m samples sharing the same extent.
void resample_line(std::span<const double> src, std::span<double> dst,
                   const InterpolationKernel& kernel) {
  const long n = static_cast<long>(src.size());
  const long m = static_cast<long>(dst.size());
  const int half = static_cast<int>(std::ceil(kernel.support / 2.0));
  for (long k = 0; k < m; ++k) {
    const double s = (k + 0.5) * static_cast<double>(n) / static_cast<double>(m) - 0.5;
    const long base = static_cast<long>(std::floor(s));
    double v = 0.0;
    for (long i = base - half + 1; i <= base + half; ++i) v += extended_sample(src, i) * kernel(s - i);
    dst[k] = v;
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

}  // namespace

FeatureMap resample_channel(const FeatureMap& channel, int target_cols, int target_rows,
                            const InterpolationKernel& kernel) {
  if (channel.channels != 1) throw std::invalid_argument("resample_channel: expects one channel");
  if (target_cols < 1 || target_rows < 1) {
    throw std::invalid_argument("resample_channel: target dimensions must be >= 1");
  }
  const int sc = channel.cols;
  const int sr = channel.rows;

  std::vector<double> horiz(static_cast<std::size_t>(target_cols) * sr);
  for (int y = 0; y < sr; ++y) {
    resample_line(channel.channel(0).subspan(static_cast<std::size_t>(y) * sc, sc),
                  std::span<double>(horiz).subspan(static_cast<std::size_t>(y) * target_cols, target_cols),
                  kernel);
  }

  FeatureMap out(target_cols, target_rows, 1);
  const double sx = static_cast<double>(sc) / target_cols;
  const double sy = static_cast<double>(sr) / target_rows;
  out.cell_size = channel.cell_size * sx;
  out.origin_x = channel.origin_x + channel.cell_size * (0.5 * sx - 0.5);
  out.origin_y = channel.origin_y + channel.cell_size * (0.5 * sy - 0.5);

  std::vector<double> column(sr);
  std::vector<double> resampled(target_rows);
  for (int x = 0; x < target_cols; ++x) {
    for (int y = 0; y < sr; ++y) column[y] = horiz[static_cast<std::size_t>(y) * target_cols + x];
    resample_line(column, resampled, kernel);
    for (int y = 0; y < target_rows; ++y) out.at(0, x, y) = resampled[y];
  }
  return out;
}

FeatureMap apply_projection(const FeatureMap& features, const ProjectionMatrix& p) {
  if (features.channels != p.rows) {
    throw std::invalid_argument("apply_projection: feature has " + std::to_string(features.channels) +
                                " channels, projection expects " + std::to_string(p.rows));
  }
  FeatureMap out(features.cols, features.rows, p.cols);
  out.cell_size = features.cell_size;
  out.origin_x = features.origin_x;
  out.origin_y = features.origin_y;
  const std::size_t n = features.plane_size();
  for (int d = 0; d < p.rows; ++d) {
    const auto in = features.channel(d);
    for (int c = 0; c < p.cols; ++c) {
      const double w = p.at(d, c);
      if (w == 0.0) continue;
      auto dst = out.channel(c);
      for (std::size_t i = 0; i < n; ++i) dst[i] += w * in[i];
    }
  }
  return out;
}

Spectrum apply_projection(const Spectrum& features, const ProjectionMatrix& p) {
  if (features.channels != p.rows) {
    throw std::invalid_argument("apply_projection: spectrum channel count does not match projection");
  }
  Spectrum out(features.cols, features.rows, p.cols);
  const std::size_t n = features.plane_size();
  for (int d = 0; d < p.rows; ++d) {
    const auto in = features.channel(d);
    for (int c = 0; c < p.cols; ++c) {
      const double w = p.at(d, c);
      if (w == 0.0) continue;
      auto dst = out.channel(c);
      for (std::size_t i = 0; i < n; ++i) dst[i] += w * in[i];
    }
  }
  return out;
}

ProjectionMatrix pca_projection(std::span<const FeatureMap> samples, int c_dim) {
  if (samples.empty()) throw std::invalid_argument("pca_projection: no samples");
  const int d = samples.front().channels;
  if (c_dim < 1 || c_dim > d) {
    throw std::invalid_argument("pca_projection: c_dim must be in [1, " + std::to_string(d) + "]");
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  double count = 0.0;
  for (const auto& s : samples) {
    if (s.channels != d) throw std::invalid_argument("pca_projection: inconsistent channel count");
    for (int k = 0; k < d; ++k) {
      for (double v : s.channel(k)) mean[k] += v;
    }
    count += static_cast<double>(s.plane_size());
  }
  mean /= count;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : samples) {
    const std::size_t n = s.plane_size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), d);
    for (int k = 0; k < d; ++k) {
      const auto ch = s.channel(k);
      for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), k) = ch[i] - mean[k];
    }
    cov.noalias() += x.transpose() * x;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca_projection: eigen solver failed");

  // Eigenvalues come in ascending order.
  ProjectionMatrix p(d, c_dim);
  for (int c = 0; c < c_dim; ++c) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    for (int k = 0; k < d; ++k) p.at(k, c) = v[k];
  }
  return p;
}

CgResult cg_solve(const LinearOperator& apply_a, std::span<const double> b, int max_iters,
                  double tol) {
  const std::size_t n = b.size();
  CgResult res;
  res.x.assign(n, 0.0);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> p = r;
  std::vector<double> ap(n);

  auto dot = [](std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
  };

  const double b_norm = std::sqrt(dot(b, b));
  double rr = b_norm * b_norm;
  res.residual_norm = b_norm;
  if (b_norm == 0.0) return res;

  for (int it = 0; it < max_iters; ++it) {
    apply_a(p, ap);
    const double pap = dot(p, ap);
    require_finite(pap, "cg_solve");
    if (pap <= 0.0) break;
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    require_finite(rr_new, "cg_solve");
    res.iterations = it + 1;
    res.residual_norm = std::sqrt(rr_new);
    if (res.residual_norm <= tol * b_norm) break;
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  return res;
}

double factorized_objective(std::span<const Spectrum> samples, std::span<const Spectrum> labels,
                            const ProjectionMatrix& p, const Spectrum& filter,
                            const ProjectionOptions& options) {
  const std::size_t n = filter.plane_size();
  const int nc = filter.channels;
  const double weight = 1.0 / static_cast<double>(samples.size());
  double data_term = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const Spectrum z = apply_projection(samples[j], p);
    const auto y = labels[j].channel(0);
    for (std::size_t u = 0; u < n; ++u) {
      Complex s = -y[u];
      for (int c = 0; c < nc; ++c) s += z.data[c * n + u] * filter.data[c * n + u];
      data_term += std::norm(s);
    }
  }
  double filter_energy = 0.0;
  for (const Complex& v : filter.data) filter_energy += std::norm(v);
  double p_energy = 0.0;
  for (double v : p.data) p_energy += v * v;
  const double inv_n = 1.0 / static_cast<double>(n);
  return weight * data_term * inv_n + options.filter_reg * filter_energy * inv_n +
         options.projection_reg * p_energy;
}

Spectrum fit_projected_filter(std::span<const Spectrum> samples, std::span<const Spectrum> labels,
                              const ProjectionMatrix& p, double filter_reg) {
  if (samples.empty() || samples.size() != labels.size()) {
    throw std::invalid_argument("fit_projected_filter: need matching nonempty samples and labels");
  }
  const double weight = 1.0 / static_cast<double>(samples.size());
  FilterModel acc = train_filter(apply_projection(samples[0], p), labels[0], filter_reg);
  for (auto& v : acc.numerator) v *= weight;
  for (auto& v : acc.denominator) v *= weight;
  for (std::size_t j = 1; j < samples.size(); ++j) {
    const FilterModel m = train_filter(apply_projection(samples[j], p), labels[j], filter_reg);
    for (std::size_t i = 0; i < acc.numerator.size(); ++i) acc.numerator[i] += weight * m.numerator[i];
    for (std::size_t i = 0; i < acc.denominator.size(); ++i) {
      acc.denominator[i] += weight * m.denominator[i];
    }
  }
  return solve_filter(acc);
}

namespace {

// Gauss-Newton normal equations of the factorized objective around (f, P).
// Unknowns are packed as [Re g, Im g, dP] with g = df / sqrt(N), which makes
// the system symmetric under the plain Euclidean inner product.
class GaussNewtonSystem {
 public:
  GaussNewtonSystem(std::span<const Spectrum> x, std::span<const Spectrum> y,
                    const ProjectionMatrix& p, const Spectrum& f, const ProjectionOptions& opt)
      : x_(x), y_(y), p_(p), f_(f), opt_(opt), n_(f.plane_size()), c_(f.channels), d_(p.rows),
        weight_(1.0 / static_cast<double>(x.size())), sqrt_n_(std::sqrt(static_cast<double>(n_))) {
    z_.reserve(x.size());
    for (const auto& s : x) z_.push_back(apply_projection(s, p));
  }

  std::size_t size() const { return 2 * n_ * c_ + static_cast<std::size_t>(d_) * c_; }

  void apply(std::span<const double> v, std::span<double> out) const {
    std::vector<Complex> df(n_ * c_);
    for (std::size_t i = 0; i < df.size(); ++i) df[i] = sqrt_n_ * Complex(v[i], v[n_ * c_ + i]);
    const std::span<const double> dp = v.subspan(2 * n_ * c_);

    // hp_d[u] = sum_c dP_dc f_c[u]
    std::vector<Complex> hp(n_ * d_, Complex{});
    for (int d = 0; d < d_; ++d) {
      for (int c = 0; c < c_; ++c) {
        const double w = dp[static_cast<std::size_t>(d) * c_ + c];
        if (w == 0.0) continue;
        for (std::size_t u = 0; u < n_; ++u) hp[d * n_ + u] += w * f_.data[c * n_ + u];
      }
    }

    std::vector<Complex> q(n_);
    std::vector<Complex> out_f(n_ * c_, Complex{});
    std::vector<double> out_p(static_cast<std::size_t>(d_) * c_, 0.0);
    for (std::size_t j = 0; j < x_.size(); ++j) {
      linearized_residual(j, df, hp, q);
      accumulate_adjoint(j, q, out_f, out_p);
    }
    pack(out_f, out_p, out);
    for (std::size_t i = 0; i < 2 * n_ * c_; ++i) out[i] += opt_.filter_reg * v[i];
    for (std::size_t i = 0; i < out_p.size(); ++i) {
      out[2 * n_ * c_ + i] += opt_.projection_reg * dp[i];
    }
  }

  // Negative gradient of the objective at (f, P), in packed coordinates.
  std::vector<double> rhs() const {
    std::vector<Complex> r(n_);
    std::vector<Complex> out_f(n_ * c_, Complex{});
    std::vector<double> out_p(static_cast<std::size_t>(d_) * c_, 0.0);
    for (std::size_t j = 0; j < x_.size(); ++j) {
      const auto y = y_[j].channel(0);
      for (std::size_t u = 0; u < n_; ++u) {
        Complex s = -y[u];
        for (int c = 0; c < c_; ++c) s += z_[j].data[c * n_ + u] * f_.data[c * n_ + u];
        r[u] = s;
      }
      accumulate_adjoint(j, r, out_f, out_p);
    }
    std::vector<double> b(size());
    pack(out_f, out_p, b);
    for (std::size_t i = 0; i < n_ * c_; ++i) {
      b[i] += opt_.filter_reg * f_.data[i].real() / sqrt_n_;
      b[n_ * c_ + i] += opt_.filter_reg * f_.data[i].imag() / sqrt_n_;
    }
    for (std::size_t i = 0; i < p_.data.size(); ++i) b[2 * n_ * c_ + i] += opt_.projection_reg * p_.data[i];
    for (double& v : b) v = -v;
    return b;
  }

  void unpack_step(std::span<const double> v, double t, Spectrum& f, ProjectionMatrix& p) const {
    for (std::size_t i = 0; i < n_ * c_; ++i) {
      f.data[i] = f_.data[i] + t * sqrt_n_ * Complex(v[i], v[n_ * c_ + i]);
    }
    for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] = p_.data[i] + t * v[2 * n_ * c_ + i];
  }

 private:
  void linearized_residual(std::size_t j, std::span<const Complex> df, std::span<const Complex> hp,
                           std::span<Complex> q) const {
    const Spectrum& z = z_[j];
    const Spectrum& x = x_[j];
    std::fill(q.begin(), q.end(), Complex{});
    for (int c = 0; c < c_; ++c) {
      for (std::size_t u = 0; u < n_; ++u) q[u] += z.data[c * n_ + u] * df[c * n_ + u];
    }
    for (int d = 0; d < d_; ++d) {
      for (std::size_t u = 0; u < n_; ++u) q[u] += x.data[d * n_ + u] * hp[d * n_ + u];
    }
  }

  // Adds A^* q for sample j: filter part w/sqrt(N) conj(z_c) q, projection
  // part w/N Re sum_u conj(x_d f_c) q.
  void accumulate_adjoint(std::size_t j, std::span<const Complex> q, std::span<Complex> out_f,
                          std::span<double> out_p) const {
    const Spectrum& z = z_[j];
    const Spectrum& x = x_[j];
    const double wf = weight_ / sqrt_n_;
    for (int c = 0; c < c_; ++c) {
      for (std::size_t u = 0; u < n_; ++u) out_f[c * n_ + u] += wf * std::conj(z.data[c * n_ + u]) * q[u];
    }
    const double wp = weight_ / static_cast<double>(n_);
    std::vector<Complex> xq(n_);
    for (int d = 0; d < d_; ++d) {
      for (std::size_t u = 0; u < n_; ++u) xq[u] = std::conj(x.data[d * n_ + u]) * q[u];
      for (int c = 0; c < c_; ++c) {
        double s = 0.0;
        for (std::size_t u = 0; u < n_; ++u) {
          const Complex& fv = f_.data[c * n_ + u];
          s += fv.real() * xq[u].real() + fv.imag() * xq[u].imag();
        }
        out_p[static_cast<std::size_t>(d) * c_ + c] += wp * s;
      }
    }
  }

  void pack(std::span<const Complex> out_f, std::span<const double> out_p, std::span<double> out) const {
    for (std::size_t i = 0; i < n_ * c_; ++i) {
      out[i] = out_f[i].real();
      out[n_ * c_ + i] = out_f[i].imag();
    }
    std::copy(out_p.begin(), out_p.end(), out.begin() + static_cast<std::ptrdiff_t>(2 * n_ * c_));
  }

  std::span<const Spectrum> x_;
  std::span<const Spectrum> y_;
  const ProjectionMatrix& p_;
  const Spectrum& f_;
  const ProjectionOptions& opt_;
  std::size_t n_;
  int c_;
  int d_;
  double weight_;
  double sqrt_n_;
  std::vector<Spectrum> z_;
};

}  // namespace

ProjectionResult learn_projection(std::span<const FeatureMap> samples,
                                  std::span<const RealGrid> labels,
                                  const ProjectionOptions& options) {
  if (samples.empty()) throw std::invalid_argument("learn_projection: no samples");
  if (samples.size() != labels.size()) {
    throw std::invalid_argument("learn_projection: need one label per sample");
  }
  const int d = samples.front().channels;
  if (options.c_dim < 1 || options.c_dim > d) {
    throw std::invalid_argument("learn_projection: c_dim " + std::to_string(options.c_dim) +
                                " exceeds feature dimension " + std::to_string(d));
  }
  if (options.gn_iters < 0 || options.cg_iters < 1) {
    throw std::invalid_argument("learn_projection: invalid iteration budget");
  }

  std::vector<Spectrum> x;
  std::vector<Spectrum> y;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const auto& s = samples[j];
    if (s.channels != d || s.cols != samples.front().cols || s.rows != samples.front().rows) {
      throw std::invalid_argument("learn_projection: samples must share one grid");
    }
    if (labels[j].cols != s.cols || labels[j].rows != s.rows) {
      throw std::invalid_argument("learn_projection: label grid does not match sample");
    }
    x.push_back(fft2(s));
    y.push_back(fft2(labels[j]));
  }

  ProjectionResult result;
  if (options.initial) {
    if (options.initial->rows != d || options.initial->cols != options.c_dim) {
      throw std::invalid_argument("learn_projection: initial projection has the wrong shape");
    }
    result.projection = *options.initial;
  } else {
    result.projection = pca_projection(samples, options.c_dim);
  }
  result.filter = fit_projected_filter(x, y, result.projection, options.filter_reg);

  double current = factorized_objective(x, y, result.projection, result.filter, options);
  require_finite(current, "learn_projection");
  result.objective.push_back(current);

  for (int it = 0; it < options.gn_iters; ++it) {
    const GaussNewtonSystem system(x, y, result.projection, result.filter, options);
    const std::vector<double> b = system.rhs();
    const CgResult step = cg_solve(
        [&system](std::span<const double> v, std::span<double> out) { system.apply(v, out); }, b,
        options.cg_iters, options.cg_tol);

    Spectrum f_try = result.filter;
    ProjectionMatrix p_try = result.projection;
    bool accepted = false;
    for (double t = 1.0; t > 1e-6; t *= 0.5) {
      system.unpack_step(step.x, t, f_try, p_try);
      const double e = factorized_objective(x, y, p_try, f_try, options);
      require_finite(e, "learn_projection");
      if (e <= current) {
        current = e;
        accepted = true;
        break;
      }
    }
    if (accepted) {
      result.filter = std::move(f_try);
      result.projection = std::move(p_try);
    }
    result.objective.push_back(current);
  }
  return result;
}

}  // namespace aftrack
