#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>
#include <Eigen/Dense>

#include "persistlab/errors.hpp"
#include "persistlab/model.hpp"
#include "persistlab/parallel.hpp"
#include "persistlab/philox.hpp"
#include "persistlab/spectral.hpp"

namespace persistlab {

/// One two-sided realisation.
///   xi, Itilde: n = -N+1..N
///   S, I, Ibar: n = -N..N
class PathBundle {
 public:
  PathBundle() = default;

  long N() const { return N_; }
  double xi(long n) const { return xi_[static_cast<std::size_t>(n + N_ - 1)]; }
  double Itilde(long n) const { return itilde_[static_cast<std::size_t>(n + N_ - 1)]; }
  double S(long n) const { return s_[static_cast<std::size_t>(n + N_)]; }
  double I(long n) const { return i_[static_cast<std::size_t>(n + N_)]; }
  double Ibar(long n) const { return ibar_[static_cast<std::size_t>(n + N_)]; }

  /// Ibar at n = -N-1, reachable through Ibar_{-N-1} = Ibar_{-N} - S_{-N}.
  double Ibar_extended(long n) const {
    if (n == -N_ - 1) return Ibar(-N_) - S(-N_);
    return Ibar(n);
  }

  std::span<const double> S_values() const { return s_; }
  std::span<const double> I_values() const { return i_; }
  std::span<const double> Ibar_values() const { return ibar_; }

  /// Rebuild every process from increments xi_{-N+1..N}.
  void assign(std::span<const double> xi, long N) {
    if (N < 1 || xi.size() < static_cast<std::size_t>(2 * N)) {
      throw ConfigError("assemble_paths: need 2N increments for horizon N >= 1");
    }
    N_ = N;
    const auto len = static_cast<std::size_t>(2 * N + 1);
    xi_.assign(xi.begin(), xi.begin() + 2 * N);
    s_.assign(len, 0.0);
    i_.assign(len, 0.0);
    ibar_.assign(len, 0.0);
    itilde_.assign(static_cast<std::size_t>(2 * N), 0.0);
    const auto at = [N](long n) { return static_cast<std::size_t>(n + N); };
    for (long n = 1; n <= N; ++n) s_[at(n)] = s_[at(n - 1)] + this->xi(n);
    for (long n = 0; n > -N; --n) s_[at(n - 1)] = s_[at(n)] - this->xi(n);
    for (long n = -N + 1; n <= N; ++n) itilde_[static_cast<std::size_t>(n + N - 1)] = 0.5 * (S(n) + S(n - 1));
    for (long n = 1; n <= N; ++n) {
      i_[at(n)] = i_[at(n - 1)] + Itilde(n);
      ibar_[at(n)] = ibar_[at(n - 1)] + S(n);
    }
    for (long n = 0; n > -N; --n) {
      i_[at(n - 1)] = i_[at(n)] - Itilde(n);
      ibar_[at(n - 1)] = ibar_[at(n)] - S(n);
    }
  }

 private:
  long N_ = 0;
  std::vector<double> xi_, itilde_, s_, i_, ibar_;
};

inline PathBundle assemble_paths(std::span<const double> xi, long N) {
  PathBundle p;
  p.assign(xi, N);
  return p;
}

struct SimConfig {
  ProcessModel model;
  long N = 1;
  std::uint64_t base_seed = 42;
  std::size_t batch_size = 4096;
  unsigned threads = 0;  // 0: PERSISTLAB_THREADS or hardware

  void validate() const {
    if (N < 1) throw ConfigError("simulation horizon N must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline ComplexBuffer make_buffer(std::size_t n) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    auto in = make_buffer(n);
    auto out = make_buffer(n);
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  std::size_t size() const { return n_; }
  // Buffers must come from make_buffer (fftw_malloc alignment).
  void execute(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(plan_, in, out); }

 private:
  std::size_t n_;
  fftw_plan plan_;
};

}  // namespace detail

/// Eigenvalues of the circulant matrix with first row
/// (r(0), r(1), ..., r(M), r(M-1), ..., r(1)).
struct CirculantEmbedding {
  std::size_t M = 0;
  std::vector<double> eigenvalues;  // length 2M, clipped at 0
  double min_raw = 0.0;             // smallest eigenvalue before clipping
};

inline constexpr double kEmbeddingTolerance = 1e-8;

inline CirculantEmbedding build_embedding(const CovarianceSequence& r, std::size_t M,
                                          double tol = kEmbeddingTolerance) {
  if (M < 1 || r.max_lag() < M) throw ConfigError("build_embedding: covariance must be defined up to lag M >= 1");
  const std::size_t L = 2 * M;
  auto in = detail::make_buffer(L);
  auto out = detail::make_buffer(L);
  for (std::size_t j = 0; j < L; ++j) {
    in[j][0] = j <= M ? r.r[j] : r.r[L - j];
    in[j][1] = 0.0;
  }
  detail::FftPlan plan(L);
  plan.execute(in.get(), out.get());
  CirculantEmbedding e;
  e.M = M;
  e.eigenvalues.resize(L);
  double lo = out[0][0], hi = out[0][0];
  for (std::size_t k = 0; k < L; ++k) {
    e.eigenvalues[k] = out[k][0];
    lo = std::min(lo, out[k][0]);
    hi = std::max(hi, out[k][0]);
  }
  e.min_raw = lo;
  if (lo < -tol * hi) throw NegativeEigenvalue(lo, hi);
  for (double& v : e.eigenvalues) v = std::max(v, 0.0);
  return e;
}

namespace detail {

// Y = FFT(sqrt(lambda / 2M) * (Z1 + i Z2)); Re Y and Im Y are independent exact samples.
inline void synthesize_pair(const CirculantEmbedding& e, const FftPlan& plan, std::span<const double> scale,
                            NormalStream& stream, fftw_complex* in, fftw_complex* out) {
  const std::size_t L = 2 * e.M;
  for (std::size_t k = 0; k < L; ++k) {
    in[k][0] = scale[k] * stream.next();
    in[k][1] = scale[k] * stream.next();
  }
  plan.execute(in, out);
}

inline std::vector<double> spectral_scale(const CirculantEmbedding& e) {
  const double L = static_cast<double>(2 * e.M);
  std::vector<double> s(e.eigenvalues.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::sqrt(e.eigenvalues[k] / L);
  return s;
}

}  // namespace detail

/// One exact sample (length 2M) of the stationary sequence via Davies-Harte synthesis.
inline std::vector<double> sample_xi(const CirculantEmbedding& e, std::uint64_t seed) {
  const std::size_t L = 2 * e.M;
  detail::FftPlan plan(L);
  auto in = detail::make_buffer(L);
  auto out = detail::make_buffer(L);
  NormalStream stream(seed, 0);
  const auto scale = detail::spectral_scale(e);
  detail::synthesize_pair(e, plan, scale, stream, in.get(), out.get());
  std::vector<double> x(L);
  for (std::size_t j = 0; j < L; ++j) x[j] = out[j][0];
  return x;
}

/// Factor A with A A^T = cov, from the eigendecomposition with negative
/// eigenvalues above -1e-9 max clipped to zero.
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov, double tol = 1e-9) {
  if (cov.rows() != cov.cols()) throw ConfigError("covariance matrix must be square");
  if (cov.size() && (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
    throw NotPSD("covariance matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double hi = lam.size() ? lam.maxCoeff() : 0.0;
  const double lo = lam.size() ? lam.minCoeff() : 0.0;
  if (lo < -tol * std::max(hi, 0.0)) {
    throw NotPSD("covariance matrix has eigenvalue " + std::to_string(lo) + " (max " + std::to_string(hi) + ")");
  }
  return es.eigenvectors() * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

inline Eigen::VectorXd sample_exact_small(const Eigen::MatrixXd& factor, NormalStream& stream) {
  Eigen::VectorXd z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = stream.next();
  return factor * z;
}

/// Gaussian vector with covariance `cov` (dimension <= 64).
inline Eigen::VectorXd sample_exact_small(const Eigen::MatrixXd& cov, std::uint64_t seed) {
  if (cov.rows() > 64) throw DimensionTooLarge("sample_exact_small supports dimension <= 64");
  NormalStream stream(seed, 0);
  return sample_exact_small(psd_factor(cov), stream);
}

/// Exact sampler of xi_{-N+1..N} for one model and horizon.
///
/// Uses circulant embedding of half-size M = smallest power of two >= 2N,
/// doubling M on NegativeEigenvalue up to 2^16. Horizons N <= 64 then fall
/// back to a direct factorisation of the 2N x 2N covariance; larger ones rethrow.
class PathSampler {
 public:
  struct Workspace {
    detail::ComplexBuffer in, out;
  };

  PathSampler(const ProcessModel& model, long N) : N_(N) {
    if (N < 1) throw ConfigError("PathSampler: N must be >= 1");
    std::size_t M = 1;
    while (M < static_cast<std::size_t>(2 * N)) M <<= 1;
    constexpr std::size_t kMaxM = std::size_t{1} << 16;
    std::exception_ptr last;
    for (; M <= kMaxM; M <<= 1) {
      try {
        embedding_ = build_embedding(covariance_sequence(model, M), M);
        plan_ = std::make_shared<detail::FftPlan>(2 * M);
        scale_ = detail::spectral_scale(embedding_);
        return;
      } catch (const NegativeEigenvalue&) {
        last = std::current_exception();
      }
    }
    if (N <= 64) {
      const auto r = covariance_sequence(model, static_cast<std::size_t>(2 * N));
      Eigen::MatrixXd cov(2 * N, 2 * N);
      for (long i = 0; i < 2 * N; ++i)
        for (long j = 0; j < 2 * N; ++j) cov(i, j) = r(i - j);
      factor_ = psd_factor(cov);
      cholesky_ = true;
      return;
    }
    std::rethrow_exception(last);
  }

  long horizon() const { return N_; }
  bool uses_direct_factor() const { return cholesky_; }
  const CirculantEmbedding& embedding() const { return embedding_; }

  Workspace make_workspace() const {
    const std::size_t L = cholesky_ ? 1 : 2 * embedding_.M;
    return {detail::make_buffer(L), detail::make_buffer(L)};
  }

  /// Two independent increment samples of length 2N from stream (seed, pair).
  void sample_pair(Workspace& ws, std::uint64_t seed, std::uint64_t pair, std::span<double> a,
                   std::span<double> b) const {
    NormalStream stream(seed, pair);
    const auto len = static_cast<std::size_t>(2 * N_);
    if (cholesky_) {
      const Eigen::VectorXd x = sample_exact_small(factor_, stream);
      const Eigen::VectorXd y = sample_exact_small(factor_, stream);
      std::copy_n(x.data(), len, a.begin());
      std::copy_n(y.data(), len, b.begin());
      return;
    }
    detail::synthesize_pair(embedding_, *plan_, scale_, stream, ws.in.get(), ws.out.get());
    for (std::size_t j = 0; j < len; ++j) {
      a[j] = ws.out[j][0];
      b[j] = ws.out[j][1];
    }
  }

 private:
  long N_;
  CirculantEmbedding embedding_;
  std::shared_ptr<detail::FftPlan> plan_;
  std::vector<double> scale_;
  Eigen::MatrixXd factor_;
  bool cholesky_ = false;
};

/// Runs `visit(acc, path)` over `trials` paths in batches of cfg.batch_size.
/// Batch b draws from seed batch_seed(base, b); path p of a batch is the real
/// (p even) or imaginary (p odd) half of synthesis pair p/2. Per-batch
/// accumulators are merged in batch order with acc.merge(other).
template <class Acc, class Visit>
Acc simulate_paths(const PathSampler& sampler, const SimConfig& cfg, std::uint64_t trials, const Acc& init,
                   Visit visit) {
  cfg.validate();
  const long N = sampler.horizon();
  const std::size_t bs = cfg.batch_size;
  const std::size_t batches = static_cast<std::size_t>((trials + bs - 1) / bs);
  auto run = [&](std::size_t b) {
    Acc acc = init;
    auto ws = sampler.make_workspace();
    const std::uint64_t seed = batch_seed(cfg.base_seed, b);
    const std::uint64_t first = static_cast<std::uint64_t>(b) * bs;
    const std::uint64_t count = std::min<std::uint64_t>(bs, trials - first);
    std::vector<double> xa(static_cast<std::size_t>(2 * N)), xb(static_cast<std::size_t>(2 * N));
    PathBundle path;
    for (std::uint64_t p = 0; p < count; ++p) {
      if (p % 2 == 0) sampler.sample_pair(ws, seed, p / 2, xa, xb);
      path.assign(p % 2 == 0 ? xa : xb, N);
      visit(acc, path);
    }
    return acc;
  };
  auto parts = run_indexed<Acc>(batches, resolve_threads(static_cast<int>(cfg.threads)), run);
  Acc total = init;
  for (const Acc& part : parts) total.merge(part);
  return total;
}

/// Path `index` (0-based, counted across batches) of a configuration.
inline PathBundle simulate_one(const PathSampler& sampler, const SimConfig& cfg, std::uint64_t index) {
  const std::uint64_t b = index / cfg.batch_size;
  const std::uint64_t p = index % cfg.batch_size;
  auto ws = sampler.make_workspace();
  const auto len = static_cast<std::size_t>(2 * sampler.horizon());
  std::vector<double> xa(len), xb(len);
  sampler.sample_pair(ws, batch_seed(cfg.base_seed, b), p / 2, xa, xb);
  return assemble_paths(p % 2 == 0 ? xa : xb, sampler.horizon());
}

}  // namespace persistlab
