#include "atomion/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace atomion {

struct RealFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

namespace {

// fftw_plan_* is not thread-safe; every planner call goes through this lock.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const RealFft::Plans> cached_plans(const std::vector<int>& shape,
                                                   std::size_t real_size,
                                                   std::size_t complex_size);

}  // namespace

RealFft::RealFft(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty() || shape_.size() > 8) throw std::invalid_argument("RealFft: bad rank");
  real_size_ = 1;
  for (int s : shape_) {
    if (s <= 0) throw std::invalid_argument("RealFft: non-positive extent");
    real_size_ *= static_cast<std::size_t>(s);
  }
  complex_size_ = real_size_ / static_cast<std::size_t>(shape_.back()) *
                  static_cast<std::size_t>(shape_.back() / 2 + 1);
  plans_ = cached_plans(shape_, real_size_, complex_size_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (in.size() != real_size_ || out.size() != complex_size_)
    throw std::invalid_argument("RealFft::forward: size mismatch");
  // r2c preserves its input; the cast is required by the C API only.
  fftw_execute_dft_r2c(plans_->forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<std::complex<double>> in, std::span<double> out) const {
  if (out.size() != real_size_ || in.size() != complex_size_)
    throw std::invalid_argument("RealFft::inverse: size mismatch");
  fftw_execute_dft_c2r(plans_->inverse, reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

void RealFft::apply_symbol(std::span<const double> symbol, std::span<const double> in,
                           std::span<double> out) const {
  if (symbol.size() != complex_size_) throw std::invalid_argument("apply_symbol: symbol size");
  thread_local std::vector<std::complex<double>> spec;
  spec.resize(complex_size_);
  forward(in, spec);
  const double scale = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < complex_size_; ++i) spec[i] *= symbol[i] * scale;
  inverse(spec, out);
}

double RealFft::quadratic_form(std::span<const double> symbol, std::span<const double> in) const {
  if (symbol.size() != complex_size_) throw std::invalid_argument("quadratic_form: symbol size");
  thread_local std::vector<std::complex<double>> spec;
  spec.resize(complex_size_);
  forward(in, spec);
  const std::size_t last = static_cast<std::size_t>(shape_.back());
  const std::size_t half = last / 2 + 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < complex_size_; ++i) {
    const std::size_t j = i % half;
    // Interior columns of the last axis stand for a +/- k pair.
    const double w = (j == 0 || (last % 2 == 0 && j == last / 2)) ? 1.0 : 2.0;
    acc += w * symbol[i] * std::norm(spec[i]);
  }
  return acc / static_cast<double>(real_size_);
}

namespace {

std::shared_ptr<const RealFft::Plans> cached_plans(const std::vector<int>& shape,
                                                   std::size_t real_size,
                                                   std::size_t complex_size) {
  static std::map<std::vector<int>, std::shared_ptr<const RealFft::Plans>> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(shape); it != cache.end()) return it->second;

  auto plans = std::make_shared<RealFft::Plans>();
  std::vector<double> real(real_size);
  std::vector<std::complex<double>> cplx(complex_size);
  // FFTW_ESTIMATE keeps plan selection deterministic across runs.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int rank = static_cast<int>(shape.size());
  plans->forward = fftw_plan_dft_r2c(rank, shape.data(), real.data(),
                                     reinterpret_cast<fftw_complex*>(cplx.data()), flags);
  plans->inverse = fftw_plan_dft_c2r(rank, shape.data(),
                                     reinterpret_cast<fftw_complex*>(cplx.data()), real.data(),
                                     flags);
  if (!plans->forward || !plans->inverse) throw std::runtime_error("FFTW planning failed");
  cache.emplace(shape, plans);
  return plans;
}

}  // namespace

}  // namespace atomion
