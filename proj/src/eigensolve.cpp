#include "atomion/eigensolve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "atomion/lobpcg.hpp"

namespace atomion {

double WaveFn::norm() const {
  double s = 0.0;
  for (double v : amplitude) s += v * v;
  return std::sqrt(s * grid.cell_volume());
}

void WaveFn::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw std::runtime_error("WaveFn::normalize: zero norm");
  for (double& v : amplitude) v /= n;
}

void WaveFn::fix_phase() {
  if (amplitude.empty()) return;
  auto it = std::max_element(amplitude.begin(), amplitude.end(),
                             [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*it < 0.0)
    for (double& v : amplitude) v = -v;
}

double inner_product(const WaveFn& a, const WaveFn& b) {
  if (a.frame != b.frame) throw std::invalid_argument("inner_product: frame mismatch");
  if (!(a.grid == b.grid)) throw std::invalid_argument("inner_product: grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.amplitude.size(); ++i) s += a.amplitude[i] * b.amplitude[i];
  return s * a.grid.cell_volume();
}

OneBodySpectrum solve_1d(const OperatorSpec& op) {
  if (op.grid().dims() != 1) throw std::invalid_argument("solve_1d: operator is not 1D");
  const std::size_t n = op.size();
  const auto dense = op.dense_matrix();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> h(
      dense.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("solve_1d: diagonalisation failed");

  const Grid1D& g = op.grid().axes[0];
  const double scale = 1.0 / std::sqrt(g.spacing());
  OneBodySpectrum out{g, {}, {}};
  out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  out.orbitals.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i)
      phi[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * scale;
    auto it = std::max_element(phi.begin(), phi.end(),
                               [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*it < 0.0)
      for (double& v : phi) v = -v;
    out.orbitals.push_back(std::move(phi));
  }
  return out;
}

namespace {

// Strides of a row-major shape.
std::vector<std::size_t> strides_of(const ProductGrid& grid) {
  const std::size_t d = grid.dims();
  std::vector<std::size_t> s(d, 1);
  for (std::size_t a = d - 1; a-- > 0;) s[a] = s[a + 1] * grid.axes[a + 1].size();
  return s;
}

std::size_t mirrored_index(const ProductGrid& grid, const std::vector<std::size_t>& strides,
                           std::size_t flat) {
  std::size_t out = 0;
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    const std::size_t k = (flat / strides[a]) % grid.axes[a].size();
    out += grid.axes[a].mirror(k) * strides[a];
  }
  return out;
}

}  // namespace

void project_sector(const ProductGrid& grid, const Sector& sector, std::span<double> amp) {
  if (amp.size() != grid.size()) throw std::invalid_argument("project_sector: size mismatch");
  const std::size_t d = grid.dims();
  std::vector<double> tmp(amp.begin(), amp.end());

  if (sector.exchange != 0) {
    if (d < 2 || !(grid.axes[d - 1] == grid.axes[d - 2]))
      throw std::invalid_argument("project_sector: exchange needs two identical atom axes");
    const std::size_t n = grid.axes[d - 1].size();
    const std::size_t blocks = grid.size() / (n * n);
    const double s = sector.exchange > 0 ? 1.0 : -1.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t off = b * n * n;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          amp[off + i * n + j] = 0.5 * (tmp[off + i * n + j] + s * tmp[off + j * n + i]);
    }
    std::copy(amp.begin(), amp.end(), tmp.begin());
  }
  if (sector.parity != 0) {
    const auto strides = strides_of(grid);
    const double p = sector.parity > 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < amp.size(); ++i)
      amp[i] = 0.5 * (tmp[i] + p * tmp[mirrored_index(grid, strides, i)]);
  }
}

WaveFn exchange_project(const WaveFn& psi) {
  WaveFn out = psi;
  const double before = psi.norm();
  project_sector(out.grid, Sector{+1, 0}, out.amplitude);
  const double after = out.norm();
  if (!(after > 1e-12 * std::max(before, 1e-300)))
    throw std::runtime_error("exchange_project: projection has zero norm (antisymmetric input)");
  out.normalize();
  out.exchange = +1;
  return out;
}

namespace {

// Smooth, deterministic seed: a Gaussian envelope times a random low-order
// polynomial, plus a small pseudo-random perturbation.
Eigen::VectorXd seed_vector(const ProductGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = grid.dims();
  constexpr int kOrder = 4;
  std::vector<double> coeff(static_cast<std::size_t>(std::pow(kOrder, static_cast<double>(d))));
  for (double& c : coeff) c = normal(rng);
  std::vector<double> width(d);
  for (std::size_t a = 0; a < d; ++a) width[a] = std::min(1.0, grid.axes[a].extent() / 4.0);

  const auto strides = strides_of(grid);
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double env = 0.0;
    std::vector<double> x(d);
    for (std::size_t a = 0; a < d; ++a) {
      x[a] = grid.axes[a].point((i / strides[a]) % grid.axes[a].size()) / width[a];
      env += x[a] * x[a];
    }
    double poly = 0.0;
    for (std::size_t c = 0; c < coeff.size(); ++c) {
      double term = coeff[c];
      std::size_t rem = c;
      for (std::size_t a = 0; a < d; ++a) {
        term *= std::pow(x[a], static_cast<double>(rem % kOrder));
        rem /= kOrder;
      }
      poly += term;
    }
    v(static_cast<Eigen::Index>(i)) = std::exp(-0.5 * env) * (poly + 1e-3 * normal(rng));
  }
  return v;
}

Eigen::MatrixXd initial_block(const ProductGrid& grid, std::size_t cols, const Sector& sector,
                              std::uint64_t seed, const std::vector<WaveFn>* initial) {
  Eigen::MatrixXd block(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(cols));
  std::size_t filled = 0;
  if (initial) {
    for (const auto& w : *initial) {
      if (filled == cols) break;
      if (!(w.grid == grid) || (sector.parity != 0 && w.parity != 0 && w.parity != sector.parity))
        continue;
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(w.amplitude.data(),
                                                            static_cast<Eigen::Index>(w.amplitude.size()));
      project_sector(grid, sector, std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
      if (v.norm() < 1e-6 * std::sqrt(1.0 / grid.cell_volume())) continue;
      block.col(static_cast<Eigen::Index>(filled++)) = v;
    }
  }
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(sector.parity + 7) * 1000003ULL);
  while (filled < cols) block.col(static_cast<Eigen::Index>(filled++)) = seed_vector(grid, rng);
  return block;
}

std::string describe_failure(const OperatorSpec& op, const Sector& s, const LobpcgResult& r,
                             double tol) {
  std::ostringstream os;
  os << "eigensolver did not converge (" << to_string(op.frame()) << ", g=" << op.params().g
     << ", beta=" << op.params().beta << ", parity=" << s.parity << ") after " << r.iterations
     << " iterations; residuals:";
  for (double x : r.residuals) os << ' ' << x;
  os << " (target " << tol << ")";
  return os.str();
}

}  // namespace

EigenResult sector_eigenstates(const OperatorSpec& op, std::size_t k, const Sector& sector,
                               const EigenOptions& options, const std::vector<WaveFn>* initial) {
  if (k == 0) throw std::invalid_argument("sector_eigenstates: k must be positive");
  const ProductGrid& grid = op.grid();
  const std::size_t block = k + options.guard_vectors;

  LinearMap apply = [&op](std::span<const double> in, std::span<double> out) { op.apply(in, out); };
  const double shift = options.preconditioner_shift;
  LinearMap precond = [&op, shift](std::span<const double> in, std::span<double> out) {
    op.apply_inverse_kinetic(shift, in, out);
  };
  Projector project = [&grid, sector](std::span<double> v) { project_sector(grid, sector, v); };

  LobpcgOptions lo;
  lo.nev = k;
  lo.tolerance = options.tolerance;
  lo.max_iterations = options.max_iterations;
  lo.project_inside_loop = options.project_inside_loop;

  auto r = lobpcg(apply, precond, project, initial_block(grid, block, sector, options.seed, initial), lo);
  if (!r.converged)
    throw ConvergenceError(describe_failure(op, sector, r, options.tolerance), r.history);

  EigenResult out;
  out.record.params = op.params();
  out.record.frame = op.frame();
  out.record.grid = grid;
  const double scale = 1.0 / std::sqrt(grid.cell_volume());
  for (std::size_t j = 0; j < k; ++j) {
    WaveFn w;
    w.frame = op.frame();
    w.grid = grid;
    w.exchange = sector.exchange;
    w.parity = sector.parity;
    const auto col = r.vectors.col(static_cast<Eigen::Index>(j));
    w.amplitude.assign(col.data(), col.data() + col.size());
    for (double& v : w.amplitude) v *= scale;
    w.fix_phase();
    out.states.push_back(std::move(w));
    out.record.energies.push_back(r.values[j]);
    out.record.parity.push_back(sector.parity);
    out.record.exchange.push_back(sector.exchange);
    out.record.residuals.push_back(r.residuals[j]);
    out.record.iterations.push_back(r.iterations);
  }
  return out;
}

namespace {

void assign_clusters(SpectrumRecord& rec, double tol) {
  rec.cluster.assign(rec.energies.size(), 0);
  int id = 0;
  for (std::size_t i = 1; i < rec.energies.size(); ++i) {
    if (std::abs(rec.energies[i] - rec.energies[i - 1]) >= tol) ++id;
    rec.cluster[i] = id;
  }
}

}  // namespace

EigenResult lowest_eigenstates(const OperatorSpec& op, std::size_t k, const EigenOptions& options,
                               const std::vector<WaveFn>* initial) {
  if (op.frame() != Frame::cmf_relative && op.frame() != Frame::ion_frame &&
      op.frame() != Frame::if_atoms)
    throw std::invalid_argument("lowest_eigenstates: needs a two-atom operator");
  if (k == 0 || k > 8) throw std::invalid_argument("lowest_eigenstates: k must be in [1, 8]");

  auto even = sector_eigenstates(op, k, Sector{+1, +1}, options, initial);
  auto odd = sector_eigenstates(op, k, Sector{+1, -1}, options, initial);

  std::vector<std::pair<double, std::pair<int, std::size_t>>> all;
  for (std::size_t i = 0; i < k; ++i) {
    all.push_back({even.record.energies[i], {+1, i}});
    all.push_back({odd.record.energies[i], {-1, i}});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  EigenResult out;
  out.record.params = op.params();
  out.record.frame = op.frame();
  out.record.grid = op.grid();
  for (std::size_t j = 0; j < k; ++j) {
    const auto& src = all[j].second.first > 0 ? even : odd;
    const std::size_t i = all[j].second.second;
    out.states.push_back(src.states[i]);
    out.record.energies.push_back(src.record.energies[i]);
    out.record.parity.push_back(src.record.parity[i]);
    out.record.exchange.push_back(src.record.exchange[i]);
    out.record.residuals.push_back(src.record.residuals[i]);
    out.record.iterations.push_back(src.record.iterations[i]);
  }
  assign_clusters(out.record, options.degeneracy_tolerance);
  return out;
}

GroundState3D ground_state_3d(const OperatorSpec& op, const EigenOptions& options,
                              const ImaginaryTimeOptions& imag) {
  if (op.frame() != Frame::ion_frame) throw std::invalid_argument("ground_state_3d: needs an ion-frame operator");
  const ProductGrid& grid = op.grid();
  const Sector sector{+1, +1};
  const std::size_t n = grid.size();

  std::mt19937_64 rng(options.seed);
  Eigen::VectorXd x = seed_vector(grid, rng);
  project_sector(grid, sector, std::span<double>(x.data(), n));
  x.normalize();

  // Split-operator factors exp(-tau V / 2) and exp(-tau T) / N.
  const double tau = imag.time_step;
  std::vector<double> half_v(n), exp_t(op.kinetic_symbol().size());
  for (std::size_t i = 0; i < n; ++i) half_v[i] = std::exp(-0.5 * tau * op.potential()[i]);
  for (std::size_t i = 0; i < exp_t.size(); ++i) exp_t[i] = std::exp(-tau * op.kinetic_symbol()[i]);

  GroundState3D out;
  std::vector<double> hx(n), tmp(n);
  auto energy_of = [&](const Eigen::VectorXd& v) {
    op.apply(std::span<const double>(v.data(), n), hx);
    return v.dot(Eigen::Map<const Eigen::VectorXd>(hx.data(), static_cast<Eigen::Index>(n))) / v.squaredNorm();
  };

  out.energy_history.push_back(energy_of(x));
  std::size_t step = 0;
  while (step < imag.max_steps) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = half_v[i] * x(static_cast<Eigen::Index>(i));
    op.fft().apply_symbol(exp_t, tmp, std::span<double>(x.data(), n));
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) *= half_v[i];
    x.normalize();
    ++step;
    if (step % imag.check_every == 0) {
      project_sector(grid, sector, std::span<double>(x.data(), n));
      x.normalize();
      out.energy_history.push_back(energy_of(x));
      const auto m = out.energy_history.size();
      if (std::abs(out.energy_history[m - 1] - out.energy_history[m - 2]) < imag.energy_change) break;
    }
  }
  out.imaginary_steps = step;

  LinearMap apply = [&op](std::span<const double> in, std::span<double> o) { op.apply(in, o); };
  const double shift = options.preconditioner_shift;
  LinearMap precond = [&op, shift](std::span<const double> in, std::span<double> o) {
    op.apply_inverse_kinetic(shift, in, o);
  };
  Projector project = [&grid, sector](std::span<double> v) { project_sector(grid, sector, v); };

  const std::size_t block = 1 + std::max<std::size_t>(options.guard_vectors, 1);
  Eigen::MatrixXd init(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(block));
  init.col(0) = x;
  for (std::size_t j = 1; j < block; ++j) init.col(static_cast<Eigen::Index>(j)) = seed_vector(grid, rng);

  LobpcgOptions lo;
  lo.nev = 1;
  lo.tolerance = options.tolerance;
  lo.max_iterations = options.max_iterations;
  lo.project_inside_loop = options.project_inside_loop;
  auto r = lobpcg(apply, precond, project, std::move(init), lo);
  if (!r.converged)
    throw ConvergenceError(describe_failure(op, sector, r, options.tolerance), r.history);

  out.energy = r.values[0];
  out.residual = r.residuals[0];
  out.polish_iterations = r.iterations;
  out.state.frame = op.frame();
  out.state.grid = grid;
  out.state.exchange = +1;
  out.state.parity = +1;
  const auto col = r.vectors.col(0);
  out.state.amplitude.assign(col.data(), col.data() + col.size());
  for (double& v : out.state.amplitude) v /= std::sqrt(grid.cell_volume());
  out.state.fix_phase();
  return out;
}

WaveFn resample(const WaveFn& psi, const ProductGrid& target) {
  if (psi.grid.dims() != target.dims()) throw std::invalid_argument("resample: dimension mismatch");
  if (psi.grid == target) return psi;

  // Resample one axis at a time; `cur` holds the partially resampled array.
  ProductGrid cur_grid = psi.grid;
  std::vector<double> cur = psi.amplitude;
  for (std::size_t a = 0; a < target.dims(); ++a) {
    if (cur_grid.axes[a] == target.axes[a]) continue;
    ProductGrid next_grid = cur_grid;
    next_grid.axes[a] = target.axes[a];
    const auto s_in = strides_of(cur_grid);
    const auto s_out = strides_of(next_grid);
    const std::size_t n_in = cur_grid.axes[a].size(), n_out = target.axes[a].size();
    std::vector<double> next(next_grid.size());
    const std::size_t lines = cur_grid.size() / n_in;
    std::vector<double> line(n_in);
    for (std::size_t l = 0; l < lines; ++l) {
      // Decompose the line index into outer (axes < a) and inner (axes > a) parts.
      const std::size_t inner = s_in[a];
      const std::size_t outer = l / inner, in_off = l % inner;
      for (std::size_t k = 0; k < n_in; ++k) line[k] = cur[outer * n_in * inner + k * inner + in_off];
      const auto res = resample_bandlimited(cur_grid.axes[a], line, target.axes[a]);
      for (std::size_t k = 0; k < n_out; ++k) next[outer * n_out * s_out[a] + k * s_out[a] + in_off] = res[k];
    }
    cur = std::move(next);
    cur_grid = std::move(next_grid);
  }
  WaveFn out = psi;
  out.grid = target;
  out.amplitude = std::move(cur);
  out.normalize();
  return out;
}

}  // namespace atomion
