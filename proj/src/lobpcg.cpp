#include "atomion/lobpcg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atomion {

namespace {

void apply_block(const LinearMap& op, const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
  out.resize(in.rows(), in.cols());
  for (Eigen::Index j = 0; j < in.cols(); ++j)
    op(std::span<const double>(in.col(j).data(), static_cast<std::size_t>(in.rows())),
       std::span<double>(out.col(j).data(), static_cast<std::size_t>(out.rows())));
}

void project_block(const Projector& project, Eigen::MatrixXd& m) {
  if (!project) return;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    project(std::span<double>(m.col(j).data(), static_cast<std::size_t>(m.rows())));
}

// Orthonormalise the columns of `b` against the orthonormal columns of `x` and
// among themselves (two passes each); columns that lose more than `drop` of
// their norm are discarded.
Eigen::MatrixXd orthonormalize(Eigen::MatrixXd b, const Eigen::MatrixXd* x, double drop) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    auto col = b.col(j);
    const double n0 = col.norm();
    if (!(n0 > 0.0) || !std::isfinite(n0)) continue;
    col /= n0;
    for (int pass = 0; pass < 2; ++pass) {
      if (x && x->cols() > 0) col -= (*x) * (x->transpose() * col);
      for (Eigen::Index i : keep) col -= b.col(i) * b.col(i).dot(col);
    }
    const double n1 = col.norm();
    if (n1 < drop) continue;
    col /= n1;
    keep.push_back(j);
  }
  Eigen::MatrixXd out(b.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = b.col(keep[i]);
  return out;
}

}  // namespace

LobpcgResult lobpcg(const LinearMap& apply, const LinearMap& precondition, const Projector& project,
                    Eigen::MatrixXd initial, const LobpcgOptions& opt) {
  const Eigen::Index m = initial.cols();
  const auto nev = static_cast<Eigen::Index>(opt.nev);
  if (nev < 1 || nev > m) throw std::invalid_argument("lobpcg: nev must be in [1, block size]");

  project_block(project, initial);
  Eigen::MatrixXd X = orthonormalize(std::move(initial), nullptr, 1e-10);
  if (X.cols() != m) throw std::invalid_argument("lobpcg: initial block is linearly dependent");

  Eigen::MatrixXd AX;
  apply_block(apply, X, AX);
  {
    Eigen::MatrixXd G = X.transpose() * AX;
    G = 0.5 * (G + G.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    X = (X * es.eigenvectors()).eval();
    AX = (AX * es.eigenvectors()).eval();
  }

  LobpcgResult res;
  Eigen::VectorXd theta = (X.transpose() * AX).diagonal();
  Eigen::MatrixXd P(X.rows(), 0);
  Eigen::MatrixXd R, W, AB;
  bool fresh = true;  // AX came from a direct application

  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    R = AX - X * theta.asDiagonal();
    Eigen::VectorXd rn = R.colwise().norm();
    const double worst = rn.head(nev).maxCoeff();
    res.history.push_back(worst);
    res.iterations = it;

    if (worst < opt.tolerance) {
      if (fresh) {
        res.converged = true;
        break;
      }
      // Confirm with a direct application before accepting.
      apply_block(apply, X, AX);
      theta = (X.transpose() * AX).diagonal();
      fresh = true;
      continue;
    }

    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < m; ++j)
      if (rn(j) >= 0.1 * opt.tolerance) active.push_back(j);
    W.resize(X.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto j = active[a];
      precondition(std::span<const double>(R.col(j).data(), static_cast<std::size_t>(R.rows())),
                   std::span<double>(W.col(static_cast<Eigen::Index>(a)).data(),
                                     static_cast<std::size_t>(W.rows())));
    }
    project_block(project, W);

    Eigen::MatrixXd B(X.rows(), W.cols() + P.cols());
    B << W, P;
    B = orthonormalize(std::move(B), &X, 1e-12);
    if (B.cols() == 0) break;
    apply_block(apply, B, AB);

    const Eigen::Index nb = B.cols();
    Eigen::MatrixXd G(m + nb, m + nb);
    G.topLeftCorner(m, m) = theta.asDiagonal();
    G.topRightCorner(m, nb) = X.transpose() * AB;
    G.bottomLeftCorner(nb, m) = G.topRightCorner(m, nb).transpose();
    Eigen::MatrixXd gbb = B.transpose() * AB;
    G.bottomRightCorner(nb, nb) = 0.5 * (gbb + gbb.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::MatrixXd C = es.eigenvectors().leftCols(m);
    const Eigen::MatrixXd cx = C.topRows(m), cb = C.bottomRows(nb);

    P = B * cb;
    X = (X * cx + P).eval();
    AX = (AX * cx + AB * cb).eval();
    theta = es.eigenvalues().head(m);
    fresh = false;

    if (opt.project_inside_loop && project) project_block(project, X);
  }

  // Final residuals from a direct application.
  apply_block(apply, X, AX);
  theta = (X.transpose() * AX).diagonal();
  R = AX - X * theta.asDiagonal();
  const Eigen::VectorXd rn = R.colwise().norm();
  res.values.assign(theta.data(), theta.data() + m);
  res.residuals.assign(rn.data(), rn.data() + m);
  res.vectors = std::move(X);
  res.converged = true;
  for (Eigen::Index j = 0; j < nev; ++j)
    if (!(res.residuals[static_cast<std::size_t>(j)] < opt.tolerance)) res.converged = false;

  // Rayleigh quotients can come out of order by round-off once converged.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) order[static_cast<std::size_t>(j)] = j;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return res.values[static_cast<std::size_t>(a)] < res.values[static_cast<std::size_t>(b)];
  });
  LobpcgResult sorted = res;
  for (std::size_t j = 0; j < order.size(); ++j) {
    sorted.values[j] = res.values[static_cast<std::size_t>(order[j])];
    sorted.residuals[j] = res.residuals[static_cast<std::size_t>(order[j])];
    sorted.vectors.col(static_cast<Eigen::Index>(j)) = res.vectors.col(order[j]);
  }
  return sorted;
}

}  // namespace atomion
