#include "pushsum/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <optional>

#include "pushsum/error.hpp"

namespace pushsum {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::size_t int_pow(std::size_t b, unsigned e) {
  std::size_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

// Orthonormal basis of the zero-sum subspace (Helmert contrasts), p x (p-1).
Matrix helmert_basis(std::size_t p) {
  Matrix v(p, p - 1);
  for (std::size_t a = 1; a < p; ++a) {
    const double s = 1.0 / std::sqrt(static_cast<double>(a * (a + 1)));
    for (std::size_t i = 0; i < a; ++i) v(i, a - 1) = s;
    v(a, a - 1) = -static_cast<double>(a) * s;
  }
  return v;
}

// Orthonormal coordinates of symmetric q x q matrices, row-wise upper triangle.
class SymmetricCoordinates {
 public:
  explicit SymmetricCoordinates(std::size_t q) : q_(q), offset_(q) {
    std::size_t o = 0;
    for (std::size_t a = 0; a < q; ++a) {
      offset_[a] = o - a;
      o += q - a;
    }
  }

  std::size_t dim() const { return q_ * (q_ + 1) / 2; }
  std::size_t index(std::size_t a, std::size_t b) const { return offset_[a] + b; }  // a <= b

  Eigen::MatrixXd to_matrix(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd m(q_, q_);
    for (std::size_t a = 0; a < q_; ++a) {
      m(a, a) = y(index(a, a));
      for (std::size_t b = a + 1; b < q_; ++b) m(a, b) = m(b, a) = y(index(a, b)) * kInvSqrt2;
    }
    return m;
  }

  template <class M>
  void from_matrix(const M& w, double* out) const {
    for (std::size_t a = 0; a < q_; ++a) {
      out[index(a, a)] = w(a, a);
      for (std::size_t b = a + 1; b < q_; ++b) out[index(a, b)] = (w(a, b) + w(b, a)) * kInvSqrt2;
    }
  }

 private:
  std::size_t q_;
  std::vector<std::size_t> offset_;
};

// Psi(Y) = V_k^T Phi(V_k Y V_k^T) V_k on symmetric coordinates, where
// vec(Phi(X)) = E(A^{(x)2k}) vec(X) with row-major vec.
Matrix reduced_operator(const GossipModel& model, unsigned k, std::size_t cap_bytes, std::size_t& q_out) {
  const std::size_t p = model.size();
  const std::size_t pk = int_pow(p, k);
  const std::size_t q = int_pow(p - 1, k);
  const SymmetricCoordinates sym(q);
  const std::size_t d = sym.dim();
  if (d != 0 && d > cap_bytes / sizeof(double) / d) {
    throw CapacityError("reduced operator of order " + std::to_string(2 * k) + " exceeds memory cap",
                        d * d * sizeof(double));
  }
  const SparseMatrix moment = kronecker_moment(model, 2 * k, cap_bytes);

  const Matrix vk_m = kron_power(helmert_basis(p), k, cap_bytes);
  const Eigen::Map<const RowMatrix> vk(vk_m.data().data(), static_cast<Eigen::Index>(pk),
                                       static_cast<Eigen::Index>(q));
  Matrix r(d, d);
  RowMatrix x(pk, pk);
  Eigen::VectorXd z(static_cast<Eigen::Index>(pk * pk));
  Eigen::MatrixXd w(q, q);
  std::vector<double> column(d);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = a; b < q; ++b) {
      x.noalias() = vk.col(a) * vk.col(b).transpose();
      if (a != b) x = (x + x.transpose().eval()) * kInvSqrt2;
      z.noalias() = moment * Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
      const Eigen::Map<const RowMatrix> zm(z.data(), static_cast<Eigen::Index>(pk), static_cast<Eigen::Index>(pk));
      w.noalias() = vk.transpose() * (zm * vk);
      sym.from_matrix(w, column.data());
      const std::size_t c = sym.index(a, b);
      for (std::size_t i = 0; i < d; ++i) r(i, c) = column[i];
    }
  }
  q_out = q;
  return r;
}

struct Bracket {
  double lo, hi;
};

// Collatz-Wielandt bracket: lo Y <= Psi(Y) <= hi Y in the Loewner order
// gives lo <= rho <= hi for a positive map and positive definite Y.
std::optional<Bracket> loewner_bracket(const SymmetricCoordinates& sym, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& psi_y) {
  const Eigen::MatrixXd ym = sym.to_matrix(y);
  const Eigen::LLT<Eigen::MatrixXd> llt(ym);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd c = llt.matrixL().solve(sym.to_matrix(psi_y));
  c = llt.matrixL().solve(c.transpose().eval());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::nullopt;
  const auto& ev = es.eigenvalues();
  if (!std::isfinite(ev.minCoeff()) || !std::isfinite(ev.maxCoeff())) return std::nullopt;
  return Bracket{std::max(ev.minCoeff(), 0.0), std::max(ev.maxCoeff(), 0.0)};
}

}  // namespace

SpectralRadius cone_spectral_radius(const Matrix& r, std::size_t q, double rel_tol, int max_iterations) {
  const SymmetricCoordinates sym(q);
  const auto d = static_cast<Eigen::Index>(sym.dim());
  if (r.rows() != sym.dim() || !r.square()) throw InvalidInput("cone_spectral_radius: size mismatch");
  if (d == 0) return {0.0, true, 0};
  const Eigen::Map<const RowMatrix> rm(r.data().data(), d, d);

  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  for (std::size_t a = 0; a < q; ++a) y(static_cast<Eigen::Index>(sym.index(a, a))) = 1.0;
  y.normalize();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double shift = std::numeric_limits<double>::infinity();
  Bracket best{0.0, std::numeric_limits<double>::infinity()};
  double prev_width = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd psi_y = rm * y;
    const auto br = loewner_bracket(sym, y, psi_y);
    if (!br) break;
    best.lo = std::max(best.lo, br->lo);
    best.hi = std::min(best.hi, br->hi);
    if (best.hi <= 0.0) return {0.0, true, it};
    const double width = best.hi - best.lo;
    if (width <= rel_tol * best.hi) return {0.5 * (best.lo + best.hi), true, it};

    // Any shift above rho keeps the resolvent positive, so iterates stay PD.
    // A factorisation costs hundreds of solves; keep it until contraction stalls.
    const double target = best.hi + 0.01 * width + 8.0 * std::numeric_limits<double>::epsilon() * best.hi;
    const bool stalled = width > 0.5 * prev_width;
    prev_width = width;
    if (!(shift > best.hi) || !std::isfinite(shift) || (stalled && shift > best.hi + 0.3 * width)) {
      shift = target;
      lu.compute(shift * Eigen::MatrixXd::Identity(d, d) - Eigen::MatrixXd(rm));
    }
    y = lu.solve(y);
    const double n = y.norm();
    if (!(n > 0.0) || !std::isfinite(n)) break;
    y /= n;
  }
  // Singular or stalled iterate: fall back to Gelfand on the reduced matrix.
  SpectralRadius g = spectral_radius(r);
  if (std::isfinite(best.hi) && g.value > best.hi) g.value = best.hi;
  if (g.value < best.lo) g.value = best.lo;
  return g;
}

EtaResult eta(const GossipModel& model, unsigned k, const EtaOptions& options) {
  if (k == 0) throw InvalidInput("eta: k must be positive");
  if (model.size() == 1) return {-std::numeric_limits<double>::infinity(), true, 0};
  std::size_t q = 0;
  const Matrix r = reduced_operator(model, k, options.cap_bytes, q);
  const SpectralRadius sr = cone_spectral_radius(r, q, options.rel_tol, options.max_iterations);
  const double v = sr.value > 0.0 ? std::log(sr.value) : -std::numeric_limits<double>::infinity();
  return {v, sr.converged, sr.doublings};
}

EtaResult eta_dense(const GossipModel& model, unsigned k, std::size_t cap_bytes) {
  if (k == 0) throw InvalidInput("eta_dense: k must be positive");
  if (model.size() == 1) return {-std::numeric_limits<double>::infinity(), true, 0};
  const Matrix m = to_dense(kronecker_moment(model, 2 * k, cap_bytes), cap_bytes);
  const Matrix t = m * kron_power(centering_projection(model.size()), 2 * k, cap_bytes);
  const SpectralRadius sr = spectral_radius(t);
  const double v = sr.value > 0.0 ? std::log(sr.value) : -std::numeric_limits<double>::infinity();
  return {v, sr.converged, sr.doublings};
}

BoundReport bound_report(const GossipModel& model, const std::vector<unsigned>& ks, const EtaOptions& options) {
  BoundReport rep;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    const EtaResult e = eta(model, 1, options);
    rep.eta2 = e.value;
    rep.eta2_converged = e.converged;
    if (!e.converged) rep.errors[1] = "spectral radius did not converge";
  } catch (const Error& ex) {
    rep.eta2 = nan;
    rep.errors[1] = ex.what();
  }
  rep.eta2_half = rep.eta2 / 2.0;
  rep.time_normalized_bound = static_cast<double>(model.steps_per_time_unit()) * rep.eta2_half;
  for (unsigned k : ks) {
    if (k < 2 || rep.higher.count(k) || rep.errors.count(k)) continue;
    try {
      const EtaResult e = eta(model, k, options);
      rep.higher[k] = e;
      if (!e.converged) rep.errors[k] = "spectral radius did not converge";
    } catch (const Error& ex) {
      rep.errors[k] = ex.what();
    }
  }
  return rep;
}

ConvexityReport check_eta_convexity(const GossipModel& model, unsigned kmax, double tol, const EtaOptions& options) {
  if (kmax < 2) throw InvalidInput("check_eta_convexity: kmax must be at least 2");
  ConvexityReport rep;
  rep.eta.assign(kmax + 1, 0.0);
  if (model.size() == 1) {
    // Every eta_{2k} is the -inf sentinel; nothing to compare.
    for (unsigned j = 1; j <= kmax; ++j) rep.eta[j] = -std::numeric_limits<double>::infinity();
    rep.holds = true;
    return rep;
  }
  bool converged = true;
  for (unsigned j = 1; j <= kmax; ++j) {
    const EtaResult e = eta(model, j, options);
    rep.eta[j] = e.value;
    converged = converged && e.converged;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (unsigned j = 1; j < kmax; ++j) {
    worst = std::min(worst, 0.5 * (rep.eta[j - 1] + rep.eta[j + 1]) - rep.eta[j]);
    worst = std::min(worst, rep.eta[j + 1] / (2.0 * (j + 1)) - rep.eta[j] / (2.0 * j));
  }
  rep.worst_margin = worst;
  rep.holds = converged && worst >= -tol;
  return rep;
}

CauchySchwarzReport cs_tensor_check(const std::vector<CoupledAtom>& atoms, double tol) {
  if (atoms.empty()) throw InvalidInput("cs_tensor_check: empty distribution");
  const std::size_t dx = atoms.front().x.rows();
  const std::size_t dy = atoms.front().y.rows();
  Matrix exx(dx * dx, dx * dx), exy(dx * dy, dx * dy), eyy(dy * dy, dy * dy);
  for (const auto& a : atoms) {
    if (!a.x.square() || !a.y.square() || a.x.rows() != dx || a.y.rows() != dy) {
      throw InvalidInput("cs_tensor_check: atoms must be square with consistent sizes");
    }
    if (!(a.probability >= 0.0)) throw InvalidInput("cs_tensor_check: negative probability");
    exx += a.probability * kron(a.x, a.x);
    exy += a.probability * kron(a.x, a.y);
    eyy += a.probability * kron(a.y, a.y);
  }
  CauchySchwarzReport rep;
  rep.lhs = spectral_radius(exy).value;
  rep.rhs = std::sqrt(spectral_radius(exx).value * spectral_radius(eyy).value);
  rep.slack = rep.rhs - rep.lhs;
  rep.holds = rep.slack >= -tol;
  return rep;
}

double moment_bound_doubly_stochastic(const GossipModel& model, unsigned k, const EtaOptions& options) {
  for (const Matrix& m : model.extreme_realizations()) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double s = 0.0;
      for (double v : m.row(i)) s += v;
      if (std::abs(s - 1.0) > 1e-12) {
        throw PreconditionError("model is not doubly stochastic: row " + std::to_string(i) + " sums to " +
                                std::to_string(s));
      }
    }
  }
  return eta(model, k, options).value;
}

}  // namespace pushsum
