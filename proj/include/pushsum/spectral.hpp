#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pushsum/gossip.hpp"
#include "pushsum/linalg.hpp"

namespace pushsum {

struct EtaResult {
  double value = 0.0;  ///< log spectral radius; -inf when p = 1
  bool converged = false;
  int iterations = 0;
};

struct EtaOptions {
  double rel_tol = 1e-11;
  int max_iterations = 300;
  std::size_t cap_bytes = kDefaultMemoryCapBytes;
};

/// eta_{2k} = log rho(E(A^{(x)2k}) (I-J)^{(x)2k}).
///
/// The operator X -> E(A_k P X P A_k^T) (A_k, P the k-th Kronecker powers of A
/// and I-J) is completely positive, so its spectral radius is attained on the
/// positive semidefinite cone. It is compressed to symmetric matrices over
/// range(P), and rho is bracketed by the Collatz-Wielandt bounds
/// min/max eig(Y^{-1/2} Psi(Y) Y^{-1/2}), with Y refined by shifted inverse
/// iteration until the bracket closes to rel_tol.
EtaResult eta(const GossipModel& model, unsigned k, const EtaOptions& options = {});

/// Same quantity from a dense E(A^{(x)2k}) (I-J)^{(x)2k} and Gelfand's formula.
/// Independent of the compression above; intended for small p.
EtaResult eta_dense(const GossipModel& model, unsigned k, std::size_t cap_bytes = kDefaultMemoryCapBytes);

/// Spectral radius of a linear map on symmetric q x q matrices that preserves
/// the PSD cone, given as a d x d matrix acting on coordinate columns,
/// d = q(q+1)/2. Coordinates are the packed upper triangle in row order,
/// (0,0), (0,1), ..., (0,q-1), (1,1), ..., holding Y_aa on the diagonal and
/// sqrt(2) Y_ab off it, so the Frobenius inner product is the dot product.
/// Exposed for testing.
SpectralRadius cone_spectral_radius(const Matrix& r, std::size_t q, double rel_tol = 1e-11, int max_iterations = 300);

struct BoundReport {
  double eta2 = 0.0;
  double eta2_half = 0.0;
  double time_normalized_bound = 0.0;  ///< steps_per_time_unit * eta2 / 2
  bool eta2_converged = false;
  std::map<unsigned, EtaResult> higher;  ///< k -> eta_{2k}, k >= 2
  std::map<unsigned, std::string> errors;  ///< k -> capacity or solver message
};

/// eta_2 always, plus every k >= 2 in ks. Per-k failures land in `errors`.
BoundReport bound_report(const GossipModel& model, const std::vector<unsigned>& ks = {1},
                         const EtaOptions& options = {});

struct ConvexityReport {
  bool holds = false;
  double worst_margin = 0.0;  ///< smallest (rhs - lhs) over all checked inequalities
  std::vector<double> eta;    ///< eta[j] = eta_{2j}, eta[0] = 0
};

/// Checks eta_{2k} <= (eta_{2k-2} + eta_{2k+2}) / 2 and eta_{2k}/(2k) <= eta_{2k+2}/(2k+2)
/// for 1 <= k < kmax, each to within `tol`.
ConvexityReport check_eta_convexity(const GossipModel& model, unsigned kmax, double tol = 1e-9,
                                    const EtaOptions& options = {});

/// One atom of a joint distribution of (X, Y); X and Y are square, sizes may differ.
struct CoupledAtom {
  double probability = 0.0;
  Matrix x;
  Matrix y;
};

struct CauchySchwarzReport {
  bool holds = false;
  double lhs = 0.0;    ///< rho(E(X (x) Y))
  double rhs = 0.0;    ///< sqrt(rho(E(X (x) X)) rho(E(Y (x) Y)))
  double slack = 0.0;  ///< rhs - lhs
};

CauchySchwarzReport cs_tensor_check(const std::vector<CoupledAtom>& atoms, double tol = 1e-10);

/// eta_{2k} as a bound on the 2k-th moment decay of doubly stochastic
/// averaging. Throws PreconditionError unless every realisation has unit row sums.
double moment_bound_doubly_stochastic(const GossipModel& model, unsigned k, const EtaOptions& options = {});

}  // namespace pushsum
