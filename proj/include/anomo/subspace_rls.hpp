#pragma once

// Recursive least squares tracking of the CP factors of the Hankelized link
// tensor. One call of each update consumes one frontal slice.
//
// Notation used in the comments:
//   g_{l,w} = a^l (.) c^w             (elementwise product)
//   alpha_w = diag(b[t]) c^w
//   beta_w  = diag(b[t-1]) c^{w+1} - diag(b[t]) c^w
//   gamma_l = diag(b[t]) a^l,  eta_l = diag(b[t-1]) a^l
// The Hankel coupling only ever links a slice to its predecessor, so masked
// Hankel sums run over w = 1..W-1 with the mask entry of column w.

#include <cstdint>
#include <utility>

#include "anomo/types.hpp"

namespace anomo {

/// A and C drawn i.i.d. N(0, 1/R); b[0] = b[-1] = 0; every RA_l and RC_w = mu_r I.
std::pair<CpModel, RlsCaches> init_model(int links, int window, int rank, std::uint64_t seed,
                                         double mu_r);

/// Normal equations M b = r of the regularized least squares problem for b[t],
/// assembled from A[t-1], C[t-1] and model.b_prev = b[t-1].
struct BNormalEquations {
  Matrix M;
  Vector r;
};
BNormalEquations b_normal_equations(const CpModel& model, const ObservedSlice& slice,
                                    const Hyperparams& hp);

/// Closed-form b[t]. Throws SolverError naming the slice when M is singular
/// (only reachable with mu_r = 0 and an empty mask).
Vector update_b(const CpModel& model, const ObservedSlice& slice, const Hyperparams& hp);

/// RLS update of every row of A. `anomaly` is the L x W contribution of the
/// estimated abnormal flows on this slice; the data term uses Z = Y - anomaly.
/// Alpha/beta are formed from the C currently held by `model`.
/// Rows are independent and are processed in parallel when OpenMP is available.
void update_A(CpModel& model, RlsCaches& caches, const ObservedSlice& slice, const Matrix& anomaly,
              const Hyperparams& hp);

/// RLS update of the rows of C in descending order w = W..1, so the Hankel
/// term of row w sees the already refreshed c^{w+1}. Row W carries no Hankel term.
/// Gamma/eta are formed from the A currently held by `model`.
void update_C(CpModel& model, RlsCaches& caches, const ObservedSlice& slice, const Matrix& anomaly,
              const Hyperparams& hp);

/// A diag(b) C^T.
Matrix reconstruct(const CpModel& model, const Vector& b);

}  // namespace anomo
