#pragma once

#include <span>
#include <vector>

#include "membrane/assembly.hpp"
#include "membrane/error.hpp"

namespace membrane {

struct SolveReport {
    std::size_t iterations = 0;
    /// |K u - b| / |b| recomputed at exit (b after deflation).
    double relative_residual = 0.0;
    /// Number of translation vectors removed from the rhs and iterates.
    std::size_t deflated_dimension = 0;
    /// |projection of u onto infinitesimal rotations| / |u|, global frame.
    double rotation_drift = 0.0;
    bool converged = false;
};

enum class Preconditioner {
    jacobi,        ///< inverse of the scalar diagonal
    block_jacobi,  ///< inverse of each node's 3x3 diagonal block
};

struct SolverOptions {
    Preconditioner preconditioner = Preconditioner::block_jacobi;
    double tolerance = 1e-10;
    /// 0 selects 50 sqrt(ndof).
    std::size_t max_iterations = 0;
    bool deflate_translations = false;
    /// Adds shift * max diagonal to the diagonal; diagnostic only.
    double tikhonov_shift = 0.0;
    /// Initial guess in global coordinates; empty means zero.
    std::vector<double> initial_guess;
};

struct SolveResult {
    /// Nodal displacements, global x, y, z per node.
    std::vector<double> displacement;
    SolveReport report;
};

/// Raised on iteration-limit exhaustion or CG breakdown; carries the report
/// at the point of failure.
class SolverError : public Error {
public:
    SolverError(const std::string& message, SolveReport report)
        : Error("solver", message), report_(report) {}
    const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

/// Conjugate gradients with (nodal block) Jacobi preconditioning on a
/// symmetric positive semidefinite system. With deflation, the global translations (restricted
/// to unconstrained dofs, kept only if they are energy-free) are projected
/// out of the rhs and out of every iterate.
SolveResult solve(const LinearSystem& system, const SolverOptions& options = {});

/// Plain solve of matrix x = rhs (no frames, no deflation). `initial_guess`
/// is taken in the matrix's own coordinates.
std::vector<double> solve(const CsrMatrix& matrix, std::span<const double> rhs,
                          const SolverOptions& options = {}, SolveReport* report = nullptr);

}  // namespace membrane
