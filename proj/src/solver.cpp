#include "membrane/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace membrane {

namespace {

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

// Modified Gram-Schmidt; drops vectors that are (numerically) dependent.
std::vector<Vector> orthonormalize(std::vector<Vector> vs) {
    std::vector<Vector> basis;
    for (Vector& v : vs) {
        const double original = norm(v);
        if (original == 0.0) continue;
        for (const Vector& b : basis) {
            const double c = dot(v, b);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
        }
        const double len = norm(v);
        if (len <= 1e-10 * original) continue;
        for (double& x : v) x /= len;
        basis.push_back(std::move(v));
    }
    return basis;
}

void project_out(const std::vector<Vector>& basis, Vector& v) {
    for (const Vector& b : basis) {
        const double c = dot(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
}

class Operator {
public:
    Operator(const CsrMatrix& m, double shift) : m_(m), shift_(shift) {}

    void apply(const Vector& x, Vector& y) const {
        m_.multiply(x, y);
        if (shift_ != 0.0) {
            for (std::size_t i = 0; i < x.size(); ++i) y[i] += shift_ * x[i];
        }
    }

private:
    const CsrMatrix& m_;
    double shift_;
};

// Symmetric positive definite approximation of the inverse (block) diagonal.
// Zero or negative pivots (e.g. the normal dof of a flat membrane) get the
// largest pivot of their block, or 1 when the whole block vanishes.
class Preconditioning {
public:
    Preconditioning(const CsrMatrix& m, double shift, Preconditioner kind) : kind_(kind) {
        const std::size_t n = m.size();
        if (kind_ == Preconditioner::jacobi || n % 3 != 0) {
            kind_ = Preconditioner::jacobi;
            inv_diag_.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double d = m.at(i, i) + shift;
                inv_diag_[i] = d > 0.0 ? 1.0 / d : 1.0;
            }
            return;
        }
        blocks_.resize(n / 3);
        for (std::size_t node = 0; node < n / 3; ++node) {
            Mat3 block;
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) block(a, b) = m.at(3 * node + a, 3 * node + b);
            }
            block += shift * Mat3::Identity();
            const Eigen::SelfAdjointEigenSolver<Mat3> eig(0.5 * (block + block.transpose()));
            Vec3 values = eig.eigenvalues();
            const double top = values.maxCoeff();
            for (int k = 0; k < 3; ++k) {
                if (!(values[k] > 1e-12 * top)) values[k] = top > 0.0 ? top : 1.0;
            }
            blocks_[node] = eig.eigenvectors() * values.cwiseInverse().asDiagonal() *
                            eig.eigenvectors().transpose();
        }
    }

    void apply(const Vector& r, Vector& z) const {
        if (kind_ == Preconditioner::jacobi) {
            for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
            return;
        }
        for (std::size_t node = 0; node < blocks_.size(); ++node) {
            const Vec3 w = blocks_[node] * Vec3(r[3 * node], r[3 * node + 1], r[3 * node + 2]);
            for (int a = 0; a < 3; ++a) z[3 * node + a] = w[a];
        }
    }

private:
    Preconditioner kind_;
    Vector inv_diag_;
    std::vector<Mat3> blocks_;
};

std::vector<Vector> translation_kernel(const LinearSystem& system, const Operator& op) {
    const std::vector<bool> mask = system.constrained_mask();
    const double scale = system.matrix.max_abs();
    std::vector<Vector> candidates;
    for (int c = 0; c < 3; ++c) {
        Vector global(system.dofs.size(), 0.0);
        for (std::size_t node = 0; node < system.dofs.nodes; ++node) global[3 * node + c] = 1.0;
        Vector local = system.to_local(global);
        for (std::size_t i = 0; i < local.size(); ++i) {
            if (mask[i]) local[i] = 0.0;
        }
        // Only energy-free translations are deflated; a translation that
        // loads a constrained boundary is not in the kernel.
        Vector image(local.size());
        op.apply(local, image);
        if (norm(image) <= 1e-8 * scale * std::max(norm(local), 1.0)) {
            candidates.push_back(std::move(local));
        }
    }
    return orthonormalize(std::move(candidates));
}

double rotation_drift(const LinearSystem& system, const Vector& u_global) {
    const double total = norm(u_global);
    if (total == 0.0 || system.node_positions.size() != system.dofs.nodes) return 0.0;
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : system.node_positions) centroid += p;
    centroid /= static_cast<double>(system.node_positions.size());

    std::vector<Vector> rotations;
    for (int axis = 0; axis < 3; ++axis) {
        Vector r(system.dofs.size());
        for (std::size_t node = 0; node < system.dofs.nodes; ++node) {
            const Vec3 v = Vec3::Unit(axis).cross(system.node_positions[node] - centroid);
            for (int c = 0; c < 3; ++c) r[3 * node + c] = v[c];
        }
        rotations.push_back(std::move(r));
    }
    double projected = 0.0;
    for (const Vector& b : orthonormalize(std::move(rotations))) {
        const double c = dot(u_global, b);
        projected += c * c;
    }
    return std::sqrt(projected) / total;
}

struct CoreResult {
    Vector x;
    SolveReport report;
};

// Preconditioned CG on (K + shift I) x = b with b and every iterate kept
// orthogonal to the orthonormal `kernel` vectors.
CoreResult conjugate_gradient(const CsrMatrix& matrix, Vector b, Vector x,
                              const SolverOptions& options, const std::vector<Vector>& kernel) {
    const std::size_t n = matrix.size();
    const std::size_t max_iter =
        options.max_iterations != 0
            ? options.max_iterations
            : static_cast<std::size_t>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));

    const Vector diag = matrix.diagonal();
    const double max_diag = diag.empty() ? 0.0 : *std::max_element(diag.begin(), diag.end());
    const double shift = options.tikhonov_shift * max_diag;
    const Operator op(matrix, shift);
    const Preconditioning precond(matrix, shift, options.preconditioner);

    CoreResult out;
    out.report.deflated_dimension = kernel.size();
    project_out(kernel, b);
    project_out(kernel, x);
    const double b_norm = norm(b);
    if (b_norm == 0.0) {
        out.x.assign(n, 0.0);
        out.report.converged = true;
        return out;
    }

    Vector r(n), z(n), p(n), q(n);
    const auto true_residual = [&] {
        op.apply(x, q);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        return norm(r) / b_norm;
    };

    double rel = true_residual();
    std::size_t it = 0;
    bool restart = true;
    double rz = 0.0;
    while (rel > options.tolerance) {
        if (it >= max_iter) {
            out.report.relative_residual = true_residual();
            out.report.iterations = it;
            std::ostringstream msg;
            msg << "no convergence after " << it << " iterations (relative residual "
                << out.report.relative_residual << ")";
            throw SolverError(msg.str(), out.report);
        }
        precond.apply(r, z);
        const double rz_new = dot(r, z);
        if (restart) {
            p = z;
            restart = false;
        } else {
            const double beta = rz_new / rz;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        rz = rz_new;

        op.apply(p, q);
        const double curvature = dot(p, q);
        if (!(curvature > 0.0)) {
            out.report.relative_residual = rel;
            out.report.iterations = it;
            std::ostringstream msg;
            msg << (curvature < 0.0 ? "negative curvature" : "zero curvature")
                << " detected at iteration " << it << " (p.Kp = " << curvature << ")";
            throw SolverError(msg.str(), out.report);
        }
        const double alpha = rz / curvature;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        project_out(kernel, x);
        ++it;
        rel = norm(r) / b_norm;
        if (rel <= options.tolerance) {
            // The recursive residual drifts; confirm before exiting.
            rel = true_residual();
            restart = true;
        }
    }
    out.report.relative_residual = true_residual();
    out.report.iterations = it;
    out.report.converged = true;
    out.x = std::move(x);
    return out;
}

}  // namespace

std::vector<double> solve(const CsrMatrix& matrix, std::span<const double> rhs,
                          const SolverOptions& options, SolveReport* report) {
    const std::size_t n = matrix.size();
    if (rhs.size() != n) throw Error("solver", "rhs size does not match the matrix");
    Vector x(n, 0.0);
    if (!options.initial_guess.empty()) {
        if (options.initial_guess.size() != n) throw Error("solver", "initial guess size mismatch");
        x = options.initial_guess;
    }
    CoreResult result = conjugate_gradient(matrix, Vector(rhs.begin(), rhs.end()), std::move(x),
                                           options, {});
    if (report != nullptr) *report = result.report;
    return std::move(result.x);
}

SolveResult solve(const LinearSystem& system, const SolverOptions& options) {
    const std::size_t n = system.dofs.size();
    if (system.matrix.size() != n || system.rhs.size() != n) {
        throw Error("solver", "system dimensions are inconsistent");
    }

    std::vector<Vector> kernel;
    if (options.deflate_translations) {
        const Vector diag = system.matrix.diagonal();
        const double max_diag = diag.empty() ? 0.0 : *std::max_element(diag.begin(), diag.end());
        kernel = translation_kernel(system, Operator(system.matrix, options.tikhonov_shift * max_diag));
    }

    Vector x(n, 0.0);
    if (!options.initial_guess.empty()) {
        if (options.initial_guess.size() != n) throw Error("solver", "initial guess size mismatch");
        x = system.to_local(options.initial_guess);
        const std::vector<bool> mask = system.constrained_mask();
        for (std::size_t i = 0; i < n; ++i) {
            if (mask[i]) x[i] = 0.0;
        }
    }

    CoreResult core = conjugate_gradient(system.matrix, system.rhs, std::move(x), options, kernel);
    SolveResult result;
    result.displacement = system.to_global(core.x);
    result.report = core.report;
    result.report.rotation_drift = rotation_drift(system, result.displacement);
    return result;
}

}  // namespace membrane
