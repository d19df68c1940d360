#pragma once

// Numerical ground truth: a checked complex linear solve of the amplitude
// equations and a Lindblad density-matrix steady state.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xpm/model.hpp"

namespace xpm {

struct SolveOptions {
    /// Reciprocal condition estimate below which SingularMatrix is raised.
    double min_rcond = 1e-14;
    /// Target ||M b - rhs|| / ||rhs|| reached by iterative refinement.
    double residual_tol = 1e-12;
    int max_refinements = 3;
};

struct SolveReport {
    Eigen::VectorXcd x;
    double rcond = 0.0;
    double relative_residual = 0.0;
};

/// LU solve with condition check and iterative refinement.
SolveReport solve_checked(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& rhs, const SolveOptions& opt = {});
Eigen::VectorXcd solve_amplitudes(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& rhs,
                                  const SolveOptions& opt = {});

/// Full amplitude vector b1..bN from the linear system (EIT: b1 = 1; CPT:
/// gauge b2 = 1 then |b1|^2 + |b2|^2 = 1).
Amplitudes oracle_amplitudes(const SystemParams& p, const SolveOptions& opt = {});

/// System3 perturbations db1..db4 around the closed-form EIT amplitudes.
Amplitudes oracle_perturbation(const SystemParams& p, const SolveOptions& opt = {});

/// b_bra* b_ket from the oracle (System3: b_bra* db_ket).
cplx oracle_coherence(const SystemParams& p, int bra, int ket, const SolveOptions& opt = {});

struct DensityState {
    Eigen::MatrixXcd rho;
    std::vector<std::string> basis;

    double trace_error() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;
    /// Throws ValidationError when any invariant is outside tolerance.
    void check(double trace_tol = 1e-10, double herm_tol = 1e-10, double pos_tol = -1e-8) const;
    cplx operator()(int i, int j) const { return rho(i - 1, j - 1); }
};

DensityState pure_state(const LevelScheme& scheme, int level);

/// vec(rho) is row-major: entry i*N + j holds rho_ij.
struct Liouvillian {
    Eigen::MatrixXcd superop;
    int dim = 0;
    std::vector<DecayChannel> decays;
    std::vector<std::string> basis;

    /// max_k |sum_i L(ii, k)|: zero for a trace-preserving generator.
    double trace_defect() const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return superop * v; }
};

Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int dim);

/// -i[H, rho] + sum_k (C rho C^+ - {C^+ C, rho}/2), with H = rwa_hamiltonian(p).
Liouvillian build_liouvillian(const SystemParams& p);

struct EvolveOptions {
    // rtol 1e-10 leaves ||L y|| hovering near ||L|| * rtol once the step reaches
    // the stability limit, above the 1e-10 residual target.
    double rtol = 1e-12;
    double atol = 1e-15;
    /// Early stop once ||L vec(rho)|| falls below this.
    double residual_tol = 1e-10;
    double initial_step = 1e-3;
    std::size_t max_steps = 5'000'000;
    /// Throw NonConvergence if t_final is reached above residual_tol.
    bool require_convergence = true;
};

struct EvolveReport {
    DensityState state;
    double t_reached = 0.0;
    double residual = 0.0;
    std::size_t steps = 0;
    bool converged = false;
};

/// Dormand-Prince 5(4) integration of d vec(rho)/dt = L vec(rho).
EvolveReport evolve(const Liouvillian& l, const DensityState& rho0, double t_final, const EvolveOptions& opt = {});

/// Exact evolution under exp(L t), doubling t by squaring the propagator
/// until ||L vec(rho)|| < residual_tol and the change over the last doubling
/// is below change_tol. Reaches the very long horizons of weakly pumped
/// systems that an explicit integrator cannot.
EvolveReport propagate(const Liouvillian& l, const DensityState& rho0, double t_max, double residual_tol = 1e-10,
                       double change_tol = 1e-9);

struct SteadyOptions {
    /// Degenerate when the second-smallest singular value < threshold * sigma_max.
    double degeneracy_threshold = 1e-8;
    bool allow_fallback = true;
    /// Fallback initial level (population in |level>).
    int fallback_level = 1;
    /// Horizon of the fallback propagation.
    double fallback_time = 1e14;
    double fallback_tol = 1e-10;
};

struct SteadyReport {
    DensityState state;
    int null_dimension = 1;
    bool used_fallback = false;
    double sigma_ratio = 0.0;
};

SteadyReport steady_state(const Liouvillian& l, const SteadyOptions& opt = {});

/// Lindblad steady state for a parameter set.
SteadyReport lindblad_steady_state(const SystemParams& p, const SteadyOptions& opt = {});

} // namespace xpm
