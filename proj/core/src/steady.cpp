#include "xpm/steady.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "xpm/analytic.hpp"
#include "xpm/errors.hpp"

namespace xpm {

SolveReport solve_checked(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& rhs, const SolveOptions& opt) {
    if (m.rows() != m.cols() || m.rows() != rhs.size()) throw ValidationError("solve: shape mismatch");
    SolveReport rep;
    if (!m.allFinite()) throw SingularMatrix(0.0);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    // the rcond estimate is meaningless once a pivot vanishes (Eigen reports 1)
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    rep.rcond = pivots.minCoeff() <= opt.min_rcond * pivots.maxCoeff() ? 0.0 : lu.rcond();
    if (!(rep.rcond >= opt.min_rcond)) throw SingularMatrix(rep.rcond);

    const double scale = rhs.norm();
    rep.x = lu.solve(rhs);
    if (scale == 0.0) return rep;
    Eigen::VectorXcd r = rhs - m * rep.x;
    rep.relative_residual = r.norm() / scale;
    for (int k = 0; k < opt.max_refinements && !(rep.relative_residual <= opt.residual_tol); ++k) {
        rep.x += lu.solve(r);
        r = rhs - m * rep.x;
        rep.relative_residual = r.norm() / scale;
    }
    if (!(rep.relative_residual <= opt.residual_tol)) throw SingularMatrix(rep.rcond);
    return rep;
}

Eigen::VectorXcd solve_amplitudes(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& rhs, const SolveOptions& opt) {
    return solve_checked(m, rhs, opt).x;
}

Amplitudes oracle_amplitudes(const SystemParams& p, const SolveOptions& opt) {
    if (p.scheme.system == SystemId::System3) return oracle_amplitudes(strong_part(p), opt);
    const RwaSystem sys = rwa_matrix(p);
    const Eigen::VectorXcd x = solve_amplitudes(sys.matrix, sys.rhs, opt);
    Amplitudes a;
    if (p.scheme.system == SystemId::System2) {
        a.b.resize(3);
        a.b << 1.0, x(0), x(1);
        return a;
    }
    a.b.resize(4);
    if (sys.normalization == Normalization::CptPair) {
        a.b << x(0), 1.0, x(1), x(2);
        a.b /= std::sqrt(std::norm(x(0)) + 1.0);
    } else {
        a.b << 1.0, x(0), x(1), x(2);
    }
    return a;
}

Amplitudes oracle_perturbation(const SystemParams& p, const SolveOptions& opt) {
    if (p.scheme.system != SystemId::System3) throw CaseError("perturbation amplitudes exist for system3 only");
    const Amplitudes u = oracle_amplitudes(strong_part(p), opt);
    const RwaSystem sys = rwa_matrix(p, u);
    Amplitudes d;
    d.b = solve_amplitudes(sys.matrix, sys.rhs, opt);
    return d;
}

cplx oracle_coherence(const SystemParams& p, int bra, int ket, const SolveOptions& opt) {
    const Amplitudes u = oracle_amplitudes(p, opt);
    if (p.scheme.system == SystemId::System3) {
        const Amplitudes d = oracle_perturbation(p, opt);
        return std::conj(u(bra)) * d(ket);
    }
    return u.product(bra, ket);
}

double DensityState::trace_error() const { return std::abs(rho.trace() - 1.0); }

double DensityState::hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double DensityState::min_eigenvalue() const {
    const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityState::check(double trace_tol, double herm_tol, double pos_tol) const {
    if (trace_error() > trace_tol) throw ValidationError("density matrix trace differs from 1");
    if (hermiticity_error() > herm_tol) throw ValidationError("density matrix is not Hermitian");
    if (min_eigenvalue() < pos_tol) throw ValidationError("density matrix has a negative eigenvalue");
}

DensityState pure_state(const LevelScheme& scheme, int level) {
    const int n = scheme.size();
    if (level < 1 || level > n) throw ValidationError("pure_state: level out of range");
    DensityState s;
    s.rho = Eigen::MatrixXcd::Zero(n, n);
    s.rho(level - 1, level - 1) = 1.0;
    for (const auto& l : scheme.levels) s.basis.push_back(l.label);
    return s;
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho) {
    const Eigen::Index n = rho.rows();
    Eigen::VectorXcd v(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = rho(i, j);
    return v;
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int dim) {
    Eigen::MatrixXcd rho(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) rho(i, j) = v(i * dim + j);
    return rho;
}

double Liouvillian::trace_defect() const {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < superop.cols(); ++k) {
        cplx s{};
        for (int i = 0; i < dim; ++i) s += superop(i * dim + i, k);
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

Liouvillian build_liouvillian(const SystemParams& p) {
    p.validate();
    const Eigen::MatrixXcd h = rwa_hamiltonian(p);
    const int n = p.scheme.size();
    Liouvillian l;
    l.dim = n;
    l.decays = p.scheme.decays;
    for (const auto& lv : p.scheme.levels) l.basis.push_back(lv.label);
    l.superop = Eigen::MatrixXcd::Zero(n * n, n * n);
    auto& L = l.superop;
    const cplx I{0.0, 1.0};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                L(i * n + j, k * n + j) += -I * h(i, k);
                L(i * n + j, i * n + k) += I * h(k, j);
            }
    for (const auto& d : p.scheme.decays) {
        const int f = d.from - 1, t = d.to - 1;
        L(t * n + t, f * n + f) += d.rate;
        for (int j = 0; j < n; ++j) {
            L(f * n + j, f * n + j) -= d.rate / 2.0;
            L(j * n + f, j * n + f) -= d.rate / 2.0;
        }
    }
    return l;
}

namespace {

// Dormand-Prince 5(4) tableau; the generator is autonomous so stage times are not needed
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

} // namespace

EvolveReport evolve(const Liouvillian& l, const DensityState& rho0, double t_final, const EvolveOptions& opt) {
    if (rho0.rho.rows() != l.dim || rho0.rho.cols() != l.dim) throw ValidationError("evolve: dimension mismatch");
    if (!(t_final >= 0.0)) throw ValidationError("evolve: t_final must be >= 0");
    const auto& L = l.superop;

    Eigen::VectorXcd y = vec(rho0.rho);
    Eigen::VectorXcd k1 = L * y, k2, k3, k4, k5, k6, k7, y5, err;
    EvolveReport rep;
    rep.state = rho0;
    rep.residual = k1.norm();
    double t = 0.0, h = std::min(opt.initial_step, t_final > 0.0 ? t_final : opt.initial_step);
    std::size_t steps = 0;

    while (rep.residual >= opt.residual_tol && t < t_final) {
        if (steps >= opt.max_steps)
            throw NonConvergence("evolve: step budget exhausted", t, rep.residual, steps);
        h = std::min(h, t_final - t);
        k2 = L * (y + h * (a21 * k1));
        k3 = L * (y + h * (a31 * k1 + a32 * k2));
        k4 = L * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = L * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = L * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = L * y5;
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double acc = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
            acc += std::norm(err(i)) / (sc * sc);
        }
        const double en = std::sqrt(acc / static_cast<double>(y.size()));
        ++steps;
        if (!std::isfinite(en)) throw NonConvergence("evolve: non-finite state", t, rep.residual, steps);
        if (en <= 1.0) {
            t += h;
            y = y5;
            k1 = k7;
            rep.residual = k7.norm();
        }
        const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        h *= factor;
        if (h < 1e-14 * std::max(1.0, t)) throw NonConvergence("evolve: step size underflow", t, rep.residual, steps);
    }

    rep.state.rho = unvec(y, l.dim);
    rep.t_reached = t;
    rep.steps = steps;
    rep.converged = rep.residual < opt.residual_tol;
    if (!rep.converged && opt.require_convergence)
        throw NonConvergence("evolve: residual above tolerance at t_final", t, rep.residual, steps);
    return rep;
}

EvolveReport propagate(const Liouvillian& l, const DensityState& rho0, double t_max, double residual_tol,
                       double change_tol) {
    if (rho0.rho.rows() != l.dim || rho0.rho.cols() != l.dim) throw ValidationError("propagate: state size mismatch");
    EvolveReport rep;
    Eigen::VectorXcd v = vec(rho0.rho);
    rep.residual = (l.superop * v).norm();
    const double norm = l.superop.cwiseAbs().rowwise().sum().maxCoeff();
    if (rep.residual < residual_tol || norm == 0.0) {
        rep.state = rho0;
        rep.converged = true;
        return rep;
    }
    Eigen::RowVectorXcd trace_row = Eigen::RowVectorXcd::Zero(l.superop.cols());
    for (int i = 0; i < l.dim; ++i) trace_row(i * l.dim + i) = 1.0;
    double dt = 1.0 / norm;
    Eigen::MatrixXcd step = (l.superop * dt).exp();
    double t = 0.0;
    while (true) {
        Eigen::VectorXcd next = step * v;
        if (!next.allFinite()) throw NonConvergence("propagate: non-finite state", t, rep.residual, rep.steps);
        next /= unvec(next, l.dim).trace();
        const double change = (next - v).norm();
        v = std::move(next);
        t += dt;
        ++rep.steps;
        rep.residual = (l.superop * v).norm();
        if (rep.residual < residual_tol && change < change_tol) break;
        if (t >= t_max) throw NonConvergence("propagate: horizon reached", t, rep.residual, rep.steps);
        step = step * step;
        // squaring amplifies rounding along the trace direction; restore w^T P = w^T
        const Eigen::RowVectorXcd defect = trace_row - trace_row * step;
        step += trace_row.adjoint() * defect / static_cast<double>(l.dim);
        dt *= 2.0;
    }
    Eigen::MatrixXcd rho = unvec(v, l.dim);
    rho /= rho.trace();
    rep.state.rho = 0.5 * (rho + rho.adjoint());
    rep.state.basis = l.basis;
    rep.t_reached = t;
    rep.converged = true;
    return rep;
}

SteadyReport steady_state(const Liouvillian& l, const SteadyOptions& opt) {
    const Eigen::Index n = l.superop.rows();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(l.superop, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    SteadyReport rep;
    rep.null_dimension = 0;
    for (Eigen::Index k = 0; k < n; ++k)
        if (s(k) < opt.degeneracy_threshold * smax) ++rep.null_dimension;
    rep.sigma_ratio = n >= 2 && smax > 0.0 ? s(n - 2) / smax : 0.0;

    const bool degenerate = smax == 0.0 || rep.sigma_ratio < opt.degeneracy_threshold;
    if (!degenerate) {
        rep.null_dimension = 1;
        Eigen::MatrixXcd rho = unvec(svd.matrixV().col(n - 1), l.dim);
        rho /= rho.trace();
        rep.state.rho = 0.5 * (rho + rho.adjoint());
        rep.state.basis = l.basis;
        return rep;
    }
    if (smax == 0.0) rep.null_dimension = static_cast<int>(n);

    const std::string fallback = "propagation from |" + std::to_string(opt.fallback_level) + "><" +
                                 std::to_string(opt.fallback_level) + "|";
    if (!opt.allow_fallback) throw DegenerateSteadyState(rep.null_dimension, "none", "fallback disabled");
    if (opt.fallback_level < 1 || opt.fallback_level > l.dim)
        throw ValidationError("steady_state: fallback level out of range");
    DensityState start;
    start.rho = Eigen::MatrixXcd::Zero(l.dim, l.dim);
    start.rho(opt.fallback_level - 1, opt.fallback_level - 1) = 1.0;
    start.basis = l.basis;
    try {
        auto ev = propagate(l, start, opt.fallback_time, opt.fallback_tol);
        rep.state = std::move(ev.state);
        rep.used_fallback = true;
        return rep;
    } catch (const NonConvergence& e) {
        throw DegenerateSteadyState(rep.null_dimension, fallback, e.what());
    }
}

SteadyReport lindblad_steady_state(const SystemParams& p, const SteadyOptions& opt) {
    return steady_state(build_liouvillian(p), opt);
}

} // namespace xpm
