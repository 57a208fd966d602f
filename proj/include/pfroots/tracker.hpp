#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "pfroots/bezout.hpp"
#include "pfroots/polynomial.hpp"
#include "pfroots/rng.hpp"
#include "pfroots/start_system.hpp"

namespace pfroots {

struct TrackerConfig {
    std::uint64_t seed = 0;
    double corrector_tol = 1e-10;
    int max_newton_iters = 3;
    double initial_step = 0.05;
    double min_step = 1e-14;
    double endpoint_tol = 1e-12;
    double infinity_threshold = 1e-8;
    double cluster_tol = 1e-6;
    int threads = 1;

    // endgame-free endpoint handling: once t drops below end_zone the step
    // is capped at t/2, tracking stops at t_cutoff, and the endpoint is
    // polished by Newton on the t = 0 system.
    double end_zone = 0.02;
    double t_cutoff = 1e-6;
    int polish_iters = 50;
    double singular_tol = 1e-8;
    int max_steps = 20000;
    int successes_to_grow = 5;
    double max_step = 0.1;

    // paths whose homogenizing coordinate has collapsed this far inside
    // the end zone are cut short; the endpoint polish settles whether
    // they are genuinely at infinity. A normalized homogenizing
    // coordinate of 1e-4 puts the dehomogenized point at norm ~1e4.
    double truncate_eta = 1e-4;
    double truncate_t = 0.02;
};

enum class PathStatus { Finite, AtInfinity, Failed };

struct PathResult {
    PathStatus status = PathStatus::Failed;
    Eigen::VectorXcd endpoint;  // dehomogenized affine point when Finite
    double residual = std::numeric_limits<double>::infinity();
    double condition = 0.0;     // smallest singular value of the affine Jacobian
    int steps = 0;
    double t_end = 0.0;         // where tracking stopped (0 = ran to the cutoff)
    double eta = 0.0;           // normalized homogenizing coordinate at the end
};

struct DistinctSolution {
    Eigen::VectorXcd point;
    int multiplicity = 1;
    bool singular = false;
    double residual = 0.0;
    double condition = 0.0;
};

struct Accounting {
    long long start_points = 0;
    long long finite = 0;
    long long at_infinity = 0;
    long long failed = 0;
};

struct SolutionSet {
    std::vector<DistinctSolution> distinct;
    Accounting accounting;
    std::uint64_t seed = 0;
    std::vector<PathResult> paths;
};

struct CompletenessReport {
    BigInt expected;
    long long finite = 0;
    long long at_infinity = 0;
    long long failed = 0;
    bool conserved = false;
    bool certified = false;
};

/// A run is certified complete when every path is accounted for against the
/// multi-homogeneous root count and none of them failed.
inline CompletenessReport verify_count(const SolutionSet& sol, const BigInt& bound) {
    CompletenessReport rep;
    rep.expected = bound;
    rep.finite = sol.accounting.finite;
    rep.at_infinity = sol.accounting.at_infinity;
    rep.failed = sol.accounting.failed;
    rep.conserved = BigInt(rep.finite + rep.at_infinity + rep.failed) == bound;
    rep.certified = rep.conserved && rep.failed == 0;
    return rep;
}

namespace detail {

/// Solve A x = b by partial-pivot elimination, destroying A and writing
/// the solution into b. One fused pass keeps the hot loop free of the
/// factorization copies a reusable decomposition would make.
inline bool gauss_solve(Eigen::MatrixXcd& a, Eigen::VectorXcd& b) {
    const int n = int(a.rows());
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        double best = std::abs(a(k, k).real()) + std::abs(a(k, k).imag());
        for (int i = k + 1; i < n; ++i) {
            const double mag = std::abs(a(i, k).real()) + std::abs(a(i, k).imag());
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best)) return false;
        if (pivot != k) {
            a.row(k).tail(n - k).swap(a.row(pivot).tail(n - k));
            std::swap(b[k], b[pivot]);
        }
        const Complex inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) a(i, k) *= inv;
        for (int j = k + 1; j < n; ++j) {
            const Complex akj = a(k, j);
            if (akj == Complex(0, 0)) continue;
            for (int i = k + 1; i < n; ++i) a(i, j) -= a(i, k) * akj;
        }
        const Complex bk = b[k];
        if (bk != Complex(0, 0))
            for (int i = k + 1; i < n; ++i) b[i] -= a(i, k) * bk;
    }
    for (int k = n - 1; k >= 0; --k) {
        Complex acc = b[k];
        for (int j = k + 1; j < n; ++j) acc -= a(k, j) * b[j];
        b[k] = acc / a(k, k);
    }
    return b.allFinite();
}

/// Shared read-only data for one tracking run plus the per-path stepper.
class HomotopyEngine {
public:
    HomotopyEngine(const PolynomialSystem& sys, const HomogenizedSystem& hom,
                   const StartSystem& start, Complex gamma, const TrackerConfig& cfg)
        : sys_(sys), hom_(hom), start_(start), gamma_(gamma), cfg_(cfg) {
        n_eq_ = hom_.equation_count();
        dim_ = hom_.layout.total;
        coef_scale_ = 1.0 + sys.max_coefficient_magnitude();
    }

    PathResult track(const Eigen::VectorXcd& start_point) const {
        PathResult result;
        Workspace ws(n_eq_, dim_);
        Eigen::VectorXcd w = start_point;
        double t = 1.0;
        double dt = cfg_.initial_step;
        int successes = 0;
        bool underflow = false;

        while (t > cfg_.t_cutoff) {
            if (result.steps++ > cfg_.max_steps) {
                underflow = true;
                break;
            }
            double step = std::min(dt, t);
            if (t < cfg_.end_zone) step = std::min(step, 0.5 * t);
            if (t - step < cfg_.t_cutoff && t > 2.0 * cfg_.t_cutoff) step = t - cfg_.t_cutoff;

            if (predict_correct(ws, w, t, step)) {
                t -= step;
                if (++successes >= cfg_.successes_to_grow) {
                    dt = std::min(2.0 * dt, cfg_.max_step);
                    successes = 0;
                }
                if (t < cfg_.truncate_t && normalized_eta(w) <= cfg_.truncate_eta)
                    break;  // heading to infinity, the polish will confirm
            } else {
                successes = 0;
                dt *= 0.5;
                if (dt < cfg_.min_step) {
                    underflow = true;
                    break;
                }
            }
        }

        result.t_end = t;
        if (underflow && t > cfg_.end_zone) {
            // the path got stuck far from the end; no endpoint to speak of
            result.status = PathStatus::Failed;
            return result;
        }
        finish(ws, w, underflow, result);
        return result;
    }

    const GroupLayout& layout() const { return hom_.layout; }

private:
    struct Workspace {
        Workspace(int n_eq, int dim)
            : jac(dim, dim), h(dim), ht(dim), k1(dim), k2(dim), k3(dim), k4(dim),
              wtmp(dim), delta(dim) {
            (void)n_eq;
        }
        Eigen::MatrixXcd jac;
        Eigen::VectorXcd h, ht, k1, k2, k3, k4, wtmp, delta;
    };

    // H(w,t) = gamma t G(w) + (1-t) F(w) on the equation rows; the patch
    // rows are independent of t. Fills any of value, t-derivative,
    // Jacobian; gradient contributions accumulate straight into jac rows.
    void eval(Workspace& ws, const Eigen::VectorXcd& w, double t,
              bool want_value, bool want_ht, bool want_jac) const {
        const Complex gt = gamma_ * t;
        const Complex mt(1.0 - t, 0.0);
        if (want_jac) ws.jac.setZero();
        for (int i = 0; i < n_eq_; ++i) {
            const Complex fval = eval_target(ws, i, w, want_jac ? &mt : nullptr);
            const Complex gval =
                (t != 0.0 || want_ht) ? eval_start(ws, i, w, want_jac ? &gt : nullptr)
                                      : Complex(0, 0);
            if (want_value) ws.h[i] = gt * gval + mt * fval;
            if (want_ht) ws.ht[i] = gamma_ * gval - fval;
        }
        for (int j = 0; j < layout().group_count(); ++j) {
            const int row = n_eq_ + j;
            const int off = layout().offset[size_t(j)];
            const int m = layout().group_size(j);
            if (want_value) {
                // plain bilinear sum; the patch must stay holomorphic in w
                Complex acc = -1.0;
                for (int c = 0; c < m; ++c) acc += start_.patches[size_t(j)][c] * w[off + c];
                ws.h[row] = acc;
            }
            if (want_ht) ws.ht[row] = 0.0;
            if (want_jac)
                ws.jac.row(row).segment(off, m) = start_.patches[size_t(j)].transpose();
        }
    }

    // Value of equation i of the homogenized target; when weight is given,
    // weight * gradient is added into jac row i.
    Complex eval_target(Workspace& ws, int i, const Eigen::VectorXcd& w,
                        const Complex* weight) const {
        Complex value = 0.0;
        for (const HomogenizedTerm& term : hom_.equations[size_t(i)]) {
            const auto& f = term.factors;
            const int nf = int(f.size());
            if (nf == 0) {
                value += term.coefficient;
                continue;
            }
            // leave-one-out products give the gradient without division
            Complex prefix = term.coefficient;
            if (!weight) {
                for (int p = 0; p < nf; ++p) prefix *= w[f[size_t(p)]];
                value += prefix;
                continue;
            }
            thread_local std::vector<Complex> suf;
            suf.resize(size_t(nf) + 1);
            suf[size_t(nf)] = 1.0;
            for (int p = nf - 1; p >= 0; --p)
                suf[size_t(p)] = suf[size_t(p) + 1] * w[f[size_t(p)]];
            value += prefix * suf[0];
            for (int p = 0; p < nf; ++p) {
                ws.jac(i, f[size_t(p)]) += *weight * (prefix * suf[size_t(p) + 1]);
                prefix *= w[f[size_t(p)]];
            }
        }
        return value;
    }

    Complex eval_start(Workspace& ws, int i, const Eigen::VectorXcd& w,
                       const Complex* weight) const {
        const auto& factors = start_.factors[size_t(i)];
        const int nf = int(factors.size());
        thread_local std::vector<Complex> vals, suf;
        vals.resize(size_t(nf));
        for (int p = 0; p < nf; ++p) {
            const auto& fac = factors[size_t(p)];
            const int off = layout().offset[size_t(fac.group)];
            Complex v = 0.0;
            for (int m = 0; m < fac.coeffs.size(); ++m) v += fac.coeffs[m] * w[off + m];
            vals[size_t(p)] = v;
        }
        if (!weight) {
            Complex prod = 1.0;
            for (int p = 0; p < nf; ++p) prod *= vals[size_t(p)];
            return prod;
        }
        suf.resize(size_t(nf) + 1);
        suf[size_t(nf)] = 1.0;
        for (int p = nf - 1; p >= 0; --p) suf[size_t(p)] = suf[size_t(p) + 1] * vals[size_t(p)];
        Complex prefix = 1.0;
        for (int p = 0; p < nf; ++p) {
            const auto& fac = factors[size_t(p)];
            const Complex other = *weight * (prefix * suf[size_t(p) + 1]);
            const int off = layout().offset[size_t(fac.group)];
            for (int m = 0; m < fac.coeffs.size(); ++m)
                ws.jac(i, off + m) += other * fac.coeffs[m];
            prefix *= vals[size_t(p)];
        }
        return suf[0];
    }

    // Davidenko right-hand side dw/dt = -J^{-1} H_t at (w, t).
    bool derivative(Workspace& ws, const Eigen::VectorXcd& w, double t,
                    Eigen::VectorXcd& out) const {
        eval(ws, w, t, false, true, true);
        out = -ws.ht;
        return gauss_solve(ws.jac, out);
    }

    bool predict_correct(Workspace& ws, Eigen::VectorXcd& w, double t, double step) const {
        // classical RK4 on the Davidenko ODE, stepping t downward
        const double h = -step;
        if (!derivative(ws, w, t, ws.k1)) return false;
        ws.wtmp = w + (h / 2) * ws.k1;
        if (!derivative(ws, ws.wtmp, t - step / 2, ws.k2)) return false;
        ws.wtmp = w + (h / 2) * ws.k2;
        if (!derivative(ws, ws.wtmp, t - step / 2, ws.k3)) return false;
        ws.wtmp = w + h * ws.k3;
        if (!derivative(ws, ws.wtmp, t - step, ws.k4)) return false;
        ws.wtmp = w + (h / 6) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);

        // Newton corrector at the new t
        const double t_next = t - step;
        for (int it = 0; it < cfg_.max_newton_iters; ++it) {
            eval(ws, ws.wtmp, t_next, true, false, true);
            ws.delta = -ws.h;
            if (!gauss_solve(ws.jac, ws.delta)) return false;
            ws.wtmp += ws.delta;
            const double wnorm = ws.wtmp.template lpNorm<Eigen::Infinity>();
            if (ws.delta.template lpNorm<Eigen::Infinity>() <=
                cfg_.corrector_tol * (1.0 + wnorm)) {
                w = ws.wtmp;
                return true;
            }
        }
        return false;
    }

    // Newton on the t = 0 system (target + patches), damped, keeping the
    // best iterate. The least-squares step stays well defined on the
    // singular Jacobians that arise at multiple points and at infinity,
    // where it walks the homogenizing coordinate toward zero.
    void polish_target(Workspace& ws, Eigen::VectorXcd& w) const {
        const auto residual_of = [&](const Eigen::VectorXcd& v) {
            eval(ws, v, 0.0, true, false, false);
            return ws.h.template lpNorm<Eigen::Infinity>();
        };
        Eigen::VectorXcd best = w;
        double best_res = residual_of(w);
        Eigen::VectorXcd cur = w;
        for (int it = 0; it < cfg_.polish_iters; ++it) {
            eval(ws, cur, 0.0, true, false, true);
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(ws.jac);
            Eigen::VectorXcd delta = cod.solve(-ws.h);
            if (!delta.allFinite()) break;
            double lambda = 1.0;
            Eigen::VectorXcd chosen;
            double chosen_res = std::numeric_limits<double>::infinity();
            for (int half = 0; half < 3; ++half) {
                Eigen::VectorXcd trial = cur + lambda * delta;
                const double res = residual_of(trial);
                if (res < chosen_res) {
                    chosen = trial;
                    chosen_res = res;
                }
                if (res < best_res) break;
                lambda *= 0.5;
            }
            cur = chosen;
            if (chosen_res < best_res) {
                best_res = chosen_res;
                best = chosen;
            }
            const double wnorm = cur.template lpNorm<Eigen::Infinity>();
            if (delta.template lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + wnorm)) break;
            if (best_res <= 1e-14 * coef_scale_ && it >= 2) break;
        }
        w = best;
    }

    double normalized_eta(const Eigen::VectorXcd& w) const {
        double eta = std::numeric_limits<double>::infinity();
        for (int j = 0; j < layout().group_count(); ++j) {
            const int off = layout().offset[size_t(j)];
            const double scale =
                w.segment(off, layout().group_size(j)).template lpNorm<Eigen::Infinity>();
            if (scale == 0.0) return 0.0;
            eta = std::min(eta, std::abs(w[layout().homog_coord(j)]) / scale);
        }
        return eta;
    }

    void finish(Workspace& ws, Eigen::VectorXcd w, bool underflow, PathResult& result) const {
        polish_target(ws, w);

        const double eta = normalized_eta(w);
        result.eta = eta;
        if (eta <= cfg_.infinity_threshold) {
            result.status = PathStatus::AtInfinity;
            return;
        }

        // dehomogenize and sharpen on the affine system
        Eigen::VectorXcd z(sys_.variable_count());
        for (int v = 0; v < sys_.variable_count(); ++v) {
            const int g = layout().var_group[size_t(v)];
            z[v] = w[layout().var_to_coord[size_t(v)]] / w[layout().homog_coord(g)];
        }
        Eigen::VectorXcd fz = evaluate(sys_, z);
        double res = fz.template lpNorm<Eigen::Infinity>();
        for (int it = 0; it < 10 && res > 1e-15 * coef_scale_; ++it) {
            Eigen::MatrixXcd jz = jacobian(sys_, z);
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(jz);
            Eigen::VectorXcd delta = lu.solve(-fz);
            if (!delta.allFinite()) break;
            Eigen::VectorXcd trial = z + delta;
            Eigen::VectorXcd ftrial = evaluate(sys_, trial);
            const double rtrial = ftrial.template lpNorm<Eigen::Infinity>();
            if (rtrial >= res) break;
            z = trial;
            fz = ftrial;
            res = rtrial;
        }

        if (res <= cfg_.endpoint_tol * coef_scale_ && !underflow) {
            result.status = PathStatus::Finite;
            result.endpoint = z;
            result.residual = res;
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jacobian(sys_, z));
            result.condition = svd.singularValues().tail(1)[0];
        } else if (eta <= cfg_.truncate_eta) {
            // no affine root here and the dehomogenized point has norm
            // beyond 1/truncate_eta: a diverging path, not a failure
            result.status = PathStatus::AtInfinity;
            result.residual = res;
        } else {
            result.status = PathStatus::Failed;
            result.residual = res;
        }
    }

    const PolynomialSystem& sys_;
    const HomogenizedSystem& hom_;
    const StartSystem& start_;
    Complex gamma_;
    const TrackerConfig& cfg_;
    int n_eq_ = 0;
    int dim_ = 0;
    double coef_scale_ = 1.0;
};

inline bool lex_less(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

}  // namespace detail

/// Track every start point of the gamma-trick homotopy from t = 1 to t = 0
/// and classify the endpoints. Paths are independent work items; results
/// are merged by path index and sorted before clustering, so the outcome
/// does not depend on the thread count.
inline SolutionSet track_all(const PolynomialSystem& sys, const TrackerConfig& cfg = {}) {
    if (sys.equation_count() != sys.variable_count())
        throw DimensionError("track_all: system must be square, got " +
                             std::to_string(sys.equation_count()) + " equations in " +
                             std::to_string(sys.variable_count()) + " variables");
    Structure structure{sys.groups};
    const DegreeTable dt = degree_table(sys, structure);
    const BigInt bound = multihom_bezout(dt);

    Rng rng(cfg.seed);
    const Complex gamma = rng.unit_complex();
    const StartSystem start = build_start_system(dt, sys.groups, rng);

    // track a row-normalized copy so the homotopy blends systems of
    // comparable scale; roots are unchanged and the final residual checks
    // run against the original equations
    PolynomialSystem scaled = sys;
    for (Polynomial& poly : scaled.polynomials) {
        double m = 0.0;
        for (const Term& t : poly.terms) m = std::max(m, std::abs(t.coefficient));
        if (m > 0.0)
            for (Term& t : poly.terms) t.coefficient /= m;
    }
    const HomogenizedSystem hom = homogenize(scaled, dt);
    if (BigInt(start.start_points.size()) != bound)
        throw std::runtime_error("start point enumeration disagrees with the root count");

    detail::HomotopyEngine engine(sys, hom, start, gamma, cfg);

    SolutionSet sol;
    sol.seed = cfg.seed;
    sol.accounting.start_points = long(start.start_points.size());
    sol.paths.resize(start.start_points.size());

    const int n_paths = int(start.start_points.size());
    const int n_threads = std::max(1, std::min(cfg.threads, n_paths == 0 ? 1 : n_paths));
    if (n_threads <= 1) {
        for (int p = 0; p < n_paths; ++p)
            sol.paths[size_t(p)] = engine.track(start.start_points[size_t(p)]);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int th = 0; th < n_threads; ++th)
            pool.emplace_back([&]() {
                for (int p = next.fetch_add(1); p < n_paths; p = next.fetch_add(1))
                    sol.paths[size_t(p)] = engine.track(start.start_points[size_t(p)]);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<int> finite_paths;
    for (int p = 0; p < n_paths; ++p) {
        switch (sol.paths[size_t(p)].status) {
            case PathStatus::Finite:
                ++sol.accounting.finite;
                finite_paths.push_back(p);
                break;
            case PathStatus::AtInfinity: ++sol.accounting.at_infinity; break;
            case PathStatus::Failed: ++sol.accounting.failed; break;
        }
    }

    // deterministic merge: sort endpoints, then cluster neighbors
    std::sort(finite_paths.begin(), finite_paths.end(), [&](int a, int b) {
        return detail::lex_less(sol.paths[size_t(a)].endpoint, sol.paths[size_t(b)].endpoint);
    });
    const double tol = cfg.cluster_tol;
    std::vector<std::vector<int>> clusters;
    for (int p : finite_paths) {
        const auto& z = sol.paths[size_t(p)].endpoint;
        bool merged = false;
        for (auto it = clusters.rbegin(); it != clusters.rend(); ++it) {
            const auto& rep = sol.paths[size_t((*it)[0])].endpoint;
            if (z[0].real() - rep[0].real() > tol) break;   // sorted: no earlier match
            if ((z - rep).template lpNorm<Eigen::Infinity>() <= tol) {
                it->push_back(p);
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({p});
    }
    for (const auto& cluster : clusters) {
        int best = cluster[0];
        for (int p : cluster)
            if (sol.paths[size_t(p)].residual < sol.paths[size_t(best)].residual) best = p;
        DistinctSolution d;
        d.point = sol.paths[size_t(best)].endpoint;
        d.multiplicity = int(cluster.size());
        d.residual = sol.paths[size_t(best)].residual;
        d.condition = sol.paths[size_t(best)].condition;
        d.singular = d.condition < cfg.singular_tol || d.multiplicity > 1;
        sol.distinct.push_back(std::move(d));
    }
    return sol;
}

}  // namespace pfroots
