#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <iostream>

#include "biloc/common.hpp"
#include "biloc/sdp.hpp"

namespace biloc {

namespace {

bool solver_trace() {
    static const bool on = std::getenv("BILOC_SOLVER_TRACE") != nullptr;
    return on;
}

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Per-block entry streams (structure-of-arrays, full symmetric expansion).
struct BlockData {
    int32_t n = 0;
    std::vector<int32_t> evar;  // 0-based variable id
    std::vector<int32_t> er, ec;
    std::vector<double> ev;
    std::vector<int32_t> f0r, f0c;
    std::vector<double> f0v;
    // same entries grouped by variable (for the dense congruence mode)
    std::vector<int64_t> var_begin;  // size m+1
    std::vector<int32_t> gr, gc;
    std::vector<double> gv;
};

// One representative entry position per position-orbit of the symmetry
// group (trivial orbits when no usable hints).
struct Rep {
    int32_t var;
    int32_t block;
    int32_t r, c;
    double val;
    double weight;
};

struct Prepared {
    int32_t m = 0;
    std::vector<BlockData> blocks;
    std::vector<Rep> reps;              // sorted by var
    std::vector<int64_t> rep_begin;     // var -> first rep index (size m+1)
};

Prepared prepare(const SdpProblem& p, const SymmetryHints* hints) {
    Prepared out;
    out.m = p.nvars;
    out.blocks.resize(p.blocks.size());
    // global position registry for orbit detection, keyed by (block, r, c, var)
    struct Pos {
        int32_t block, r, c, var;
        double val;
    };
    std::vector<Pos> positions;
    std::unordered_map<uint64_t, int32_t> pos_index;
    auto pos_key = [](int32_t b, int32_t r, int32_t c, int32_t var) {
        return (static_cast<uint64_t>(b) << 52) | (static_cast<uint64_t>(r) << 36) |
               (static_cast<uint64_t>(c) << 20) | static_cast<uint64_t>(var);
    };

    for (size_t b = 0; b < p.blocks.size(); ++b) {
        const auto& blk = p.blocks[b];
        auto& bd = out.blocks[b];
        bd.n = blk.size;
        for (const auto& e : blk.entries) {
            const int32_t r = e.row - 1, c = e.col - 1;
            if (e.matno == 0) {
                bd.f0r.push_back(r);
                bd.f0c.push_back(c);
                bd.f0v.push_back(e.value);
                if (r != c) {
                    bd.f0r.push_back(c);
                    bd.f0c.push_back(r);
                    bd.f0v.push_back(e.value);
                }
            } else {
                const int32_t var = e.matno - 1;
                auto add = [&](int32_t rr, int32_t cc) {
                    bd.evar.push_back(var);
                    bd.er.push_back(rr);
                    bd.ec.push_back(cc);
                    bd.ev.push_back(e.value);
                    pos_index.emplace(pos_key(static_cast<int32_t>(b), rr, cc, var),
                                      static_cast<int32_t>(positions.size()));
                    positions.push_back({static_cast<int32_t>(b), rr, cc, var, e.value});
                };
                add(r, c);
                if (r != c) add(c, r);
            }
        }
    }

    // orbit union-find over variable entry positions
    std::vector<int32_t> parent(positions.size());
    for (size_t i = 0; i < positions.size(); ++i) parent[i] = static_cast<int32_t>(i);
    std::function<int32_t(int32_t)> find = [&](int32_t x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    bool hints_ok = hints != nullptr && !hints->empty();
    if (hints_ok) {
        for (const auto& gen : hints->gens) {
            if (gen.block_image.size() != p.blocks.size() ||
                gen.row_image.size() != p.blocks.size()) {
                hints_ok = false;
                break;
            }
            for (size_t b = 0; b < p.blocks.size() && hints_ok; ++b) {
                const int32_t tb = gen.block_image[b];
                if (tb < 0 || tb >= static_cast<int32_t>(p.blocks.size()) ||
                    p.blocks[static_cast<size_t>(tb)].size != p.blocks[b].size ||
                    static_cast<int32_t>(gen.row_image[b].size()) != p.blocks[b].size) {
                    hints_ok = false;
                }
            }
        }
    }
    if (hints_ok) {
        for (const auto& gen : hints->gens) {
            for (size_t i = 0; i < positions.size() && hints_ok; ++i) {
                const Pos& q = positions[i];
                const int32_t tb = gen.block_image[static_cast<size_t>(q.block)];
                const int32_t tr = gen.row_image[static_cast<size_t>(q.block)][static_cast<size_t>(q.r)];
                const int32_t tc = gen.row_image[static_cast<size_t>(q.block)][static_cast<size_t>(q.c)];
                auto it = pos_index.find(pos_key(tb, tr, tc, q.var));
                if (it == pos_index.end()) {
                    hints_ok = false;
                    break;
                }
                const Pos& img = positions[static_cast<size_t>(it->second)];
                if (std::abs(img.val - q.val) > 1e-12 * (1.0 + std::abs(q.val))) {
                    hints_ok = false;
                    break;
                }
                int32_t a = find(static_cast<int32_t>(i));
                int32_t bb = find(it->second);
                if (a != bb) parent[static_cast<size_t>(std::max(a, bb))] = std::min(a, bb);
            }
            if (!hints_ok) break;
        }
    }
    if (!hints_ok) {
        // trivial orbits
        for (size_t i = 0; i < positions.size(); ++i) parent[i] = static_cast<int32_t>(i);
    }

    std::unordered_map<int32_t, int64_t> root_to_rep;
    std::vector<std::vector<Rep>> by_var(static_cast<size_t>(std::max<int32_t>(out.m, 1)));
    std::vector<int64_t> orbit_sizes;
    std::vector<Rep> rep_list;
    for (size_t i = 0; i < positions.size(); ++i) {
        const int32_t root = find(static_cast<int32_t>(i));
        auto [it, fresh] = root_to_rep.emplace(root, static_cast<int64_t>(rep_list.size()));
        if (fresh) {
            const Pos& q = positions[static_cast<size_t>(root)];
            rep_list.push_back({q.var, q.block, q.r, q.c, q.val, 0.0});
        }
        rep_list[static_cast<size_t>(it->second)].weight += 1.0;
    }
    for (const Rep& r : rep_list) by_var[static_cast<size_t>(r.var)].push_back(r);

    out.rep_begin.assign(static_cast<size_t>(out.m) + 1, 0);
    for (int32_t v = 0; v < out.m; ++v) {
        out.rep_begin[static_cast<size_t>(v) + 1] =
            out.rep_begin[static_cast<size_t>(v)] +
            static_cast<int64_t>(by_var[static_cast<size_t>(v)].size());
    }
    out.reps.reserve(rep_list.size());
    for (int32_t v = 0; v < out.m; ++v) {
        for (const Rep& r : by_var[static_cast<size_t>(v)]) out.reps.push_back(r);
    }

    // per-block entries grouped by variable
    for (auto& bd : out.blocks) {
        const size_t T = bd.evar.size();
        std::vector<int64_t> count(static_cast<size_t>(out.m) + 1, 0);
        for (size_t t = 0; t < T; ++t) ++count[static_cast<size_t>(bd.evar[t]) + 1];
        bd.var_begin.assign(static_cast<size_t>(out.m) + 1, 0);
        for (int32_t v = 0; v < out.m; ++v) {
            bd.var_begin[static_cast<size_t>(v) + 1] =
                bd.var_begin[static_cast<size_t>(v)] + count[static_cast<size_t>(v) + 1];
        }
        bd.gr.resize(T);
        bd.gc.resize(T);
        bd.gv.resize(T);
        std::vector<int64_t> cursor(bd.var_begin.begin(), bd.var_begin.end() - 1);
        for (size_t t = 0; t < T; ++t) {
            const int64_t at = cursor[static_cast<size_t>(bd.evar[t])]++;
            bd.gr[static_cast<size_t>(at)] = bd.er[t];
            bd.gc[static_cast<size_t>(at)] = bd.ec[t];
            bd.gv[static_cast<size_t>(at)] = bd.ev[t];
        }
    }
    return out;
}

// Tr(F_i M) for every i, streamed; M need not be symmetric.
void accumulate_trace(const Prepared& prep, const std::vector<MatrixXd>& M, VectorXd& out) {
    out.setZero();
    for (size_t b = 0; b < prep.blocks.size(); ++b) {
        const BlockData& bd = prep.blocks[b];
        const MatrixXd& Mb = M[b];
        const size_t T = bd.evar.size();
        for (size_t t = 0; t < T; ++t) {
            out[bd.evar[t]] += bd.ev[t] * Mb(bd.ec[t], bd.er[t]);
        }
    }
}

double f0_dot(const Prepared& prep, const std::vector<MatrixXd>& M) {
    double acc = 0.0;
    for (size_t b = 0; b < prep.blocks.size(); ++b) {
        const BlockData& bd = prep.blocks[b];
        const MatrixXd& Mb = M[b];
        for (size_t t = 0; t < bd.f0v.size(); ++t) {
            acc += bd.f0v[t] * Mb(bd.f0c[t], bd.f0r[t]);
        }
    }
    return acc;
}

// Z <- sum_i x_i F_i - F0 per block.
void assemble_lmi(const Prepared& prep, const VectorXd& x, std::vector<MatrixXd>& Z) {
    for (size_t b = 0; b < prep.blocks.size(); ++b) {
        const BlockData& bd = prep.blocks[b];
        MatrixXd& Zb = Z[b];
        Zb.setZero(bd.n, bd.n);
        const size_t T = bd.evar.size();
        for (size_t t = 0; t < T; ++t) {
            Zb(bd.er[t], bd.ec[t]) += x[bd.evar[t]] * bd.ev[t];
        }
        for (size_t t = 0; t < bd.f0v.size(); ++t) {
            Zb(bd.f0r[t], bd.f0c[t]) -= bd.f0v[t];
        }
    }
}

// Schur complement B[i][j] = sum_b Tr(F_i Xinv_b F_j Y_b). Two kernels:
//
//  - orbit-stream: one representative per position-orbit of the symmetry
//    group on the i side, full entry stream on the j side. Cost ~ R*(T+m).
//  - dense congruence: per column j build D = Xinv F_j Y densely, then
//    stream all entries. Cost ~ sum_b T_b n_b^2 + m*T.
//
// Both write disjoint output rows/columns per thread, so the result is
// identical for any thread count.
void build_schur(const Prepared& prep, const std::vector<MatrixXd>& Xinv,
                 const std::vector<MatrixXd>& Y, MatrixXd& B) {
    const int32_t m = prep.m;
    B.setZero(m, m);
    const int nthreads = std::max(1, thread_count());

    int64_t total_entries = 0;
    double cost_dense = 0.0;
    for (const auto& bd : prep.blocks) {
        total_entries += static_cast<int64_t>(bd.evar.size());
        cost_dense += static_cast<double>(bd.evar.size()) * bd.n * bd.n;
    }
    cost_dense += static_cast<double>(m) * static_cast<double>(total_entries);
    const double cost_orbit = static_cast<double>(prep.reps.size()) *
                              (static_cast<double>(total_entries) + static_cast<double>(m));

    if (cost_orbit <= cost_dense) {
        // chunk variables by cumulative rep count
        std::vector<int32_t> chunk_start;
        const int64_t total = static_cast<int64_t>(prep.reps.size());
        const int64_t per = (total + nthreads - 1) / std::max(1, nthreads);
        chunk_start.push_back(0);
        int64_t next_target = per;
        for (int32_t v = 0; v + 1 < m; ++v) {
            if (prep.rep_begin[static_cast<size_t>(v) + 1] >= next_target &&
                chunk_start.back() != v + 1) {
                chunk_start.push_back(v + 1);
                next_target += per;
            }
        }
        chunk_start.push_back(m);
        const int nchunks = static_cast<int>(chunk_start.size()) - 1;

#pragma omp parallel for schedule(static, 1) num_threads(nthreads)
        for (int chunk = 0; chunk < nchunks; ++chunk) {
            std::vector<double> s(static_cast<size_t>(m));
            for (int32_t i = chunk_start[static_cast<size_t>(chunk)];
                 i < chunk_start[static_cast<size_t>(chunk) + 1]; ++i) {
                for (int64_t t = prep.rep_begin[static_cast<size_t>(i)];
                     t < prep.rep_begin[static_cast<size_t>(i) + 1]; ++t) {
                    const Rep& rep = prep.reps[static_cast<size_t>(t)];
                    const BlockData& bd = prep.blocks[static_cast<size_t>(rep.block)];
                    const double* xcol = Xinv[static_cast<size_t>(rep.block)].col(rep.c).data();
                    const double* ycol = Y[static_cast<size_t>(rep.block)].col(rep.r).data();
                    std::memset(s.data(), 0, static_cast<size_t>(m) * sizeof(double));
                    const size_t T = bd.evar.size();
                    const int32_t* evar = bd.evar.data();
                    const int32_t* er = bd.er.data();
                    const int32_t* ec = bd.ec.data();
                    const double* ev = bd.ev.data();
                    for (size_t q = 0; q < T; ++q) {
                        s[static_cast<size_t>(evar[q])] += ev[q] * xcol[er[q]] * ycol[ec[q]];
                    }
                    const double f = rep.weight * rep.val;
                    for (int32_t j = 0; j < m; ++j) {
                        B(i, j) += f * s[static_cast<size_t>(j)];
                    }
                }
            }
        }
    } else {
#pragma omp parallel num_threads(nthreads)
        {
            MatrixXd D;
#pragma omp for schedule(static)
            for (int32_t j = 0; j < m; ++j) {
                for (size_t b = 0; b < prep.blocks.size(); ++b) {
                    const BlockData& bd = prep.blocks[b];
                    const int64_t lo = bd.var_begin[static_cast<size_t>(j)];
                    const int64_t hi = bd.var_begin[static_cast<size_t>(j) + 1];
                    if (lo == hi) continue;
                    // D = Xinv F_j Y as a sum of scaled outer products
                    D.setZero(bd.n, bd.n);
                    for (int64_t t = lo; t < hi; ++t) {
                        D.noalias() += bd.gv[static_cast<size_t>(t)] *
                                       Xinv[b].col(bd.gr[static_cast<size_t>(t)]) *
                                       Y[b].row(bd.gc[static_cast<size_t>(t)]);
                    }
                    const size_t T = bd.evar.size();
                    const int32_t* evar = bd.evar.data();
                    const int32_t* er = bd.er.data();
                    const int32_t* ec = bd.ec.data();
                    const double* ev = bd.ev.data();
                    for (size_t q = 0; q < T; ++q) {
                        B(evar[q], j) += ev[q] * D(ec[q], er[q]);
                    }
                }
            }
        }
    }
    // symmetrize (exact for invariant iterates, cleans roundoff otherwise)
    B = 0.5 * (B + B.transpose()).eval();
}

// Largest alpha <= 1 with M + alpha*D >= 0, via eigmin of L^-1 D L^-T.
double max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& D) {
    MatrixXd W = llt.matrixL().solve(D);
    W = llt.matrixL().solve(W.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (W + W.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-14) return 1.0;
    return std::min(1.0, -1.0 / lmin);
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts) {
    for (const auto& blk : p.blocks) {
        if (blk.size < 1) throw SolverError("solve: nonpositive block size");
    }
    if (p.blocks.empty()) throw SolverError("solve: no blocks");

    Prepared prep = prepare(p, opts.hints);
    const int32_t m = p.nvars;
    const size_t nb = p.blocks.size();
    int64_t N = 0;
    for (const auto& blk : p.blocks) N += blk.size;

    SdpSolution sol;
    double input_scale = 1.0;
    for (const auto& blk : p.blocks) {
        for (const auto& e : blk.entries) input_scale = std::max(input_scale, std::abs(e.value));
    }
    double c_scale = 1.0;
    for (double v : p.objective) c_scale = std::max(c_scale, std::abs(v));

    if (m == 0) {
        std::vector<MatrixXd> Z(nb);
        VectorXd x(0);
        assemble_lmi(prep, x, Z);
        double mineig = 0.0;
        for (auto& Zb : Z) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(Zb, Eigen::EigenvaluesOnly);
            mineig = std::min(mineig, es.eigenvalues().minCoeff());
        }
        sol.y = x;
        sol.min_block_eigenvalue = mineig;
        sol.status = mineig >= -opts.eig_slack ? SolveStatus::optimal
                                               : SolveStatus::numerical_failure;
        return sol;
    }

    const VectorXd c = Eigen::Map<const VectorXd>(p.objective.data(), m);

    // infeasible start on the identity cone axis
    const double tau = std::max(10.0, 2.0 * std::max(input_scale, c_scale));
    VectorXd x = VectorXd::Zero(m);
    std::vector<MatrixXd> X(nb), Y(nb), Zx(nb), Rp(nb), Xinv(nb);
    std::vector<MatrixXd> DXaff(nb), DYaff(nb), DX(nb), DY(nb), T1(nb), T2(nb);
    for (size_t b = 0; b < nb; ++b) {
        const int32_t n = p.blocks[b].size;
        X[b] = tau * MatrixXd::Identity(n, n);
        Y[b] = tau * MatrixXd::Identity(n, n);
    }

    MatrixXd B(m, m);
    VectorXd gX(m), fRp(m), fCorr(m), FdotY(m), rd(m);
    sol.weak_duality_ok = true;

    int stall = 0;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        sol.iterations = iter;
        // residuals
        assemble_lmi(prep, x, Zx);
        double pinf = 0.0;
        for (size_t b = 0; b < nb; ++b) {
            Rp[b] = Zx[b] - X[b];
            pinf = std::max(pinf, Rp[b].cwiseAbs().maxCoeff());
        }
        pinf /= 1.0 + input_scale;
        accumulate_trace(prep, Y, FdotY);
        rd = c - FdotY;
        const double dinf = rd.cwiseAbs().maxCoeff() / (1.0 + c_scale);
        sol.dual_residual_l1 = rd.cwiseAbs().sum();

        double gap = 0.0;
        for (size_t b = 0; b < nb; ++b) gap += (X[b].array() * Y[b].array()).sum();
        const double mu = gap / static_cast<double>(N);
        const double pobj = c.dot(x);
        double dobj = f0_dot(prep, Y);
        const double relgap = std::abs(gap) / (1.0 + std::abs(pobj) + std::abs(dobj));
        sol.primal_objective = pobj;
        sol.dual_objective = dobj;
        sol.relative_gap = relgap;
        sol.primal_residual = pinf;
        sol.y_inf_norm = x.cwiseAbs().maxCoeff();

        // weak duality audit: F0.Y = c.x - X.Y - Rp.Y - rd.x for any iterate,
        // so the corrected dual value must stay below the primal objective
        {
            double rp_dot_y = 0.0;
            for (size_t b = 0; b < nb; ++b) rp_dot_y += (Rp[b].array() * Y[b].array()).sum();
            const double margin = std::abs(rp_dot_y) +
                                  sol.dual_residual_l1 * std::max(1.0, sol.y_inf_norm);
            const double scale = 1.0 + std::abs(pobj) + std::abs(dobj);
            if (dobj - margin > pobj + 1e-9 * scale) sol.weak_duality_ok = false;
        }

        if (solver_trace()) {
            std::cerr << "iter " << iter << " mu=" << mu << " relgap=" << relgap
                      << " pinf=" << pinf << " dinf=" << dinf << " pobj=" << pobj
                      << " dobj=" << dobj << std::endl;
        }
        if (relgap <= opts.gap_tol && pinf <= opts.feas_tol * 10 && dinf <= opts.feas_tol * 10) {
            sol.status = SolveStatus::optimal;
            break;
        }
        sol.status = SolveStatus::max_iterations;

        // factor X, Y
        std::vector<Eigen::LLT<MatrixXd>> lltX(nb), lltY(nb);
        bool fail = false;
        for (size_t b = 0; b < nb && !fail; ++b) {
            lltX[b].compute(X[b]);
            lltY[b].compute(Y[b]);
            if (lltX[b].info() != Eigen::Success || lltY[b].info() != Eigen::Success) fail = true;
        }
        if (fail) {
            sol.status = SolveStatus::numerical_failure;
            break;
        }
        for (size_t b = 0; b < nb; ++b) {
            const int32_t n = p.blocks[b].size;
            Xinv[b] = lltX[b].solve(MatrixXd::Identity(n, n));
            Xinv[b] = (0.5 * (Xinv[b] + Xinv[b].transpose())).eval();
        }

        build_schur(prep, Xinv, Y, B);
        Eigen::LLT<MatrixXd> lltB(B);
        if (lltB.info() != Eigen::Success) {
            double ridge = 1e-12 * (B.trace() / m + 1.0);
            bool ok = false;
            for (int tries = 0; tries < 3 && !ok; ++tries) {
                MatrixXd Br = B + ridge * MatrixXd::Identity(m, m);
                lltB.compute(Br);
                ok = lltB.info() == Eigen::Success;
                ridge *= 100;
            }
            if (!ok) {
                sol.status = SolveStatus::numerical_failure;
                break;
            }
        }

        accumulate_trace(prep, Xinv, gX);
        for (size_t b = 0; b < nb; ++b) T1[b] = Xinv[b] * (Rp[b] * Y[b]);
        accumulate_trace(prep, T1, fRp);

        // predictor (sigma = 0)
        VectorXd dx = lltB.solve(-fRp - c);
        for (size_t b = 0; b < nb; ++b) DXaff[b] = Rp[b];
        for (size_t b = 0; b < nb; ++b) {
            const BlockData& bd = prep.blocks[b];
            MatrixXd& D = DXaff[b];
            const size_t T = bd.evar.size();
            for (size_t t = 0; t < T; ++t) {
                D(bd.er[t], bd.ec[t]) += dx[bd.evar[t]] * bd.ev[t];
            }
        }
        for (size_t b = 0; b < nb; ++b) {
            DYaff[b] = -Y[b] - Xinv[b] * (DXaff[b] * Y[b]);
            DYaff[b] = (0.5 * (DYaff[b] + DYaff[b].transpose())).eval();
        }
        double ap = 1.0, ad = 1.0;
        for (size_t b = 0; b < nb; ++b) {
            ap = std::min(ap, max_step(lltX[b], DXaff[b]));
            ad = std::min(ad, max_step(lltY[b], DYaff[b]));
        }
        ap = std::min(1.0, 0.98 * ap);
        ad = std::min(1.0, 0.98 * ad);
        double gap_aff = 0.0;
        for (size_t b = 0; b < nb; ++b) {
            gap_aff += ((X[b] + ap * DXaff[b]).array() * (Y[b] + ad * DYaff[b]).array()).sum();
        }
        double sigma = std::pow(std::max(gap_aff, 0.0) / std::max(gap, 1e-300), 3.0);
        sigma = std::clamp(sigma, 1e-6, 1.0 - 1e-6);

        // corrector
        for (size_t b = 0; b < nb; ++b) T2[b] = Xinv[b] * (DXaff[b] * DYaff[b]);
        accumulate_trace(prep, T2, fCorr);
        dx = lltB.solve(sigma * mu * gX - fRp - fCorr - c);
        for (size_t b = 0; b < nb; ++b) DX[b] = Rp[b];
        for (size_t b = 0; b < nb; ++b) {
            const BlockData& bd = prep.blocks[b];
            MatrixXd& D = DX[b];
            const size_t T = bd.evar.size();
            for (size_t t = 0; t < T; ++t) {
                D(bd.er[t], bd.ec[t]) += dx[bd.evar[t]] * bd.ev[t];
            }
        }
        for (size_t b = 0; b < nb; ++b) {
            const int32_t n = p.blocks[b].size;
            DY[b] = sigma * mu * Xinv[b] - Y[b] - T2[b] - Xinv[b] * (DX[b] * Y[b]);
            (void)n;
            DY[b] = (0.5 * (DY[b] + DY[b].transpose())).eval();
        }
        ap = 1.0;
        ad = 1.0;
        for (size_t b = 0; b < nb; ++b) {
            ap = std::min(ap, max_step(lltX[b], DX[b]));
            ad = std::min(ad, max_step(lltY[b], DY[b]));
        }
        ap = std::min(1.0, 0.98 * ap);
        ad = std::min(1.0, 0.98 * ad);

        x += ap * dx;
        for (size_t b = 0; b < nb; ++b) {
            X[b] = (X[b] + ap * DX[b]).eval();
            Y[b] = (Y[b] + ad * DY[b]).eval();
            X[b] = (0.5 * (X[b] + X[b].transpose())).eval();
            Y[b] = (0.5 * (Y[b] + Y[b].transpose())).eval();
        }
        if (ap < 1e-6 && ad < 1e-6) {
            if (++stall >= 5) {
                sol.status = SolveStatus::numerical_failure;
                break;
            }
        } else {
            stall = 0;
        }
    }

    // final diagnostics at the returned point
    sol.y = x;
    {
        assemble_lmi(prep, x, Zx);
        double mineig = std::numeric_limits<double>::infinity();
        for (size_t b = 0; b < nb; ++b) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(Zx[b], Eigen::EigenvaluesOnly);
            mineig = std::min(mineig, es.eigenvalues().minCoeff());
        }
        sol.min_block_eigenvalue = mineig;
    }
    if (sol.status == SolveStatus::optimal &&
        (sol.relative_gap > opts.gap_tol || sol.min_block_eigenvalue < -opts.eig_slack)) {
        sol.status = SolveStatus::max_iterations;
    }
    return sol;
}

}  // namespace biloc
