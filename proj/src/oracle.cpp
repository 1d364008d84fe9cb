#include "evsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "evsched/errors.hpp"

namespace evsched::oracle {

namespace {

Vec caps_of(const ChargingRequest& req, int T) {
    Vec caps = Vec::Zero(T);
    for (int s : req.slots) {
        if (s < 1 || s > T) throw IndexOutOfRange("oracle: slot outside horizon");
        caps[s - 1] = req.rate_cap;
    }
    return caps;
}

double eval_cost(const CostModel& cost, int t, double x) {
    switch (cost.kind) {
        case CostKind::QuadraticValley: return 0.5 * x * x;
        case CostKind::ConvexQuadratic: return cost.a[t] * x * x + cost.b[t] * x + cost.c[t];
        case CostKind::Linear: return cost.b[t] * x + cost.c[t];
    }
    return 0.0;
}

double eval_deriv(const CostModel& cost, int t, double x) {
    switch (cost.kind) {
        case CostKind::QuadraticValley: return x;
        case CostKind::ConvexQuadratic: return 2.0 * cost.a[t] * x + cost.b[t];
        case CostKind::Linear: return cost.b[t];
    }
    return 0.0;
}

double eval_curvature(const CostModel& cost, int T) {
    switch (cost.kind) {
        case CostKind::QuadraticValley: return 1.0;
        case CostKind::ConvexQuadratic: {
            double m = 0.0;
            for (int t = 0; t < T; ++t) m = std::max(m, 2.0 * cost.a[t]);
            return m;
        }
        case CostKind::Linear: return 0.0;
    }
    return 0.0;
}

// Linear minimization of g'r over the capped simplex, written directly from
// the definition: cheapest slots first, remainder at the pivot.
Vec linear_minimizer(const Vec& g, const Vec& caps, double budget) {
    const int T = static_cast<int>(g.size());
    std::vector<int> idx(T);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return g[i] < g[j]; });
    Vec r = Vec::Zero(T);
    double left = budget;
    for (int t : idx) {
        if (left <= 0.0) break;
        const double amount = std::min(caps[t], left);
        r[t] = amount;
        left -= amount;
    }
    return r;
}

}  // namespace

Vec project_capped_simplex_ref(const Vec& v, const Vec& caps, double budget) {
    const int T = static_cast<int>(v.size());
    double capacity = 0.0;
    for (int t = 0; t < T; ++t) capacity += caps[t];
    const double tol = 1e-12 * std::max(1.0, std::abs(budget));
    if (budget < -tol || budget > capacity + tol)
        throw InfeasibleBudget("reference projection: infeasible budget");
    if (budget >= capacity) return caps;
    if (budget <= 0.0) return Vec::Zero(T);

    // sum_t clip(v_t - tau, 0, cap_t) is piecewise linear and non-increasing
    // in tau with kinks at v_t and v_t - cap_t.
    std::vector<double> kinks;
    kinks.reserve(2 * T);
    for (int t = 0; t < T; ++t) {
        kinks.push_back(v[t]);
        kinks.push_back(v[t] - caps[t]);
    }
    std::sort(kinks.begin(), kinks.end());
    auto total_at = [&](double tau) {
        double s = 0.0;
        for (int t = 0; t < T; ++t) s += std::clamp(v[t] - tau, 0.0, caps[t]);
        return s;
    };

    double tau_lo = kinks.front(), tau_hi = kinks.back();
    double s_lo = total_at(tau_lo), s_hi = total_at(tau_hi);
    // Locate the segment whose range covers the budget (s is non-increasing).
    for (std::size_t i = 0; i + 1 < kinks.size(); ++i) {
        const double s_a = total_at(kinks[i]);
        const double s_b = total_at(kinks[i + 1]);
        if (s_a >= budget && budget >= s_b) {
            tau_lo = kinks[i];
            tau_hi = kinks[i + 1];
            s_lo = s_a;
            s_hi = s_b;
            break;
        }
    }
    double tau;
    if (s_lo == s_hi) {
        tau = tau_lo;
    } else {
        tau = tau_lo + (s_lo - budget) * (tau_hi - tau_lo) / (s_lo - s_hi);
    }
    Vec e(T);
    for (int t = 0; t < T; ++t) e[t] = std::clamp(v[t] - tau, 0.0, caps[t]);
    return e;
}

namespace {

// Maximize a concave scalar function on [lo, hi] by golden-section search.
double golden_max(double lo, double hi, const std::function<double(double)>& f) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::pair<double, double> project_disk_ref(double P, double Q, double radius) {
    const double norm2 = P * P + Q * Q;
    if (norm2 <= radius * radius) return {P, Q};
    // Dual of min ||x - v||^2 s.t. ||x||^2 <= r^2: x(nu) = v / (1 + nu).
    auto dual = [&](double nu) {
        const double denom = 1.0 + nu;
        const double px = P / denom, qx = Q / denom;
        const double primal = (px - P) * (px - P) + (qx - Q) * (qx - Q);
        return primal + nu * (px * px + qx * qx - radius * radius);
    };
    double hi = 1.0;
    while (norm2 / ((1.0 + hi) * (1.0 + hi)) > radius * radius && hi < 1e18) hi *= 2.0;
    const double nu = golden_max(0.0, hi, dual);
    return {P / (1.0 + nu), Q / (1.0 + nu)};
}

std::pair<Vec3, Vec3> project_feeder_cap_ref(const Vec3& P, const Vec3& Q, double cap) {
    const auto violation = [&](const Vec3& p, const Vec3& q) {
        const double sp = p.sum(), sq = q.sum();
        return sp * sp + sq * sq - cap * cap;
    };
    if (violation(P, Q) <= 0.0) return {P, Q};

    Eigen::Matrix<double, 6, 1> v;
    v << P, Q;
    Eigen::Matrix<double, 6, 6> coupling = Eigen::Matrix<double, 6, 6>::Zero();
    coupling.topLeftCorner<3, 3>().setOnes();
    coupling.bottomRightCorner<3, 3>().setOnes();

    auto solve_at = [&](double nu) {
        const Eigen::Matrix<double, 6, 6> H =
            Eigen::Matrix<double, 6, 6>::Identity() + nu * coupling;
        return H.ldlt().solve(v).eval();
    };
    auto dual = [&](double nu) {
        const auto x = solve_at(nu);
        const Vec3 p = x.head<3>(), q = x.tail<3>();
        return (x - v).squaredNorm() + nu * violation(p, q);
    };
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const auto x = solve_at(hi);
        if (violation(x.head<3>(), x.tail<3>()) <= 0.0) break;
        hi *= 2.0;
    }
    const double nu = golden_max(0.0, hi, dual);
    const auto x = solve_at(nu);
    return {x.head<3>(), x.tail<3>()};
}

AggregateReport solve_aggregate(const std::vector<ChargingRequest>& fleet, const Vec& base_load,
                                const CostModel& cost, double gap_tol, double gap_tol_rel,
                                int max_iter) {
    const int T = static_cast<int>(base_load.size());
    const std::size_t M = fleet.size();

    AggregateReport report;
    if (M == 0) {
        double c0 = 0.0;
        for (int t = 0; t < T; ++t) c0 += eval_cost(cost, t, base_load[t]);
        report.optimum = c0;
        report.certified = true;
        return report;
    }

    std::vector<Vec> caps(M);
    for (std::size_t m = 0; m < M; ++m) caps[m] = caps_of(fleet[m], T);

    // Feasible start: projection of zero onto each simplex.
    std::vector<Vec> e(M);
    for (std::size_t m = 0; m < M; ++m)
        e[m] = project_capped_simplex_ref(Vec::Zero(T), caps[m], fleet[m].energy_need);

    const double curvature = eval_curvature(cost, T);
    const double step =
        curvature > 0.0 ? 1.0 / (curvature * static_cast<double>(M)) : 1.0;

    Vec agg = Vec::Zero(T);
    for (const Vec& em : e) agg += em;

    double cost_now = 0.0, gap = std::numeric_limits<double>::infinity();
    int it = 0;
    for (it = 0; it < max_iter; ++it) {
        Vec g(T);
        cost_now = 0.0;
        for (int t = 0; t < T; ++t) {
            const double load = base_load[t] + agg[t];
            g[t] = eval_deriv(cost, t, load);
            cost_now += eval_cost(cost, t, load);
        }
        gap = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const Vec r = linear_minimizer(g, caps[m], fleet[m].energy_need);
            gap += g.dot(e[m] - r);
        }
        if (gap <= gap_tol + gap_tol_rel * std::abs(cost_now)) break;

        agg.setZero();
        for (std::size_t m = 0; m < M; ++m) {
            e[m] = project_capped_simplex_ref(e[m] - step * g, caps[m], fleet[m].energy_need);
            agg += e[m];
        }
    }

    report.optimum = cost_now;
    report.profiles = std::move(e);
    report.gap = gap;
    report.iterations = it;
    report.certified = gap <= gap_tol + gap_tol_rel * std::abs(cost_now);
    if (!report.certified)
        throw NotConverged("aggregate oracle: gap " + std::to_string(gap) + " after " +
                           std::to_string(it) + " iterations");
    return report;
}

// ---------------------------------------------------------------------------
// Network oracle: augmented Lagrangian over the stacked variable vector.
// ---------------------------------------------------------------------------

namespace {

// Independent transform of the line impedance for the linearized model.
Eigen::Matrix3cd zbar_ref(const Eigen::Matrix3cd& z) {
    const std::complex<double> rot = std::polar(1.0, -2.0 * M_PI / 3.0);
    const std::complex<double> al[3] = {{1.0, 0.0}, rot, rot * rot};
    Eigen::Matrix3cd out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = 2.0 * al[i] * std::conj(z(i, j)) * std::conj(al[j]);
    return out;
}

struct Stacked {
    const FeederModel* feeder = nullptr;
    int N = 0, T = 0;
    std::vector<std::vector<int>> ph;  // phase list per bus
    std::vector<int> base_v, base_pg, base_qg, base_P, base_Q;  // per bus
    std::vector<int> base_e;                                    // per EV
    int nvars = 0;

    int iv(int n, int t, int pl) const { return base_v[n] + t * static_cast<int>(ph[n].size()) + pl; }
    int ipg(int n, int t, int pl) const { return base_pg[n] + t * static_cast<int>(ph[n].size()) + pl; }
    int iqg(int n, int t, int pl) const { return base_qg[n] + t * static_cast<int>(ph[n].size()) + pl; }
    int iP(int n, int t, int pl) const { return base_P[n] + t * static_cast<int>(ph[n].size()) + pl; }
    int iQ(int n, int t, int pl) const { return base_Q[n] + t * static_cast<int>(ph[n].size()) + pl; }
    int ie(int m, int t) const { return base_e[m] + t; }

    int local_phase(int n, int p) const {
        const auto& list = ph[n];
        return static_cast<int>(std::find(list.begin(), list.end(), p) - list.begin());
    }
};

}  // namespace

NetworkReport solve_network(const FeederModel& feeder,
                            const std::vector<ChargingRequest>& fleet, const BusSeries& d_p,
                            const BusSeries& d_q, const NetworkOracleOptions& opts) {
    const int N = feeder.num_buses();
    const int T = d_p.empty() ? 0 : static_cast<int>(d_p[0].size());
    const std::size_t M = fleet.size();

    Stacked s;
    s.feeder = &feeder;
    s.N = N;
    s.T = T;
    s.ph.resize(N);
    s.base_v.assign(N, -1);
    s.base_pg.assign(N, -1);
    s.base_qg.assign(N, -1);
    s.base_P.assign(N, -1);
    s.base_Q.assign(N, -1);
    int cur = 0;
    for (int n = 0; n < N; ++n) s.ph[n] = feeder.buses[n].phase_list();
    for (int n = 1; n < N; ++n) {
        s.base_v[n] = cur;
        cur += T * static_cast<int>(s.ph[n].size());
    }
    for (int n = 0; n < N; ++n) {
        s.base_pg[n] = cur;
        cur += T * static_cast<int>(s.ph[n].size());
    }
    for (int n = 0; n < N; ++n) {
        s.base_qg[n] = cur;
        cur += T * static_cast<int>(s.ph[n].size());
    }
    for (int n = 0; n < N; ++n) {
        s.base_P[n] = cur;
        cur += T * static_cast<int>(s.ph[n].size());
    }
    for (int n = 0; n < N; ++n) {
        s.base_Q[n] = cur;
        cur += T * static_cast<int>(s.ph[n].size());
    }
    s.base_e.resize(M);
    std::vector<Vec> ev_caps(M);
    for (std::size_t m = 0; m < M; ++m) {
        s.base_e[m] = cur;
        cur += T;
        ev_caps[m] = caps_of(fleet[m], T);
    }
    s.nvars = cur;

    // Linear equality rows J x = rhs.
    struct Entry {
        int row, col;
        double value;
    };
    std::vector<Entry> trips;
    std::vector<double> rhs_rows;
    int row = 0;
    auto new_row = [&](double rhs) {
        rhs_rows.push_back(rhs);
        return row++;
    };
    auto emplace = [&trips](int r, int c, double v) { trips.push_back({r, c, v}); };
    for (int n = 0; n < N; ++n) {
        const Bus& bus = feeder.buses[n];
        for (int t = 0; t < T; ++t) {
            for (std::size_t pl = 0; pl < s.ph[n].size(); ++pl) {
                const int p = s.ph[n][pl];
                // active balance: pg + P_n - sum_children P_k - sum_EV e = d_p
                const int rp = new_row(d_p[n][t][p]);
                emplace(rp, s.ipg(n, t, static_cast<int>(pl)), 1.0);
                emplace(rp, s.iP(n, t, static_cast<int>(pl)), 1.0);
                for (int k : bus.children) {
                    if (!feeder.buses[k].phases[p]) continue;
                    emplace(rp, s.iP(k, t, s.local_phase(k, p)), -1.0);
                }
                for (std::size_t m = 0; m < M; ++m) {
                    if (fleet[m].bus == n && fleet[m].phase == p)
                        emplace(rp, s.ie(static_cast<int>(m), t), -1.0);
                }
                // reactive balance: qg + Q_n - sum_children Q_k = d_q
                const int rq = new_row(d_q[n][t][p]);
                emplace(rq, s.iqg(n, t, static_cast<int>(pl)), 1.0);
                emplace(rq, s.iQ(n, t, static_cast<int>(pl)), 1.0);
                for (int k : bus.children) {
                    if (!feeder.buses[k].phases[p]) continue;
                    emplace(rq, s.iQ(k, t, s.local_phase(k, p)), -1.0);
                }
            }
            if (n > 0) {
                const Eigen::Matrix3cd zb = zbar_ref(bus.z);
                for (std::size_t pl = 0; pl < s.ph[n].size(); ++pl) {
                    const int p = s.ph[n][pl];
                    // v_parent - v_n - Re{Zbar (P + jQ)} = 0
                    const bool root_parent = bus.parent == 0;
                    const int rv = new_row(root_parent ? -feeder.v0 : 0.0);
                    emplace(rv, s.iv(n, t, static_cast<int>(pl)), -1.0);
                    if (!root_parent)
                        emplace(rv, s.iv(bus.parent, t, s.local_phase(bus.parent, p)),
                                           1.0);
                    for (std::size_t ql = 0; ql < s.ph[n].size(); ++ql) {
                        const int q = s.ph[n][ql];
                        emplace(rv, s.iP(n, t, static_cast<int>(ql)),
                                           -zb(p, q).real());
                        emplace(rv, s.iQ(n, t, static_cast<int>(ql)),
                                           zb(p, q).imag());
                    }
                }
            }
        }
    }
    const int nrows = row;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nrows, s.nvars);
    for (const auto& tr : trips) J(tr.row, tr.col) += tr.value;
    Eigen::VectorXd rhs = Eigen::Map<Eigen::VectorXd>(rhs_rows.data(), nrows);

    // Objective f(x) = sum_t f0(P0) + sum gen cost (constant c terms excluded).
    Eigen::VectorXd quad = Eigen::VectorXd::Zero(s.nvars);
    Eigen::VectorXd linear = Eigen::VectorXd::Zero(s.nvars);
    double const_term = 0.0;
    for (int t = 0; t < T; ++t) {
        for (std::size_t pl = 0; pl < s.ph[0].size(); ++pl) {
            quad[s.iP(0, t, static_cast<int>(pl))] += feeder.f0_a;
            linear[s.iP(0, t, static_cast<int>(pl))] += feeder.f0_b;
        }
        for (int n = 0; n < N; ++n) {
            const Bus& bus = feeder.buses[n];
            if (!bus.has_gen) continue;
            for (std::size_t pl = 0; pl < s.ph[n].size(); ++pl) {
                const int p = s.ph[n][pl];
                quad[s.ipg(n, t, static_cast<int>(pl))] += bus.gen.a[p];
                linear[s.ipg(n, t, static_cast<int>(pl))] += bus.gen.b[p];
                const_term += bus.gen.c[p];
            }
        }
    }

    auto objective = [&](const Eigen::VectorXd& x) {
        return x.cwiseProduct(quad.cwiseProduct(x) + linear).sum() + const_term;
    };
    auto grad_f = [&](const Eigen::VectorXd& x) {
        return (2.0 * quad.cwiseProduct(x) + linear).eval();
    };

    // Projection onto the product of simple sets.
    auto project = [&](Eigen::VectorXd x) {
        for (int n = 1; n < N; ++n) {
            const Bus& bus = feeder.buses[n];
            for (int t = 0; t < T; ++t)
                for (std::size_t pl = 0; pl < s.ph[n].size(); ++pl) {
                    double& val = x[s.iv(n, t, static_cast<int>(pl))];
                    val = std::clamp(val, bus.v_min, bus.v_max);
                }
        }
        for (int n = 0; n < N; ++n) {
            const Bus& bus = feeder.buses[n];
            for (int t = 0; t < T; ++t)
                for (std::size_t pl = 0; pl < s.ph[n].size(); ++pl) {
                    const int p = s.ph[n][pl];
                    double& pgv = x[s.ipg(n, t, static_cast<int>(pl))];
                    double& qgv = x[s.iqg(n, t, static_cast<int>(pl))];
                    if (bus.has_gen) {
                        pgv = std::clamp(pgv, bus.gen.pmin[p], bus.gen.pmax[p]);
                        qgv = std::clamp(qgv, bus.gen.qmin[p], bus.gen.qmax[p]);
                    } else {
                        pgv = 0.0;
                        qgv = 0.0;
                    }
                }
        }
        for (int n = 1; n < N; ++n) {
            const Bus& bus = feeder.buses[n];
            if (!std::isfinite(bus.s_line_max)) continue;
            for (int t = 0; t < T; ++t)
                for (std::size_t pl = 0; pl < s.ph[n].size(); ++pl) {
                    double& Pv = x[s.iP(n, t, static_cast<int>(pl))];
                    double& Qv = x[s.iQ(n, t, static_cast<int>(pl))];
                    const double norm = std::hypot(Pv, Qv);
                    if (norm > bus.s_line_max && norm > 0.0) {
                        const double sc = bus.s_line_max / norm;
                        Pv *= sc;
                        Qv *= sc;
                    }
                }
        }
        if (std::isfinite(feeder.sf_max)) {
            for (int t = 0; t < T; ++t) {
                Vec3 P0 = Vec3::Zero(), Q0 = Vec3::Zero();
                for (std::size_t pl = 0; pl < s.ph[0].size(); ++pl) {
                    P0[s.ph[0][pl]] = x[s.iP(0, t, static_cast<int>(pl))];
                    Q0[s.ph[0][pl]] = x[s.iQ(0, t, static_cast<int>(pl))];
                }
                const auto [Pp, Qp] = project_feeder_cap_ref(P0, Q0, feeder.sf_max);
                for (std::size_t pl = 0; pl < s.ph[0].size(); ++pl) {
                    x[s.iP(0, t, static_cast<int>(pl))] = Pp[s.ph[0][pl]];
                    x[s.iQ(0, t, static_cast<int>(pl))] = Qp[s.ph[0][pl]];
                }
            }
        }
        for (std::size_t m = 0; m < M; ++m) {
            Vec em(T);
            for (int t = 0; t < T; ++t) em[t] = x[s.ie(static_cast<int>(m), t)];
            em = project_capped_simplex_ref(em, ev_caps[m], fleet[m].energy_need);
            for (int t = 0; t < T; ++t) x[s.ie(static_cast<int>(m), t)] = em[t];
        }
        return x;
    };

    // Largest eigenvalue of J'J by power iteration (deterministic start).
    double jnorm2 = 1.0;
    {
        Eigen::VectorXd u = Eigen::VectorXd::Ones(s.nvars).normalized();
        for (int it = 0; it < 100; ++it) {
            Eigen::VectorXd w = J.transpose() * (J * u);
            const double norm = w.norm();
            if (norm <= 0.0) break;
            u = w / norm;
            jnorm2 = norm;
        }
    }
    const double lf = 2.0 * quad.maxCoeff();

    Eigen::VectorXd x = project(Eigen::VectorXd::Zero(s.nvars));
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(nrows);
    double sigma = opts.sigma0;

    NetworkReport report;
    int total_inner = 0;
    double feas = std::numeric_limits<double>::infinity();
    double stat = std::numeric_limits<double>::infinity();
    double prev_feas = std::numeric_limits<double>::infinity();

    for (int outer = 0; outer < opts.max_outer; ++outer) {
        const double step = 1.0 / (lf + sigma * jnorm2 + 1e-12);
        int inner = 0;
        for (inner = 0; inner < opts.max_inner; ++inner) {
            const Eigen::VectorXd h = J * x - rhs;
            const Eigen::VectorXd grad = grad_f(x) + J.transpose() * (lambda + sigma * h);
            const Eigen::VectorXd x_next = project(x - step * grad);
            const double move = (x_next - x).lpNorm<Eigen::Infinity>();
            x = x_next;
            if (move <= 1e-14) break;
            if (inner % 128 == 0) {
                // Unit-step certificate check against the current multiplier
                // estimate; cheap enough at oracle scale.
                const Eigen::VectorXd hh = J * x - rhs;
                const Eigen::VectorXd gl = grad_f(x) + J.transpose() * (lambda + sigma * hh);
                const double unit_res = (x - project(x - gl)).lpNorm<Eigen::Infinity>();
                if (unit_res <= 0.25 * opts.stat_tol) break;
            }
        }
        total_inner += inner;

        const Eigen::VectorXd h = J * x - rhs;
        feas = h.lpNorm<Eigen::Infinity>();
        lambda += sigma * h;
        const Eigen::VectorXd gl = grad_f(x) + J.transpose() * lambda;
        stat = (x - project(x - gl)).lpNorm<Eigen::Infinity>();
        if (feas <= opts.feas_tol && stat <= opts.stat_tol) break;
        if (feas > 0.25 * prev_feas) sigma = std::min(sigma * 2.0, opts.sigma_max);
        prev_feas = feas;
    }

    report.optimum = objective(x);
    report.feasibility = feas;
    report.stationarity = stat;
    report.iterations = total_inner;
    report.certified = feas <= opts.feas_tol && stat <= opts.stat_tol;

    // Unpack into a grid state (p^d carries base load plus EV charging).
    GridState st = GridState::zeros(N, T);
    for (int t = 0; t < T; ++t) {
        for (int n = 0; n < N; ++n) {
            for (std::size_t pl = 0; pl < s.ph[n].size(); ++pl) {
                const int p = s.ph[n][pl];
                st.v[n][t][p] = n == 0 ? feeder.v0 : x[s.iv(n, t, static_cast<int>(pl))];
                st.pg[n][t][p] = x[s.ipg(n, t, static_cast<int>(pl))];
                st.qg[n][t][p] = x[s.iqg(n, t, static_cast<int>(pl))];
                st.P[n][t][p] = x[s.iP(n, t, static_cast<int>(pl))];
                st.Q[n][t][p] = x[s.iQ(n, t, static_cast<int>(pl))];
                st.pd[n][t][p] = d_p[n][t][p];
                st.qd[n][t][p] = d_q[n][t][p];
            }
        }
    }
    report.profiles.assign(M, Vec::Zero(T));
    for (std::size_t m = 0; m < M; ++m) {
        for (int t = 0; t < T; ++t) {
            report.profiles[m][t] = x[s.ie(static_cast<int>(m), t)];
            st.pd[fleet[m].bus][t][fleet[m].phase] += report.profiles[m][t];
        }
    }
    report.state = std::move(st);

    if (!report.certified)
        throw NotConverged("network oracle: feasibility " + std::to_string(feas) +
                           ", stationarity " + std::to_string(stat));
    return report;
}

}  // namespace evsched::oracle
