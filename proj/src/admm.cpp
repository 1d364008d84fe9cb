#include "evsched/admm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "evsched/errors.hpp"
#include "evsched/fw.hpp"
#include "evsched/parallel.hpp"

namespace evsched {

double residual_threshold(double tol, int T, int num_buses) {
    return tol * static_cast<double>(T) * std::sqrt(static_cast<double>(num_buses));
}

double z_update_box(double value, double lo, double hi) {
    return std::max(lo, std::min(value, hi));
}

double z_update_pg(double p_plus_lambda, double a, double b, double rho, double lo, double hi) {
    return z_update_box((rho * p_plus_lambda - b) / (2.0 * a + rho), lo, hi);
}

double z_update_v(const std::vector<double>& child_terms, double own_term, double lo,
                  double hi) {
    double sum = own_term;
    for (double c : child_terms) sum += c;
    return z_update_box(sum / (static_cast<double>(child_terms.size()) + 1.0), lo, hi);
}

double z_update_pd(double pd, double lam_d, double d, double sum_e, double mu) {
    return 0.5 * (pd + lam_d + d + sum_e + mu);
}

std::pair<double, double> project_line_disk(double P, double Q, double s_max) {
    const double norm = std::hypot(P, Q);
    if (norm <= s_max || norm == 0.0) return {P, Q};
    const double scale = s_max / norm;
    return {scale * P, scale * Q};
}

std::pair<Vec3, Vec3> project_substation_capacity(const Vec3& P, const Vec3& Q, double sf_max) {
    const double sum_p = P.sum();
    const double sum_q = Q.sum();
    const double sigma = std::hypot(sum_p, sum_q);
    if (sigma <= sf_max) return {P, Q};
    const double factor = 1.0 - sf_max / sigma;
    return {P - Vec3::Constant(factor * sum_p / 3.0), Q - Vec3::Constant(factor * sum_q / 3.0)};
}

namespace detail {

struct BusKkt {
    int n = 0;
    std::vector<int> ph;
    std::vector<int> children;
    std::vector<std::vector<int>> child_ph;
    int len = 0, rows = 0;
    int off_v = -1, off_pg = -1, off_pd = -1, off_qg = -1, off_P = -1, off_Q = -1,
        off_vhat = -1;
    std::vector<int> off_Phat, off_Qhat;
    int qrow0 = 0;
    Eigen::MatrixXd A;
    Eigen::MatrixXd W;     // Hinv A' (A Hinv A')^-1
    Eigen::VectorXd hinv;  // inverse diagonal Hessian
    Eigen::VectorXd lin;   // linear-term shift (supply cost at the substation)

    BusKkt(const FeederModel& feeder, int bus_id, double rho) : n(bus_id) {
        const Bus& bus = feeder.buses[n];
        ph = bus.phase_list();
        children = bus.children;
        const int np = static_cast<int>(ph.size());

        int cur = 0;
        if (n > 0) {
            off_v = cur;
            cur += np;
        }
        off_pg = cur; cur += np;
        off_pd = cur; cur += np;
        off_qg = cur; cur += np;
        off_P = cur; cur += np;
        off_Q = cur; cur += np;
        if (n > 0) {
            off_vhat = cur;
            cur += np;
        }
        for (int k : children) {
            child_ph.push_back(feeder.buses[k].phase_list());
            const int nk = static_cast<int>(child_ph.back().size());
            off_Phat.push_back(cur);
            cur += nk;
            off_Qhat.push_back(cur);
            cur += nk;
        }
        len = cur;
        rows = (n > 0 ? 3 : 2) * np;
        qrow0 = np;

        A = Eigen::MatrixXd::Zero(rows, len);
        for (int i = 0; i < np; ++i) {
            A(i, off_pg + i) = 1.0;
            A(i, off_pd + i) = -1.0;
            A(i, off_P + i) = 1.0;
            A(qrow0 + i, off_qg + i) = 1.0;
            A(qrow0 + i, off_Q + i) = 1.0;
        }
        for (std::size_t c = 0; c < children.size(); ++c) {
            for (std::size_t j = 0; j < child_ph[c].size(); ++j) {
                const int phase = child_ph[c][j];
                const auto it = std::find(ph.begin(), ph.end(), phase);
                const int i = static_cast<int>(it - ph.begin());
                A(i, off_Phat[c] + static_cast<int>(j)) = -1.0;
                A(qrow0 + i, off_Qhat[c] + static_cast<int>(j)) = -1.0;
            }
        }
        if (n > 0) {
            const Mat3c zb = zbar(bus.z);
            for (int i = 0; i < np; ++i) {
                const int row = 2 * np + i;
                A(row, off_vhat + i) = 1.0;
                A(row, off_v + i) = -1.0;
                for (int j = 0; j < np; ++j) {
                    A(row, off_P + j) = -zb(ph[i], ph[j]).real();
                    A(row, off_Q + j) = zb(ph[i], ph[j]).imag();
                }
            }
        }

        hinv = Eigen::VectorXd::Ones(len);
        lin = Eigen::VectorXd::Zero(len);
        if (n == 0) {
            for (int i = 0; i < np; ++i) {
                hinv[off_P + i] = 1.0 / (1.0 + 2.0 * feeder.f0_a / rho);
                lin[off_P + i] = feeder.f0_b / rho;
            }
        }

        const Eigen::MatrixXd schur = A * hinv.asDiagonal() * A.transpose();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
        if (ldlt.info() != Eigen::Success)
            throw SingularKkt("bus " + std::to_string(n) + ": degenerate constraint system");
        const Eigen::MatrixXd schur_inv =
            ldlt.solve(Eigen::MatrixXd::Identity(rows, rows));
        if (!schur_inv.allFinite())
            throw SingularKkt("bus " + std::to_string(n) + ": degenerate constraint system");
        W = hinv.asDiagonal() * A.transpose() * schur_inv;
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& c, const Vec3& qd) const {
        Eigen::VectorXd ct = (c - lin).cwiseProduct(hinv);
        Eigen::VectorXd r = A * ct;
        for (std::size_t i = 0; i < ph.size(); ++i) r[qrow0 + static_cast<int>(i)] -= qd[ph[i]];
        return ct - W * r;
    }
};

}  // namespace detail

BusUpdate x_update_bus(const FeederModel& feeder, int n, const BusTargets& targets, double rho) {
    if (n < 0 || n >= feeder.num_buses()) throw DimensionMismatch("x update: bus out of range");
    const detail::BusKkt kkt(feeder, n, rho);
    const Bus& bus = feeder.buses[n];

    Eigen::VectorXd c = Eigen::VectorXd::Zero(kkt.len);
    for (std::size_t i = 0; i < kkt.ph.size(); ++i) {
        const int p = kkt.ph[i];
        const int ii = static_cast<int>(i);
        if (n > 0) c[kkt.off_v + ii] = targets.v[p];
        c[kkt.off_pg + ii] = targets.pg[p];
        c[kkt.off_pd + ii] = targets.pd[p];
        c[kkt.off_qg + ii] = targets.qg[p];
        c[kkt.off_P + ii] = targets.P[p];
        c[kkt.off_Q + ii] = targets.Q[p];
        if (n > 0) c[kkt.off_vhat + ii] = targets.vhat[p];
    }
    if (targets.Phat.size() != bus.children.size() || targets.Qhat.size() != bus.children.size())
        throw DimensionMismatch("x update: child target count differs from children");
    for (std::size_t k = 0; k < bus.children.size(); ++k) {
        for (std::size_t j = 0; j < kkt.child_ph[k].size(); ++j) {
            c[kkt.off_Phat[k] + static_cast<int>(j)] = targets.Phat[k][kkt.child_ph[k][j]];
            c[kkt.off_Qhat[k] + static_cast<int>(j)] = targets.Qhat[k][kkt.child_ph[k][j]];
        }
    }

    const Eigen::VectorXd u = kkt.apply(c, targets.qd);

    BusUpdate out;
    out.Phat.assign(bus.children.size(), Vec3::Zero());
    out.Qhat.assign(bus.children.size(), Vec3::Zero());
    for (std::size_t i = 0; i < kkt.ph.size(); ++i) {
        const int p = kkt.ph[i];
        const int ii = static_cast<int>(i);
        if (n > 0) out.v[p] = u[kkt.off_v + ii];
        out.pg[p] = u[kkt.off_pg + ii];
        out.pd[p] = u[kkt.off_pd + ii];
        out.qg[p] = u[kkt.off_qg + ii];
        out.P[p] = u[kkt.off_P + ii];
        out.Q[p] = u[kkt.off_Q + ii];
        if (n > 0) out.vhat[p] = u[kkt.off_vhat + ii];
    }
    for (std::size_t k = 0; k < bus.children.size(); ++k) {
        for (std::size_t j = 0; j < kkt.child_ph[k].size(); ++j) {
            out.Phat[k][kkt.child_ph[k][j]] = u[kkt.off_Phat[k] + static_cast<int>(j)];
            out.Qhat[k][kkt.child_ph[k][j]] = u[kkt.off_Qhat[k] + static_cast<int>(j)];
        }
    }
    return out;
}

AdmmSolver::AdmmSolver(FeederModel feeder, std::vector<ChargingRequest> fleet, BusSeries d_p,
                       BusSeries d_q, AdmmConfig cfg)
    : config(cfg),
      feeder_(std::move(feeder)),
      fleet_(std::move(fleet)),
      d_p_(std::move(d_p)),
      d_q_(std::move(d_q)) {
    feeder_.validate();
    N_ = feeder_.num_buses();
    if (static_cast<int>(d_p_.size()) != N_ || static_cast<int>(d_q_.size()) != N_)
        throw DimensionMismatch("admm: load series bus count differs from feeder");
    T_ = d_p_.empty() ? 0 : static_cast<int>(d_p_[0].size());
    if (T_ <= 0) throw DimensionMismatch("admm: empty horizon");
    for (int n = 0; n < N_; ++n) {
        if (static_cast<int>(d_p_[n].size()) != T_ || static_cast<int>(d_q_[n].size()) != T_)
            throw DimensionMismatch("admm: ragged load series");
    }
    if (config.rho <= 0.0) throw ValidationError("admm: rho must be positive");

    std::map<std::pair<int, int>, std::size_t> group_index;
    for (std::size_t m = 0; m < fleet_.size(); ++m) {
        const auto& req = fleet_[m];
        validate_request(req, T_);
        if (req.bus < 0 || req.bus >= N_)
            throw ValidationError("request " + req.id + ": unknown bus " +
                                  std::to_string(req.bus));
        if (req.phase < 0 || req.phase > 2 || !feeder_.buses[req.bus].phases[req.phase])
            throw ValidationError("request " + req.id + ": bus " + std::to_string(req.bus) +
                                  " lacks the requested phase");
        const auto key = std::make_pair(req.bus, req.phase);
        auto it = group_index.find(key);
        if (it == group_index.end()) {
            it = group_index.emplace(key, groups.size()).first;
            groups.push_back({req.bus, req.phase, {}, {}});
        }
        groups[it->second].members.push_back(static_cast<int>(m));
    }
    for (auto& g : groups) g.profiles.assign(g.members.size(), Vec::Zero(T_));

    const std::size_t cells = static_cast<std::size_t>(N_) * T_;
    const auto zero_field = [&] { return Field(cells, Vec3::Zero()); };
    x_v = zero_field(); x_pg = zero_field(); x_pd = zero_field();
    x_qg = zero_field(); x_P = zero_field(); x_Q = zero_field();
    xh_v = zero_field(); xh_P = zero_field(); xh_Q = zero_field();
    z_v = zero_field(); z_pg = zero_field(); z_pd = zero_field();
    z_qg = zero_field(); z_P = zero_field(); z_Q = zero_field();
    l_p = zero_field(); l_q = zero_field(); l_d = zero_field();
    l_P = zero_field(); l_Q = zero_field(); l_v = zero_field();
    lh_P = zero_field(); lh_Q = zero_field(); lh_v = zero_field();
    mu = zero_field();
    sum_e = zero_field();
    // The substation voltage is a model constant, stored as a fixed consensus
    // value so children read it uniformly.
    for (int t = 0; t < T_; ++t) z_v[idx(0, t)] = Vec3::Constant(feeder_.v0);
    z_prev_v_ = z_v;
    z_prev_pg_ = z_pg;
    z_prev_pd_ = z_pd;
    z_prev_qg_ = z_qg;
    z_prev_P_ = z_P;
    z_prev_Q_ = z_Q;

    kkt_.reserve(N_);
    for (int n = 0; n < N_; ++n)
        kkt_.push_back(std::make_unique<detail::BusKkt>(feeder_, n, config.rho));
}

AdmmSolver::~AdmmSolver() = default;

void AdmmSolver::x_update_all() {
    const std::size_t cells = static_cast<std::size_t>(N_) * T_;
    parallel_for(cells, config.threads, [&](std::size_t cell) {
        const int n = static_cast<int>(cell / T_);
        const int t = static_cast<int>(cell % T_);
        const detail::BusKkt& K = *kkt_[n];
        const std::size_t id = idx(n, t);

        Eigen::VectorXd c(K.len);
        for (std::size_t i = 0; i < K.ph.size(); ++i) {
            const int p = K.ph[i];
            const int ii = static_cast<int>(i);
            if (n > 0) c[K.off_v + ii] = z_v[id][p] - l_v[id][p];
            c[K.off_pg + ii] = z_pg[id][p] - l_p[id][p];
            c[K.off_pd + ii] = z_pd[id][p] - l_d[id][p];
            c[K.off_qg + ii] = z_qg[id][p] - l_q[id][p];
            c[K.off_P + ii] = z_P[id][p] - l_P[id][p];
            c[K.off_Q + ii] = z_Q[id][p] - l_Q[id][p];
            if (n > 0) {
                const std::size_t pid = idx(feeder_.buses[n].parent, t);
                c[K.off_vhat + ii] = z_v[pid][p] - lh_v[id][p];
            }
        }
        for (std::size_t k = 0; k < K.children.size(); ++k) {
            const std::size_t kid = idx(K.children[k], t);
            for (std::size_t j = 0; j < K.child_ph[k].size(); ++j) {
                const int p = K.child_ph[k][j];
                c[K.off_Phat[k] + static_cast<int>(j)] = z_P[kid][p] - lh_P[kid][p];
                c[K.off_Qhat[k] + static_cast<int>(j)] = z_Q[kid][p] - lh_Q[kid][p];
            }
        }

        const Eigen::VectorXd u = K.apply(c, d_q_[n][t]);

        for (std::size_t i = 0; i < K.ph.size(); ++i) {
            const int p = K.ph[i];
            const int ii = static_cast<int>(i);
            if (n > 0) x_v[id][p] = u[K.off_v + ii];
            x_pg[id][p] = u[K.off_pg + ii];
            x_pd[id][p] = u[K.off_pd + ii];
            x_qg[id][p] = u[K.off_qg + ii];
            x_P[id][p] = u[K.off_P + ii];
            x_Q[id][p] = u[K.off_Q + ii];
            if (n > 0) xh_v[id][p] = u[K.off_vhat + ii];
        }
        for (std::size_t k = 0; k < K.children.size(); ++k) {
            const std::size_t kid = idx(K.children[k], t);
            for (std::size_t j = 0; j < K.child_ph[k].size(); ++j) {
                const int p = K.child_ph[k][j];
                xh_P[kid][p] = u[K.off_Phat[k] + static_cast<int>(j)];
                xh_Q[kid][p] = u[K.off_Qhat[k] + static_cast<int>(j)];
            }
        }
    });
}

void AdmmSolver::ev_update_all() {
    const double scale = std::max(last_op, last_od);
    const double gap_tol = std::isfinite(scale)
                               ? std::min(config.inner_gap_cap, 0.1 * scale)
                               : config.inner_gap_cap;
    parallel_for(groups.size(), config.threads, [&](std::size_t gi) {
        EvGroup& g = groups[gi];
        Vec l(T_);
        for (int t = 0; t < T_; ++t) {
            const std::size_t id = idx(g.bus, t);
            l[t] = d_p_[g.bus][t][g.phase] - z_pd[id][g.phase] + mu[id][g.phase];
        }
        std::vector<ChargingRequest> reqs;
        reqs.reserve(g.members.size());
        for (int m : g.members) reqs.push_back(fleet_[m]);
        FwStop stop;
        stop.max_iter = config.inner_max_iter;
        stop.eps_rel = -1.0;
        stop.gap_tol = gap_tol;
        const FwResult res = schedule(reqs, l, CostModel::valley(), stop, 1, &g.profiles);
        g.profiles = res.profiles;
        for (int t = 0; t < T_; ++t) {
            double s = 0.0;
            for (const Vec& e : g.profiles) s += e[t];
            sum_e[idx(g.bus, t)][g.phase] = s;
        }
    });
}

void AdmmSolver::z_update_all() {
    z_prev_v_ = z_v;
    z_prev_pg_ = z_pg;
    z_prev_pd_ = z_pd;
    z_prev_qg_ = z_qg;
    z_prev_P_ = z_P;
    z_prev_Q_ = z_Q;

    const std::size_t cells = static_cast<std::size_t>(N_) * T_;
    parallel_for(cells, config.threads, [&](std::size_t cell) {
        const int n = static_cast<int>(cell / T_);
        const int t = static_cast<int>(cell % T_);
        const Bus& bus = feeder_.buses[n];
        const std::size_t id = idx(n, t);
        const double rho = config.rho;

        for (int p : bus.phase_list()) {
            const double a = bus.has_gen ? bus.gen.a[p] : 0.0;
            const double b = bus.has_gen ? bus.gen.b[p] : 0.0;
            const double plo = bus.has_gen ? bus.gen.pmin[p] : 0.0;
            const double phi = bus.has_gen ? bus.gen.pmax[p] : 0.0;
            const double qlo = bus.has_gen ? bus.gen.qmin[p] : 0.0;
            const double qhi = bus.has_gen ? bus.gen.qmax[p] : 0.0;
            z_pg[id][p] = z_update_pg(x_pg[id][p] + l_p[id][p], a, b, rho, plo, phi);
            z_qg[id][p] = z_update_box(x_qg[id][p] + l_q[id][p], qlo, qhi);
            z_pd[id][p] =
                z_update_pd(x_pd[id][p], l_d[id][p], d_p_[n][t][p], sum_e[id][p], mu[id][p]);
            if (n > 0) {
                std::vector<double> child_terms;
                child_terms.reserve(bus.children.size());
                for (int k : bus.children) {
                    if (!feeder_.buses[k].phases[p]) continue;
                    const std::size_t kid = idx(k, t);
                    child_terms.push_back(xh_v[kid][p] + lh_v[kid][p]);
                }
                z_v[id][p] = z_update_v(child_terms, x_v[id][p] + l_v[id][p], bus.v_min,
                                        bus.v_max);
                const double Pb = 0.5 * (x_P[id][p] + xh_P[id][p] + l_P[id][p] + lh_P[id][p]);
                const double Qb = 0.5 * (x_Q[id][p] + xh_Q[id][p] + l_Q[id][p] + lh_Q[id][p]);
                const auto [Pz, Qz] = project_line_disk(Pb, Qb, bus.s_line_max);
                z_P[id][p] = Pz;
                z_Q[id][p] = Qz;
            }
        }
        if (n == 0) {
            const auto [P0, Q0] = project_substation_capacity(x_P[id] + l_P[id],
                                                              x_Q[id] + l_Q[id], feeder_.sf_max);
            z_P[id] = P0;
            z_Q[id] = Q0;
        }
    });
}

ResidualPair AdmmSolver::multiplier_update_all() {
    ResidualPair res;
    const double rho = config.rho;
    auto acc = [&res](double r, double w_new) {
        res.op += (r + w_new) * (r + w_new);
        res.op_std += r * r;
    };

    for (int n = 0; n < N_; ++n) {
        const Bus& bus = feeder_.buses[n];
        const auto ph = bus.phase_list();
        for (int t = 0; t < T_; ++t) {
            const std::size_t id = idx(n, t);
            const std::size_t pid = n > 0 ? idx(bus.parent, t) : 0;
            for (int p : ph) {
                double r;
                r = x_pg[id][p] - z_pg[id][p]; l_p[id][p] += r; acc(r, l_p[id][p]);
                r = x_qg[id][p] - z_qg[id][p]; l_q[id][p] += r; acc(r, l_q[id][p]);
                r = x_pd[id][p] - z_pd[id][p]; l_d[id][p] += r; acc(r, l_d[id][p]);
                r = x_P[id][p] - z_P[id][p]; l_P[id][p] += r; acc(r, l_P[id][p]);
                r = x_Q[id][p] - z_Q[id][p]; l_Q[id][p] += r; acc(r, l_Q[id][p]);
                if (n > 0) {
                    r = x_v[id][p] - z_v[id][p]; l_v[id][p] += r; acc(r, l_v[id][p]);
                    r = xh_v[id][p] - z_v[pid][p]; lh_v[id][p] += r; acc(r, lh_v[id][p]);
                    r = xh_P[id][p] - z_P[id][p]; lh_P[id][p] += r; acc(r, lh_P[id][p]);
                    r = xh_Q[id][p] - z_Q[id][p]; lh_Q[id][p] += r; acc(r, lh_Q[id][p]);
                }
                r = d_p_[n][t][p] + sum_e[id][p] - z_pd[id][p]; mu[id][p] += r; acc(r, mu[id][p]);

                double dz = z_pg[id][p] - z_prev_pg_[id][p];
                res.od += dz * dz;
                dz = z_qg[id][p] - z_prev_qg_[id][p]; res.od += dz * dz;
                dz = z_pd[id][p] - z_prev_pd_[id][p]; res.od += dz * dz;
                dz = z_P[id][p] - z_prev_P_[id][p]; res.od += dz * dz;
                dz = z_Q[id][p] - z_prev_Q_[id][p]; res.od += dz * dz;
                if (n > 0) {
                    dz = z_v[id][p] - z_prev_v_[id][p];
                    res.od += dz * dz;
                }
            }
        }
    }
    res.od *= rho;
    return res;
}

ResidualPair AdmmSolver::iterate_once() {
    x_update_all();
    ev_update_all();
    z_update_all();
    const ResidualPair res = multiplier_update_all();
    last_op = res.op;
    last_od = res.od;
    return res;
}

double AdmmSolver::objective_proxy() const {
    double total = 0.0;
    for (int t = 0; t < T_; ++t) {
        const std::size_t id0 = idx(0, t);
        for (int p : feeder_.buses[0].phase_list())
            total += feeder_.f0_a * x_P[id0][p] * x_P[id0][p] + feeder_.f0_b * x_P[id0][p];
        for (int n = 0; n < N_; ++n) {
            const Bus& bus = feeder_.buses[n];
            if (!bus.has_gen) continue;
            const std::size_t id = idx(n, t);
            for (int p : bus.phase_list()) {
                const double pg = z_pg[id][p];
                total += bus.gen.a[p] * pg * pg + bus.gen.b[p] * pg + bus.gen.c[p];
            }
        }
    }
    return total;
}

AdmmResult AdmmSolver::run() {
    const double threshold = residual_threshold(config.tol, T_, N_);
    AdmmResult result;
    int it = 0;
    for (it = 1; it <= config.max_iter; ++it) {
        const ResidualPair res = iterate_once();
        result.trace.push_back({it, objective_proxy(), res.op, res.od, res.op_std});
        result.residuals = res;
        if (res.op <= threshold && res.od <= threshold) {
            result.converged = true;
            break;
        }
    }
    result.iterations = std::min(it, config.max_iter);

    // Raw x-side state.
    GridState raw = GridState::zeros(N_, T_);
    for (int n = 0; n < N_; ++n) {
        for (int t = 0; t < T_; ++t) {
            const std::size_t id = idx(n, t);
            raw.v[n][t] = n == 0 ? Vec3::Constant(feeder_.v0) : x_v[id];
            raw.pg[n][t] = x_pg[id];
            raw.qg[n][t] = x_qg[id];
            raw.pd[n][t] = x_pd[id];
            raw.qd[n][t] = d_q_[n][t];
            raw.P[n][t] = x_P[id];
            raw.Q[n][t] = x_Q[id];
        }
    }
    result.raw = std::move(raw);

    // Repaired state: box-feasible generation, exact EV loads, exact flow solve.
    BusSeries pg = zero_series(N_, T_), pd = zero_series(N_, T_), qg = zero_series(N_, T_);
    for (int n = 0; n < N_; ++n) {
        for (int t = 0; t < T_; ++t) {
            const std::size_t id = idx(n, t);
            pg[n][t] = z_pg[id];
            qg[n][t] = z_qg[id];
            pd[n][t] = d_p_[n][t] + sum_e[id];
        }
    }
    result.repaired = forward_sweep(feeder_, pg, pd, qg, d_q_);

    double objective = 0.0;
    for (int t = 0; t < T_; ++t) {
        for (int p : feeder_.buses[0].phase_list()) {
            const double P0 = result.repaired.P[0][t][p];
            objective += feeder_.f0_a * P0 * P0 + feeder_.f0_b * P0;
        }
        for (int n = 0; n < N_; ++n) {
            const Bus& bus = feeder_.buses[n];
            if (!bus.has_gen) continue;
            for (int p : bus.phase_list()) {
                const double g = pg[n][t][p];
                objective += bus.gen.a[p] * g * g + bus.gen.b[p] * g + bus.gen.c[p];
            }
        }
    }
    result.objective = objective;

    result.profiles.assign(fleet_.size(), Vec::Zero(T_));
    for (const auto& g : groups) {
        for (std::size_t j = 0; j < g.members.size(); ++j)
            result.profiles[g.members[j]] = g.profiles[j];
    }
    return result;
}

AdmmResult admm_solve(const FeederModel& feeder, const std::vector<ChargingRequest>& fleet,
                      const BusSeries& d_p, const BusSeries& d_q, const AdmmConfig& config) {
    AdmmSolver solver(feeder, fleet, d_p, d_q, config);
    return solver.run();
}

}  // namespace evsched
