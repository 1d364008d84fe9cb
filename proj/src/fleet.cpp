#include "evsched/fleet.hpp"

#include <algorithm>
#include <cmath>

#include "evsched/errors.hpp"

namespace evsched {

Vec slot_caps(const ChargingRequest& req, int T) {
    Vec caps = Vec::Zero(T);
    for (int s : req.slots) {
        if (s < 1 || s > T)
            throw IndexOutOfRange("request " + req.id + ": slot " + std::to_string(s) +
                                  " outside 1.." + std::to_string(T));
        caps[s - 1] = req.rate_cap;
    }
    return caps;
}

void validate_request(const ChargingRequest& req, int T) {
    if (!std::isfinite(req.rate_cap) || req.rate_cap < 0.0)
        throw ValidationError("request " + req.id + ": rate cap must be finite and >= 0");
    if (!std::isfinite(req.energy_need) || req.energy_need < 0.0)
        throw ValidationError("request " + req.id + ": energy need must be finite and >= 0");
    for (int s : req.slots) {
        if (s < 1 || s > T)
            throw IndexOutOfRange("request " + req.id + ": slot " + std::to_string(s) +
                                  " outside 1.." + std::to_string(T));
    }
    const double capacity = static_cast<double>(req.slots.size()) * req.rate_cap;
    const double tol = 1e-9 * std::max(req.energy_need, 1.0);
    if (req.energy_need > capacity + tol)
        throw EmptyFeasibleSet("request " + req.id + ": needs " + std::to_string(req.energy_need) +
                               " but window capacity is " + std::to_string(capacity));
}

double energy_need_from_soc(double battery_kwh, double daily_miles, double e100_kwh,
                            double target_soc) {
    if (!(battery_kwh > 0.0))
        throw NonPositiveCapacity("battery capacity must be positive");
    double soc = target_soc - daily_miles * e100_kwh / (100.0 * battery_kwh);
    soc = std::clamp(soc, 0.0, 1.0);
    return std::max(0.0, (target_soc - soc) * battery_kwh);
}

bool profile_feasible(const ChargingRequest& req, const Vec& e, int T) {
    if (e.size() != T) return false;
    const Vec caps = slot_caps(req, T);
    for (int t = 0; t < T; ++t) {
        if (e[t] < 0.0 || e[t] > caps[t]) return false;
    }
    const double tol = 1e-9 * std::max(req.energy_need, 1.0);
    return std::abs(e.sum() - req.energy_need) <= tol;
}

CostModel CostModel::valley() {
    CostModel m;
    m.kind = CostKind::QuadraticValley;
    return m;
}

CostModel CostModel::quadratic(Vec a, Vec b, Vec c) {
    if (a.size() != b.size())
        throw LengthMismatch("quadratic cost: a and b must have equal length");
    for (int t = 0; t < a.size(); ++t) {
        if (a[t] < 0.0) throw ValidationError("quadratic cost: a_t must be >= 0");
    }
    CostModel m;
    m.kind = CostKind::ConvexQuadratic;
    m.a = std::move(a);
    m.b = std::move(b);
    m.c = c.size() ? std::move(c) : Vec::Zero(m.a.size());
    return m;
}

CostModel CostModel::quadratic_uniform(double a, double b, int T) {
    return quadratic(Vec::Constant(T, a), Vec::Constant(T, b));
}

CostModel CostModel::linear(Vec b) {
    CostModel m;
    m.kind = CostKind::Linear;
    m.b = std::move(b);
    m.c = Vec::Zero(m.b.size());
    return m;
}

double CostModel::eval(int t, double x) const {
    switch (kind) {
        case CostKind::QuadraticValley:
            return 0.5 * x * x;
        case CostKind::ConvexQuadratic:
            if (t >= a.size()) throw LengthMismatch("cost coefficients shorter than horizon");
            return a[t] * x * x + b[t] * x + c[t];
        case CostKind::Linear:
            if (t >= b.size()) throw LengthMismatch("cost coefficients shorter than horizon");
            return b[t] * x + c[t];
    }
    return 0.0;
}

double CostModel::deriv(int t, double x) const {
    switch (kind) {
        case CostKind::QuadraticValley:
            return x;
        case CostKind::ConvexQuadratic:
            if (t >= a.size()) throw LengthMismatch("cost coefficients shorter than horizon");
            return 2.0 * a[t] * x + b[t];
        case CostKind::Linear:
            if (t >= b.size()) throw LengthMismatch("cost coefficients shorter than horizon");
            return b[t];
    }
    return 0.0;
}

double CostModel::max_curvature(int T) const {
    switch (kind) {
        case CostKind::QuadraticValley:
            return 1.0;
        case CostKind::ConvexQuadratic: {
            if (a.size() < T) throw LengthMismatch("cost coefficients shorter than horizon");
            double m = 0.0;
            for (int t = 0; t < T; ++t) m = std::max(m, 2.0 * a[t]);
            return m;
        }
        case CostKind::Linear:
            return 0.0;
    }
    return 0.0;
}

Vec aggregate_profiles(const std::vector<Vec>& profiles, int T) {
    Vec agg = Vec::Zero(T);
    for (const Vec& e : profiles) {
        if (e.size() != T) throw LengthMismatch("profile length differs from horizon");
        for (int t = 0; t < T; ++t) agg[t] += e[t];
    }
    return agg;
}

double total_cost(const std::vector<Vec>& profiles, const Vec& base_load,
                  const CostModel& cost) {
    const int T = static_cast<int>(base_load.size());
    return cost_of_aggregate(aggregate_profiles(profiles, T), base_load, cost);
}

double cost_of_aggregate(const Vec& aggregate, const Vec& base_load, const CostModel& cost) {
    if (aggregate.size() != base_load.size())
        throw LengthMismatch("aggregate length differs from base load");
    double total = 0.0;
    for (int t = 0; t < base_load.size(); ++t) total += cost.eval(t, base_load[t] + aggregate[t]);
    return total;
}

}  // namespace evsched
