#include "fim/stopvalue.hpp"

#include <cmath>

namespace fim {

LatticeSpec LatticeSpec::with_cfl(double x_min, double x_max, int n_y, double u, double v_lo,
                                  double v_hi) {
    LatticeSpec s;
    s.x_min = x_min;
    s.x_max = x_max;
    s.n_y = n_y;
    s.u = u;
    s.v_lo = v_lo;
    s.v_hi = v_hi;
    double dy = s.dy();
    s.n_t = static_cast<int>(std::ceil(u * v_hi * v_hi / (dy * dy)));
    s.n_t = std::max(s.n_t, 1);
    s.validate();
    return s;
}

void LatticeSpec::validate() const {
    if (!(0.0 < x_min && x_min < x_max)) throw std::invalid_argument("lattice: need 0 < x_min < x_max");
    if (n_y < 3) throw std::invalid_argument("lattice: need at least 3 space points");
    if (!(u > 0.0)) throw std::invalid_argument("lattice: horizon must be positive");
    if (!(v_lo >= 0.0 && v_hi > v_lo)) throw std::invalid_argument("lattice: need 0 <= v_lo < v_hi");
    if (n_t < 1) throw std::invalid_argument("lattice: need at least one time step");
    double d = dy();
    if (dt() > d * d / (v_hi * v_hi) * (1.0 + 1e-12))
        throw std::invalid_argument("lattice: CFL condition dt <= dy^2/v_hi^2 violated");
}

double ValueSurface::value0_at(double x) const {
    if (!(x >= spec.x_min && x <= spec.x_max))
        throw std::domain_error("surface: x outside lattice domain");
    double ly = std::log(x);
    double dy = spec.dy();
    Eigen::Index i = std::min<Eigen::Index>(y.size() - 2,
                                            static_cast<Eigen::Index>((ly - y[0]) / dy));
    double w = (ly - y[i]) / dy;
    const ArrayXd& v0 = values.front();
    return v0[i] + w * (v0[i + 1] - v0[i]);
}

ValueSurface solve_g_lattice(const GamePayoffPair& pair, const LatticeSpec& spec,
                             int max_stored_slices) {
    spec.validate();
    const int n = spec.n_y;
    const double dy = spec.dy(), dt = spec.dt();

    ValueSurface out;
    out.spec = spec;
    out.y = ArrayXd::LinSpaced(n, std::log(spec.x_min), std::log(spec.x_max));

    ArrayXd f1v(n), f2v(n), prices(n);
    for (int i = 0; i < n; ++i) {
        prices[i] = std::exp(out.y[i]);
        f1v[i] = pair.f1(prices[i]);
        f2v[i] = pair.f2(prices[i]);
        if (!std::isfinite(f1v[i]) || !std::isfinite(f2v[i]))
            throw std::invalid_argument("lattice: payoff not finite on the grid");
    }
    // Ghost nodes extrapolate the slice linearly in price, i.e. zero second
    // derivative in S at the edges. At the terminal slice this is the
    // payoff's asymptotic slope, and it tracks the value's far field as the
    // induction proceeds.
    double price_ghost_lo = std::exp(out.y[0] - dy);
    double price_ghost_hi = std::exp(out.y[n - 1] + dy);

    const int stride = std::max(1, (spec.n_t + max_stored_slices - 2) / (max_stored_slices - 1));
    auto keep = [&](int t_idx) { return t_idx % stride == 0 || t_idx == spec.n_t || t_idx == 0; };

    ArrayXd v = f1v, vn(n);

    std::vector<double> rev_times;
    std::vector<ArrayXd> rev_values;
    std::vector<std::vector<std::uint8_t>> rev_fb;
    rev_times.push_back(spec.u);
    rev_values.push_back(v);
    rev_fb.emplace_back(static_cast<std::size_t>(n), 0);

    const double half_dt = 0.5 * dt;
    const double lo2 = spec.v_lo * spec.v_lo, hi2 = spec.v_hi * spec.v_hi;
    const double inv_dy2 = 1.0 / (dy * dy), inv_2dy = 0.5 / dy;

    auto curvature = [&](const ArrayXd& w, int i, double ghost_lo, double ghost_hi) {
        double vm = i > 0 ? w[i - 1] : ghost_lo;
        double vp = i + 1 < n ? w[i + 1] : ghost_hi;
        double d2 = (vp - 2.0 * w[i] + vm) * inv_dy2;
        double d1 = (vp - vm) * inv_2dy;
        return d2 - d1; // generator (v^2/2)(dyy - dy)
    };

    for (int step = spec.n_t - 1; step >= 0; --step) {
        double slope_lo = (v[1] - v[0]) / (prices[1] - prices[0]);
        double slope_hi = (v[n - 1] - v[n - 2]) / (prices[n - 1] - prices[n - 2]);
        double ghost_lo = v[0] + slope_lo * (price_ghost_lo - prices[0]);
        double ghost_hi = v[n - 1] + slope_hi * (price_ghost_hi - prices[n - 1]);
        bool store = keep(step);
        const double* pv = v.data();
        double* pn = vn.data();
        for (int i = 1; i + 1 < n; ++i) {
            double curv = (pv[i + 1] - 2.0 * pv[i] + pv[i - 1]) * inv_dy2 -
                          (pv[i + 1] - pv[i - 1]) * inv_2dy;
            double vol2 = curv > 0.0 ? hi2 : lo2;
            pn[i] = std::min(f2v[i], pv[i] + half_dt * vol2 * curv);
        }
        for (int i : {0, n - 1}) {
            double curv = curvature(v, i, ghost_lo, ghost_hi);
            double vol2 = curv > 0.0 ? hi2 : lo2;
            pn[i] = std::min(f2v[i], pv[i] + half_dt * vol2 * curv);
        }
        if (store) {
            std::vector<std::uint8_t> fb(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                fb[static_cast<std::size_t>(i)] = curvature(v, i, ghost_lo, ghost_hi) > 0.0;
            v.swap(vn);
            rev_times.push_back(step * dt);
            rev_values.push_back(v);
            rev_fb.push_back(std::move(fb));
        } else {
            v.swap(vn);
        }
    }

    out.slice_times.assign(rev_times.rbegin(), rev_times.rend());
    out.values.assign(rev_values.rbegin(), rev_values.rend());
    out.feedback_hi.assign(rev_fb.rbegin(), rev_fb.rend());
    return out;
}

double horizon_invariance_gap(const GamePayoffPair& pair, const LatticeSpec& spec, double x0,
                              double u1, double u2) {
    if (!(u1 > 0.0 && u2 > 0.0)) throw std::invalid_argument("horizon gap: horizons must be positive");
    LatticeSpec s1 = LatticeSpec::with_cfl(spec.x_min, spec.x_max, spec.n_y, u1, spec.v_lo, spec.v_hi);
    LatticeSpec s2 = LatticeSpec::with_cfl(spec.x_min, spec.x_max, spec.n_y, u2, spec.v_lo, spec.v_hi);
    double a = solve_g_lattice(pair, s1, 2).value0_at(x0);
    double b = solve_g_lattice(pair, s2, 2).value0_at(x0);
    return std::abs(a - b);
}

FeedbackTable extract_feedback_vol(const ValueSurface& surface, double x0) {
    if (!(surface.spec.v_lo > 0.0))
        throw std::invalid_argument("feedback: v_lo must be positive so 1/alpha stays bounded");
    FeedbackTable t;
    t.times = surface.slice_times;
    t.y = surface.y;
    t.vol.reserve(surface.feedback_hi.size());
    for (const auto& fb : surface.feedback_hi) {
        ArrayXd row(surface.y.size());
        for (Eigen::Index i = 0; i < row.size(); ++i)
            row[i] = fb[static_cast<std::size_t>(i)] ? surface.spec.v_hi : surface.spec.v_lo;
        t.vol.push_back(std::move(row));
    }
    double ly = std::log(x0);
    Eigen::Index i = std::min<Eigen::Index>(
        surface.y.size() - 1,
        static_cast<Eigen::Index>(std::lround((ly - surface.y[0]) / surface.spec.dy())));
    t.alpha0_at_x0 = t.vol.front()[std::max<Eigen::Index>(i, 0)];
    return t;
}

} // namespace fim
