#include "fim/envelope.hpp"
#include "fim/envelope_detail.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fim {

namespace detail {

double slope_at_zero(const PayoffFn& f) {
    switch (f.kind()) {
        case PayoffKind::Call: return 0.0;
        case PayoffKind::Put: return -f.scale();
        case PayoffKind::Power: return 0.0;
        case PayoffKind::Tabulated: return f.right_derivative(f.xs().front() * 0.5);
    }
    throw std::logic_error("slope_at_zero: unknown kind");
}

double obstacle_sweep(ArrayXd& h, const ArrayXd& f1v, const ArrayXd& f2v, double mhat_dx,
                      double* min_delta) {
    const Eigen::Index n = h.size();
    double change = 0.0, worst = 0.0;
    for (int parity = 1; parity <= 2; ++parity) {
        for (Eigen::Index i = parity; i + 1 < n; i += 2) {
            double avg = 0.5 * (h[i - 1] + h[i + 1]);
            double v = std::max(f1v[i], std::min(f2v[i], avg));
            double d = v - h[i];
            change = std::max(change, std::abs(d));
            worst = std::min(worst, d);
            h[i] = v;
        }
    }
    double vb = std::clamp(h[n - 2] + mhat_dx, f1v[n - 1], f2v[n - 1]);
    double db = vb - h[n - 1];
    change = std::max(change, std::abs(db));
    worst = std::min(worst, db);
    h[n - 1] = vb;
    if (min_delta) *min_delta = std::min(*min_delta, worst);
    return change;
}

} // namespace detail

namespace {

double reference_scale(const GamePayoffPair& pair) {
    double s = 1.0;
    for (const PayoffFn* f : {&pair.f1, &pair.f2})
        for (double k : f->kinks()) s = std::max(s, k);
    return s;
}

// inf{y > 0 : pred(y)} for a monotone (false-then-true) predicate; +inf when
// pred never fires on the scanned range.
template <class Pred>
double monotone_threshold(Pred pred, double scale) {
    const double lo = scale * 1e-9, hi = scale * 1e12;
    const int n_scan = 512;
    double prev = lo;
    if (pred(lo)) return 0.0;
    double found = kInf, left = lo;
    for (int i = 1; i <= n_scan; ++i) {
        double y = lo * std::pow(hi / lo, i / static_cast<double>(n_scan));
        if (pred(y)) {
            found = y;
            left = prev;
            break;
        }
        prev = y;
    }
    if (!std::isfinite(found)) return kInf;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (left + found);
        (pred(mid) ? found : left) = mid;
    }
    return found;
}

bool same_family_base(const GamePayoffPair& p) {
    const PayoffFn &a = p.f1, &b = p.f2;
    if (a.kind() != b.kind() || a.kind() == PayoffKind::Tabulated) return false;
    return (a.kind() == PayoffKind::Power) ? a.exponent() == b.exponent()
                                           : a.strike() == b.strike();
}

// Closed-form A and beta for same-family pairs; exact arithmetic.
void analytic_A_beta(const GamePayoffPair& pair, double& A, double& beta) {
    const PayoffFn &f1 = pair.f1, &f2 = pair.f2;
    double z1 = f1.value_at_zero(), z2 = f2.value_at_zero();
    if (z1 == z2) {
        A = 0.0;
        beta = detail::slope_at_zero(f2);
        return;
    }
    double D = z2 - z1;
    switch (f1.kind()) {
        case PayoffKind::Call: {
            double K = f1.strike();
            if (D <= f2.scale() * K) {
                A = K;
                beta = (f2(K) - z1) / K;
            } else {
                A = kInf;
                beta = kInf;
            }
            return;
        }
        case PayoffKind::Put: {
            double K = f1.strike();
            if (f2.penalty() - f1.penalty() <= f1.scale() * K) {
                A = K;
                beta = (f2(K) - z1) / K;
            } else {
                A = kInf;
                beta = kInf;
            }
            return;
        }
        case PayoffKind::Power: {
            double p = f1.exponent(), c2 = f2.scale();
            A = std::pow(D / (c2 * (p - 1.0)), 1.0 / p);
            beta = c2 * p * std::pow(A, p - 1.0);
            return;
        }
        default: break;
    }
    throw std::logic_error("analytic_A_beta: unexpected kind");
}

} // namespace

ConvexEnvelopeParams convex_params(const GamePayoffPair& pair) {
    if (!pair.both_convex())
        throw std::invalid_argument("convex_params: both payoffs must be convex");
    const PayoffFn &f1 = pair.f1, &f2 = pair.f2;
    double scale = reference_scale(pair);

    ConvexEnvelopeParams p{};
    p.m = f1.asymptotic_slope();

    if (same_family_base(pair)) {
        analytic_A_beta(pair, p.A, p.beta);
    } else {
        double z1 = f1.value_at_zero(), z2 = f2.value_at_zero();
        if (z1 == z2) {
            p.A = 0.0;
            p.beta = detail::slope_at_zero(f2);
        } else {
            p.A = monotone_threshold(
                [&](double y) { return (f2(y) - z1) / y <= f2.right_derivative(y); }, scale);
            p.beta = std::isfinite(p.A) && p.A > 0.0 ? (f2(p.A) - z1) / p.A : kInf;
        }
    }

    if (std::isinf(p.m)) {
        p.rho = kInf;
    } else if (f2.kind() == PayoffKind::Call) {
        p.rho = f2.scale() > p.m ? f2.strike() : kInf;
    } else if (f2.kind() == PayoffKind::Put) {
        p.rho = 0.0 > p.m ? f2.strike() : kInf; // slope jumps -c -> 0 at K
    } else {
        double m = p.m;
        p.rho = monotone_threshold([&](double y) { return f2.right_derivative(y) > m; }, scale);
    }

    if (!(std::min(p.beta, p.m) < kInf))
        throw std::logic_error("convex_params: beta and m both infinite");
    return p;
}

double g_closed_form(const ConvexEnvelopeParams& p, const GamePayoffPair& pair, double x) {
    if (!(x > 0.0)) throw std::domain_error("g_closed_form: price must be positive");
    double f10 = pair.f1.value_at_zero();
    if (p.m <= p.beta) return f10 + p.m * x;
    if (x < p.A) return f10 + p.beta * x;
    if (x < p.rho) return pair.f2(x);
    return pair.f2(p.rho) + p.m * (x - p.rho);
}

double right_derivative(const ConvexEnvelopeParams& p, const GamePayoffPair& pair, double x) {
    if (!(x > 0.0)) throw std::domain_error("right_derivative: price must be positive");
    if (p.m <= p.beta) return p.m;
    if (x < p.A) return p.beta;
    if (x < p.rho) return pair.f2.right_derivative(x);
    return p.m;
}

namespace {

// Zero set of the convex gap f2 - (f1(0) + m x) for the m <= beta branch.
Interval line_contact(const GamePayoffPair& pair, double m) {
    const PayoffFn& f2 = pair.f2;
    double f10 = pair.f1.value_at_zero();
    auto gap = [&](double x) { return f2(x) - f10 - m * x; };
    auto ctol = [&](double x) { return 1e-11 * (1.0 + std::abs(f2(x)) + std::abs(f10)); };

    double scale = reference_scale(pair);
    const double lo = scale * 1e-9, hi = scale * 1e9;
    const int n_scan = 1024;
    double best_x = lo, best = gap(lo);
    for (int i = 1; i <= n_scan; ++i) {
        double x = lo * std::pow(hi / lo, i / static_cast<double>(n_scan));
        double gx = gap(x);
        if (gx < best) {
            best = gx;
            best_x = x;
        }
    }
    // Golden-section polish around the scan minimum.
    double a = best_x / std::pow(hi / lo, 1.0 / n_scan);
    double b = best_x * std::pow(hi / lo, 1.0 / n_scan);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double g1 = gap(x1), g2 = gap(x2);
    for (int it = 0; it < 160; ++it) {
        if (g1 <= g2) {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - phi * (b - a);
            g1 = gap(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + phi * (b - a);
            g2 = gap(x2);
        }
    }
    double xmin = 0.5 * (a + b);
    if (gap(xmin) > best) xmin = best_x;
    if (gap(xmin) > ctol(xmin)) return Interval{0.0, 0.0, true};

    // Expand to the touching interval by bisection on each side.
    double left = xmin;
    if (gap(lo) <= ctol(lo)) {
        left = 0.0;
    } else {
        double out = lo, in = xmin;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (out + in);
            (gap(mid) <= ctol(mid) ? in : out) = mid;
        }
        left = in;
    }
    double right = xmin;
    if (gap(hi) <= ctol(hi)) {
        right = kInf;
    } else {
        double in = xmin, out = hi;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (out + in);
            (gap(mid) <= ctol(mid) ? in : out) = mid;
        }
        right = in;
    }
    return Interval{left, right, false};
}

} // namespace

Interval contact_interval(const ConvexEnvelopeParams& p, const GamePayoffPair& pair) {
    if (p.beta < p.m) return Interval{p.A, p.rho, false}; // closed [A, rho]
    return line_contact(pair, p.m);
}

Interval stop_interval(const ConvexEnvelopeParams& p, const GamePayoffPair& pair, double x) {
    if (!(x > 0.0)) throw std::domain_error("stop_interval: price must be positive");
    double gx = g_closed_form(p, pair, x);
    double f2x = pair.f2(x);
    if (gx >= f2x - 1e-9 * (1.0 + std::abs(f2x))) return Interval{x, x, true};
    Interval c = contact_interval(p, pair);
    if (c.empty) return Interval{-kInf, kInf, false};
    if (x < c.lo) return Interval{-kInf, c.lo, false};
    if (x > c.hi) return Interval{c.hi, kInf, false};
    // Inside the nominal contact interval yet g < f2: fall back to the
    // nearest endpoints.
    return Interval{c.lo, c.hi, false};
}

double EnvelopeResult::value_at(double x) const {
    const Eigen::Index n = xs.size();
    if (!(x >= xs[0] && x <= xs[n - 1])) throw std::domain_error("envelope: x outside grid domain");
    double dx = xs[1] - xs[0];
    Eigen::Index i = std::min<Eigen::Index>(n - 2, static_cast<Eigen::Index>((x - xs[0]) / dx));
    double w = (x - xs[i]) / dx;
    return g[i] + w * (g[i + 1] - g[i]);
}

double EnvelopeResult::dplus_at(double x) const {
    const Eigen::Index n = xs.size();
    if (!(x >= xs[0] && x <= xs[n - 1])) throw std::domain_error("envelope: x outside grid domain");
    double dx = xs[1] - xs[0];
    Eigen::Index i = std::min<Eigen::Index>(n - 2, static_cast<Eigen::Index>((x - xs[0]) / dx));
    return dplus[i];
}

int EnvelopeResult::index_at(double x) const {
    const Eigen::Index n = xs.size();
    if (!(x >= xs[0] && x <= xs[n - 1])) throw std::domain_error("envelope: x outside grid domain");
    double dx = xs[1] - xs[0];
    return static_cast<int>(std::min<Eigen::Index>(
        n - 1, static_cast<Eigen::Index>(std::lround((x - xs[0]) / dx))));
}

namespace {

// Projected SOR for the double-obstacle system (convergent for any
// relaxation in (0,2)); the over-relaxed sweeps collapse the O(n^2)
// Gauss-Seidel iteration count to O(n).
bool psor_solve(ArrayXd& h, const ArrayXd& f1v, const ArrayXd& f2v, double mhat_dx, double tol,
                long max_sweeps) {
    const Eigen::Index n = h.size();
    const double omega = 2.0 / (1.0 + std::sin(M_PI / static_cast<double>(n - 1)));
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0.0;
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            double avg = 0.5 * (h[i - 1] + h[i + 1]);
            double v = std::clamp(h[i] + omega * (avg - h[i]), f1v[i], f2v[i]);
            change = std::max(change, std::abs(v - h[i]));
            h[i] = v;
        }
        double vb = std::clamp(h[n - 2] + mhat_dx, f1v[n - 1], f2v[n - 1]);
        change = std::max(change, std::abs(vb - h[n - 1]));
        h[n - 1] = vb;
        if (change < 0.25 * tol) return true;
    }
    return false;
}

} // namespace

EnvelopeResult g_grid(const GamePayoffPair& pair, double x_min, double x_max,
                      const GridOptions& opt) {
    if (!(0.0 < x_min && x_min < x_max)) throw std::invalid_argument("g_grid: need 0 < x_min < x_max");
    if (opt.n_points < 16) throw std::invalid_argument("g_grid: need at least 16 grid points");

    const Eigen::Index n = opt.n_points;
    EnvelopeResult res;
    res.tol = opt.tol;
    res.xs = ArrayXd::LinSpaced(n, x_min, x_max);
    double dx = res.xs[1] - res.xs[0];

    ArrayXd f1v(n), f2v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        f1v[i] = pair.f1(res.xs[i]);
        f2v[i] = pair.f2(res.xs[i]);
    }
    double mhat = (f1v[n - 1] - pair.f1(res.xs[n - 1] - dx)) / dx;
    double mhat_dx = mhat * dx;

    ArrayXd h = f1v;
    double min_delta = 0.0;
    double change = kInf;
    long sweeps = 0;
    bool solved = false;
    bool direct_ok = false;

    if (opt.method == GridMethod::Direct) {
        // Coarse-to-fine start: solve a decimated grid first and refine, so
        // the fine PSOR only polishes a near-solution.
        std::vector<Eigen::Index> sizes{n};
        while (sizes.back() > 320) sizes.push_back(sizes.back() / 2 + 1);
        std::reverse(sizes.begin(), sizes.end());
        ArrayXd xs_prev, h_prev;
        direct_ok = true;
        for (Eigen::Index nl : sizes) {
            ArrayXd xs_l = ArrayXd::LinSpaced(nl, x_min, x_max);
            ArrayXd f1l(nl), f2l(nl), hl(nl);
            for (Eigen::Index i = 0; i < nl; ++i) {
                f1l[i] = pair.f1(xs_l[i]);
                f2l[i] = pair.f2(xs_l[i]);
            }
            if (xs_prev.size() == 0) {
                hl = f1l;
            } else {
                double dxp = xs_prev[1] - xs_prev[0];
                for (Eigen::Index i = 0; i < nl; ++i) {
                    Eigen::Index j = std::min<Eigen::Index>(
                        xs_prev.size() - 2, static_cast<Eigen::Index>((xs_l[i] - xs_prev[0]) / dxp));
                    double w = (xs_l[i] - xs_prev[j]) / dxp;
                    hl[i] = std::clamp(h_prev[j] + w * (h_prev[j + 1] - h_prev[j]), f1l[i], f2l[i]);
                }
            }
            double dxl = xs_l[1] - xs_l[0];
            double mh = (f1l[nl - 1] - pair.f1(xs_l[nl - 1] - dxl)) / dxl * dxl;
            if (!psor_solve(hl, f1l, f2l, mh, opt.tol, 200 * nl + 20000)) {
                direct_ok = false;
                break;
            }
            xs_prev = std::move(xs_l);
            h_prev = std::move(hl);
        }
        if (direct_ok) h = h_prev;
    }

    if (direct_ok) {
        // Certify with plain sweeps; at the fixed point the first sweep
        // already moves by less than tol.
        const long cert_cap = 50 * static_cast<long>(n) + 1000;
        while (sweeps < cert_cap) {
            change = detail::obstacle_sweep(h, f1v, f2v, mhat_dx, nullptr);
            ++sweeps;
            if (change < opt.tol) {
                solved = true;
                break;
            }
        }
    }
    if (!solved) {
        h = f1v;
        sweeps = 0;
        const long cap = opt.max_sweep_factor * static_cast<long>(n) * static_cast<long>(n);
        while (sweeps < cap) {
            change = detail::obstacle_sweep(h, f1v, f2v, mhat_dx, &min_delta);
            ++sweeps;
            if (change < opt.tol) {
                solved = true;
                break;
            }
        }
        if (!solved)
            throw std::runtime_error("g_grid: no convergence after sweep cap; last sup-change = " +
                                     std::to_string(change));
        if (min_delta < 0.0)
            throw std::logic_error("g_grid: monotone iteration decreased; delta = " +
                                   std::to_string(min_delta));
    }

    res.g = h;
    res.sweeps = sweeps;
    res.final_change = change;
    res.monotone_violation = std::max(0.0, -min_delta);
    res.dplus = ArrayXd(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) res.dplus[i] = (h[i + 1] - h[i]) / dx;
    res.dplus[n - 1] = res.dplus[n - 2];
    res.stop_mask.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        res.stop_mask[static_cast<std::size_t>(i)] = std::abs(h[i] - f2v[i]) <= 10.0 * opt.tol;
    if (pair.both_convex()) res.convex = convex_params(pair);
    return res;
}

std::pair<double, double> choose_domain(const GamePayoffPair& pair, double s0, int n_points) {
    if (!(s0 > 0.0)) throw std::invalid_argument("choose_domain: s0 must be positive");
    double lo = 1e-4 * s0, hi = 8.0 * s0;
    double step = (hi - lo) / (n_points - 1);
    double anchor = 0.0, dist = kInf;
    for (const PayoffFn* f : {&pair.f2, &pair.f1}) {
        for (double k : f->kinks()) {
            if (k <= lo || k >= hi) continue;
            double d = std::abs(k - s0);
            if (d < dist) {
                dist = d;
                anchor = k;
            }
        }
    }
    if (anchor > 0.0) {
        long m = std::max(1L, std::lround((anchor - lo) / step));
        step = (anchor - lo) / static_cast<double>(m);
        hi = lo + step * (n_points - 1);
    }
    return {lo, hi};
}

Interval stop_interval(const EnvelopeResult& env, double x) {
    const Eigen::Index n = env.xs.size();
    int j = env.index_at(x);
    if (env.stop_mask[static_cast<std::size_t>(j)]) return Interval{x, x, true};
    double lo = -kInf, hi = kInf;
    for (Eigen::Index i = j; i >= 0; --i) {
        if (env.stop_mask[static_cast<std::size_t>(i)] && env.xs[i] <= x) {
            lo = env.xs[i];
            break;
        }
    }
    for (Eigen::Index i = j; i < n; ++i) {
        if (env.stop_mask[static_cast<std::size_t>(i)] && env.xs[i] >= x) {
            hi = env.xs[i];
            break;
        }
    }
    return Interval{lo, hi, false};
}

} // namespace fim
