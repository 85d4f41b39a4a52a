#include "umbilic/umbilic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>


#include <Eigen/Dense>

#include "umbilic/line_field.hpp"

namespace umb {

namespace {

struct Weingarten {
    double gf_fg, ef_ef, ge_eg;
};

Weingarten weingarten_terms(const FundamentalForms& ff) {
    return {ff.G * ff.f - ff.F * ff.g, ff.E * ff.f - ff.e * ff.F, ff.G * ff.e - ff.E * ff.g};
}

double weingarten_norm(const FundamentalForms& ff) {
    const Weingarten w = weingarten_terms(ff);
    return std::sqrt(w.gf_fg * w.gf_fg + w.ef_ef * w.ef_ef + w.ge_eg * w.ge_eg);
}

}  // namespace

double umbilic_residual(const FundamentalForms& ff) {
    return weingarten_norm(ff) / (ff.metric_det() * (1.0 + std::abs(ff.e) + std::abs(ff.f) + std::abs(ff.g)));
}

double umbilic_residual(const SurfaceSpec& spec, const ChartPoint& cp) {
    return umbilic_residual(forms_closed(spec, cp));
}

double relative_umbilic_residual(const FundamentalForms& ff) {
    const double num = weingarten_norm(ff);
    if (num == 0.0) return 0.0;
    return num / (ff.metric_det() * (std::abs(ff.e) + std::abs(ff.f) + std::abs(ff.g)));
}

std::string to_string(UmbilicKind kind) { return kind == UmbilicKind::Isolated ? "isolated" : "non_isolated"; }
std::string to_string(Regime regime) { return regime == Regime::AGreaterB ? "a_greater_b" : "a_less_b"; }

// ---------------------------------------------------------------------------
// Thresholds and closed forms

ThresholdReport critical_epsilon(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidSpec, "threshold needs a, b > 0");
    if (a == b) throw Error(ErrorCode::NotApplicable, "a == b: neither threshold case applies");
    ThresholdReport rep;
    if (a > b) {
        rep.regime = Regime::AGreaterB;
        rep.epsilon_critical = a * a / 6.0 * (a / b - 1.0);
        rep.predicted_count_above = 10;
    } else {
        rep.regime = Regime::ALessB;
        rep.epsilon_critical = (5.0 * a + b) * (b - a) / 18.0;
        rep.predicted_count_above = 18;
    }
    rep.predicted_count_below = 2;
    return rep;
}

std::optional<int> theorem_count(const SurfaceSpec& spec) {
    switch (spec.family()) {
    case Family::SuperQuadric:
        return 14;
    case Family::PerturbedEllipsoid: {
        const auto& p = spec.perturbed_ellipsoid();
        if (p.a == p.b) return std::nullopt;
        const ThresholdReport t = critical_epsilon(p.a, p.b);
        if (std::abs(p.epsilon - t.epsilon_critical) < 1e-6 * t.epsilon_critical) return std::nullopt;
        return p.epsilon > t.epsilon_critical ? t.predicted_count_above : t.predicted_count_below;
    }
    case Family::Ellipsoid: {
        const auto& p = spec.ellipsoid();
        const int distinct = 1 + (p.b != p.a) + (p.c != p.a && p.c != p.b);
        if (distinct == 3) return 4;
        if (distinct == 2) return 2;
        return std::nullopt;
    }
    }
    return std::nullopt;
}

std::vector<double> equator_roots(double a, double b, double epsilon) {
    auto q_of = [&](double u) {
        const double r = 1.0 - a * u * u - epsilon * u * u * u * u;
        return 2.0 * r / (a + std::sqrt(a * a + 4.0 * epsilon * r));
    };
    auto eq = [&](double u) {
        const double q = q_of(u);
        const double s = a + 2.0 * epsilon * u * u;
        const double t = 2.0 * epsilon * q + a;
        return u * u * s * s * (6.0 * epsilon * q + a - b) + t * t * q * (a - b + 6.0 * epsilon * u * u);
    };
    const double r0 = 2.0 / (a + std::sqrt(a * a + 4.0 * epsilon));
    const double u_max = std::sqrt(r0);  // 1 - a u^2 - eps u^4 = 0

    std::vector<double> roots;
    constexpr int kIntervals = 4000;
    double x0 = u_max * 1e-9, f0 = eq(x0);
    for (int i = 1; i <= kIntervals; ++i) {
        const double x1 = u_max * (i == kIntervals ? 1.0 - 1e-12 : double(i) / kIntervals);
        const double f1 = eq(x1);
        if (f0 == 0.0) roots.push_back(x0);
        else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
            double lo = x0, hi = x1, flo = f0;
            for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = eq(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

namespace {

void push_sign_orbit(std::vector<Vec3>& out, const Vec3& p) {
    for (int sx : {1, -1})
        for (int sy : {1, -1})
            for (int sz : {1, -1}) {
                const Vec3 q(sx * p.x(), sy * p.y(), sz * p.z());
                const bool dup = std::any_of(out.begin(), out.end(), [&](const Vec3& r) { return (r - q).norm() < 1e-14; });
                if (!dup) out.push_back(q);
            }
}

}  // namespace

std::vector<Vec3> closed_form_umbilics(const SurfaceSpec& spec) {
    std::vector<Vec3> pts;
    switch (spec.family()) {
    case Family::SuperQuadric: {
        const auto& p = spec.super_quadric();
        const double k = p.k;
        const std::array<double, 3> c{p.a, p.b, p.c};
        for (int i = 0; i < 3; ++i) {
            Vec3 q = Vec3::Zero();
            q[i] = std::pow(c[i], -1.0 / (2.0 * k));
            push_sign_orbit(pts, q);
        }
        // a x^{2k-2} = b y^{2k-2} = c z^{2k-2} on the surface.
        std::array<double, 3> pair;
        for (int i = 0; i < 3; ++i) pair[i] = std::pow(c[(i + 1) % 3] * c[(i + 2) % 3], 1.0 / (k - 1.0));
        const double sum = pair[0] + pair[1] + pair[2];
        Vec3 q;
        for (int i = 0; i < 3; ++i) q[i] = std::pow(pair[i] / (c[i] * sum), 1.0 / (2.0 * k));
        push_sign_orbit(pts, q);
        return pts;
    }
    case Family::PerturbedEllipsoid: {
        const auto& p = spec.perturbed_ellipsoid();
        const double a = p.a, b = p.b, eps = p.epsilon;
        if (a == b)
            throw Error(ErrorCode::NotApplicable, "no threshold is defined when a == b");
        push_sign_orbit(pts, Vec3(0, 0, 1.0 / std::sqrt(b)));
        const ThresholdReport t = critical_epsilon(a, b);
        if (eps > t.epsilon_critical) {
            if (t.regime == Regime::AGreaterB) {
                const double v2 = (-a + std::sqrt(3.0 * b * (a * a + 4.0 * eps) / (2.0 * a + b))) / (2.0 * eps);
                const double z2 = (a - b) * (a * a + 4.0 * eps) / (2.0 * b * eps * (2.0 * a + b));
                push_sign_orbit(pts, Vec3(0, std::sqrt(v2), std::sqrt(z2)));
                push_sign_orbit(pts, Vec3(std::sqrt(v2), 0, std::sqrt(z2)));
            } else {
                const double s = std::sqrt((b - a) / (6.0 * eps));
                const double z2 = (5.0 * a * a - 4.0 * a * b - b * b + 18.0 * eps) / (18.0 * b * eps);
                push_sign_orbit(pts, Vec3(s, s, std::sqrt(z2)));
            }
        }
        for (double u : equator_roots(a, b, eps)) {
            const double r = 1.0 - a * u * u - eps * u * u * u * u;
            const double q = 2.0 * r / (a + std::sqrt(a * a + 4.0 * eps * r));
            push_sign_orbit(pts, Vec3(u, std::sqrt(q), 0));
            push_sign_orbit(pts, Vec3(std::sqrt(q), u, 0));
        }
        return pts;
    }
    case Family::Ellipsoid: {
        const auto& p = spec.ellipsoid();
        const std::array<double, 3> c{p.a, p.b, p.c};
        if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2])
            throw Error(ErrorCode::NotApplicable, "ellipsoid with repeated coefficients");
        std::array<int, 3> order{0, 1, 2};  // longest semi-axis (smallest coefficient) first
        std::sort(order.begin(), order.end(), [&](int i, int j) { return c[i] < c[j]; });
        const double L2 = 1.0 / c[order[0]], M2 = 1.0 / c[order[1]], S2 = 1.0 / c[order[2]];
        Vec3 q = Vec3::Zero();
        q[order[0]] = std::sqrt(L2 * (L2 - M2) / (L2 - S2));
        q[order[2]] = std::sqrt(S2 * (M2 - S2) / (L2 - S2));
        push_sign_orbit(pts, q);
        return pts;
    }
    }
    return pts;
}

double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
        double worst = 0.0;
        for (const auto& p : x) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : y) best = std::min(best, (p - q).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

// ---------------------------------------------------------------------------
// Numeric search

ChartPoint deepest_chart_point(const SurfaceSpec& spec, const Vec3& p) {
    std::optional<ChartPoint> best;
    double best_r = -1.0;
    for (const auto& chart : chart_atlas(spec)) {
        const auto cp = ambient_to_chart(spec, chart, p);
        if (!cp) continue;
        const double r = radicand(spec, chart, cp->u, cp->v);
        if (r > best_r + 1e-12) {
            best_r = r;
            best = cp;
        }
    }
    if (!best) throw Error(ErrorCode::InvalidChartPoint, "point not covered by any chart");
    return *best;
}

namespace {

struct Candidate {
    ChartPoint cp;
    double residual;
    UmbilicKind kind;
};

// Two-equation Newton system (Gf - Fg, Ge - Eg), scaled like the relative
// residual so that flat degenerate umbilics do not pull iterates into their valleys.
Vec2 newton_system(const SurfaceSpec& spec, const ChartPoint& cp) {
    const FundamentalForms ff = forms_closed(spec, cp);
    const Weingarten w = weingarten_terms(ff);
    const double s = ff.metric_det() * (std::abs(ff.e) + std::abs(ff.f) + std::abs(ff.g));
    if (s == 0.0) return Vec2::Zero();
    return Vec2(w.gf_fg / s, w.ge_eg / s);
}

bool valid_point(const SurfaceSpec& spec, const ChartPoint& cp) { return is_valid(spec, cp, kDeltaValid); }

// Full Newton step at x (finite-difference Jacobian); nullopt near the rim.
std::optional<Vec2> newton_step(const SurfaceSpec& spec, const ChartPoint& x, const Vec2& fx) {
    const double h = 1e-7 * (1.0 + std::abs(x.u) + std::abs(x.v));
    Eigen::Matrix2d J;
    for (int c = 0; c < 2; ++c) {
        ChartPoint xp = x, xm = x;
        (c == 0 ? xp.u : xp.v) += h;
        (c == 0 ? xm.u : xm.v) -= h;
        if (!valid_point(spec, xp) || !valid_point(spec, xm)) return std::nullopt;
        J.col(c) = (newton_system(spec, xp) - newton_system(spec, xm)) / (2 * h);
    }
    const Vec2 step = -J.completeOrthogonalDecomposition().solve(fx);
    if (!step.allFinite()) return std::nullopt;
    return step;
}

ChartPoint damped_newton(const SurfaceSpec& spec, ChartPoint x, int max_iter) {
    Vec2 fx = newton_system(spec, x);
    for (int it = 0; it < max_iter && fx.norm() > 0.0; ++it) {
        const auto step = newton_step(spec, x, fx);
        if (!step) break;
        bool accepted = false;
        for (double lambda = 1.0; lambda > 1e-6; lambda *= 0.5) {
            ChartPoint trial{x.chart, x.u + lambda * step->x(), x.v + lambda * step->y()};
            if (!valid_point(spec, trial)) continue;
            const Vec2 ft = newton_system(spec, trial);
            if (ft.norm() < fx.norm()) {
                x = trial;
                fx = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        if (step->norm() < 1e-15 * (1.0 + std::abs(x.u) + std::abs(x.v))) break;
    }
    return x;
}

// Near a degenerate umbilic the residual is already tiny along whole valleys
// while Newton still crawls; only a settled iterate counts as a root.
bool newton_settled(const SurfaceSpec& spec, const ChartPoint& x) {
    const Vec2 fx = newton_system(spec, x);
    if (fx.norm() == 0.0) return true;
    const auto step = newton_step(spec, x, fx);
    return step && step->norm() < 1e-9 * (1.0 + std::abs(x.u) + std::abs(x.v));
}

// Newton on Ge - Eg along a mirror line of the chart (u = 0 when `along_v`,
// else v = 0); F = f = 0 there, so that single equation is the umbilic condition.
std::optional<ChartPoint> refine_on_mirror(const SurfaceSpec& spec, ChartPoint x, bool along_v) {
    if (along_v) x.u = 0.0;
    else x.v = 0.0;
    auto coord = [&](ChartPoint& p) -> double& { return along_v ? p.v : p.u; };
    auto value = [&](const ChartPoint& p) { return newton_system(spec, p).y(); };
    if (!valid_point(spec, x)) return std::nullopt;
    double fx = value(x);
    for (int it = 0; it < 60 && fx != 0.0; ++it) {
        const double h = 1e-7 * (1.0 + std::abs(coord(x)));
        ChartPoint xp = x, xm = x;
        coord(xp) += h;
        coord(xm) -= h;
        if (!valid_point(spec, xp) || !valid_point(spec, xm)) return std::nullopt;
        const double d = (value(xp) - value(xm)) / (2 * h);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double step = -fx / d;
        bool accepted = false;
        for (double lambda = 1.0; lambda > 1e-6; lambda *= 0.5) {
            ChartPoint t = x;
            coord(t) += lambda * step;
            if (!valid_point(spec, t)) continue;
            const double ft = value(t);
            if (std::abs(ft) < std::abs(fx)) {
                x = t;
                fx = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted || std::abs(step) < 1e-16 * (1.0 + std::abs(coord(x)))) break;
    }
    return x;
}

// Snap to the chart origin or a mirror-line root when the straight path to it
// stays inside the (curvature-relative) sub-tolerance valley around x.
std::optional<ChartPoint> symmetry_polish(const SurfaceSpec& spec, const ChartPoint& x, double tol) {
    std::vector<ChartPoint> options;
    options.push_back({x.chart, 0.0, 0.0});
    if (auto p = refine_on_mirror(spec, x, true)) options.push_back(*p);
    if (auto p = refine_on_mirror(spec, x, false)) options.push_back(*p);
    for (const auto& o : options) {
        if (!valid_point(spec, o) || !(umbilic_residual(spec, o) < tol)) continue;
        bool connected = true;
        constexpr int kPath = 64;
        for (int i = 1; i < kPath && connected; ++i) {
            const double t = double(i) / kPath;
            const ChartPoint q{x.chart, x.u + t * (o.u - x.u), x.v + t * (o.v - x.v)};
            connected = valid_point(spec, q) && relative_umbilic_residual(forms_closed(spec, q)) < tol;
        }
        if (connected) return o;
    }
    return std::nullopt;
}

bool probe_non_isolated(const SurfaceSpec& spec, const ChartPoint& x, double tol) {
    const double r = 100.0 * std::sqrt(tol);
    int flat = 0;
    for (int i = 0; i < 8; ++i) {
        const double t = 2.0 * M_PI * i / 8.0;
        const ChartPoint p{x.chart, x.u + r * std::cos(t), x.v + r * std::sin(t)};
        if (!valid_point(spec, p)) continue;
        if (relative_umbilic_residual(forms_closed(spec, p)) < tol) ++flat;
    }
    return flat >= 6;
}

void scan_chart(const SurfaceSpec& spec, const ChartId& chart, const FinderConfig& cfg,
                std::vector<Candidate>& out, FinderLog& log) {
    const int n = cfg.grid_n;
    const auto ext = chart_extent(spec, chart);
    auto node = [&](int i, int j) {
        return ChartPoint{chart, -ext[0] + (i + 0.5) * 2.0 * ext[0] / n, -ext[1] + (j + 0.5) * 2.0 * ext[1] / n};
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> res(n * n, nan), rel(n * n, nan);
    std::vector<char> flat(n * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const ChartPoint cp = node(i, j);
            if (!is_valid(spec, cp, kDeltaCover)) continue;
            const FundamentalForms ff = forms_closed(spec, cp);
            res[i * n + j] = umbilic_residual(ff);
            rel[i * n + j] = relative_umbilic_residual(ff);
            flat[i * n + j] = rel[i * n + j] < cfg.tol_find;
        }

    // Connected flat regions become one NonIsolated record each.
    std::vector<int> comp(n * n, -1);
    std::vector<char> in_region(n * n, 0);
    int n_comp = 0;
    for (int s = 0; s < n * n; ++s) {
        if (!flat[s] || comp[s] >= 0) continue;
        std::vector<int> stack{s}, members;
        comp[s] = n_comp;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            members.push_back(c);
            const int ci = c / n, cj = c % n;
            const int nb[4][2] = {{ci - 1, cj}, {ci + 1, cj}, {ci, cj - 1}, {ci, cj + 1}};
            for (const auto& q : nb) {
                if (q[0] < 0 || q[0] >= n || q[1] < 0 || q[1] >= n) continue;
                const int id = q[0] * n + q[1];
                if (flat[id] && comp[id] < 0) {
                    comp[id] = n_comp;
                    stack.push_back(id);
                }
            }
        }
        if (members.size() >= 2) {
            double ci = 0, cj = 0;
            for (int m : members) {
                ci += m / n;
                cj += m % n;
            }
            ci /= members.size();
            cj /= members.size();
            int best = members.front();
            double best_d = std::numeric_limits<double>::infinity();
            for (int m : members) {
                const double d = std::hypot(m / n - ci, m % n - cj);
                if (d < best_d) {
                    best_d = d;
                    best = m;
                }
            }
            // Degenerate isolated umbilics can also leave a few flat cells; the probe decides.
            if (probe_non_isolated(spec, node(best / n, best % n), cfg.tol_find)) {
                out.push_back({node(best / n, best % n), res[best], UmbilicKind::NonIsolated});
                for (int m : members) in_region[m] = 1;
            }
        }
        ++n_comp;
    }

    // Local minima of the absolute residual, plus minima of the relative one
    // along each grid row or column: near a flat degenerate umbilic the valleys
    // leading into it are too shallow to hold 2-D minima of either field.
    std::vector<ChartPoint> seeds;
    auto value = [&](const std::vector<double>& field, int a, int b) {
        if (a < 0 || a >= n || b < 0 || b >= n) return std::numeric_limits<double>::infinity();
        const double x = field[a * n + b];
        return std::isnan(x) ? std::numeric_limits<double>::infinity() : x;
    };
    auto is_local_min = [&](int i, int j) {
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                if ((di != 0 || dj != 0) && value(res, i + di, j + dj) < res[i * n + j]) return false;
        return true;
    };
    auto is_line_min = [&](int i, int j) {
        const double r = rel[i * n + j];
        return (value(rel, i - 1, j) >= r && value(rel, i + 1, j) >= r) ||
               (value(rel, i, j - 1) >= r && value(rel, i, j + 1) >= r);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (std::isnan(res[i * n + j]) || in_region[i * n + j]) continue;
            if (is_local_min(i, j) || is_line_min(i, j)) seeds.push_back(node(i, j));
        }
    {
        // The chart origin sits on two mirror planes; seed it unless it lies in a flat region.
        const int i0 = std::clamp(static_cast<int>(std::floor(0.5 * n)), 0, n - 1);
        const ChartPoint origin{chart, 0.0, 0.0};
        bool in_flat = false;
        for (int i = std::max(i0 - 1, 0); i <= std::min(i0, n - 1); ++i)
            for (int j = std::max(i0 - 1, 0); j <= std::min(i0, n - 1); ++j) in_flat |= in_region[i * n + j] != 0;
        if (is_valid(spec, origin, kDeltaCover) && !in_flat) seeds.push_back(origin);
    }

    for (const auto& seed : seeds) {
        ++log.seeds;
        ChartPoint x = damped_newton(spec, seed, cfg.max_newton);
        bool settled = false;
        if (auto snapped = symmetry_polish(spec, x, cfg.tol_find)) {
            x = *snapped;
            settled = true;
        }
        if (!is_valid(spec, x, kDeltaCover)) continue;  // another chart covers the rim
        const double r = umbilic_residual(spec, x);
        if (r < cfg.tol_find && !settled && !newton_settled(spec, x)) {
            ++log.spurious;
            continue;
        }
        if (!(r < cfg.tol_find)) {
            if (log.messages.size() < 64)
                log.messages.push_back("NonConvergence: seed in " + chart.name() + " stalled at residual " +
                                       std::to_string(r));
            continue;
        }
        ++log.converged;
        const UmbilicKind kind =
            probe_non_isolated(spec, x, cfg.tol_find) ? UmbilicKind::NonIsolated : UmbilicKind::Isolated;
        out.push_back({x, r, kind});
    }
}

UmbilicRecord make_record(const SurfaceSpec& spec, const Candidate& c) {
    UmbilicRecord rec;
    rec.chart = c.cp.chart;
    rec.uv = Vec2(c.cp.u, c.cp.v);
    rec.residual = c.residual;
    rec.kind = c.kind;
    rec.ambient = chart_to_ambient(spec, c.cp);
    return rec;
}

}  // namespace

std::vector<UmbilicRecord> find_umbilics(const SurfaceSpec& spec, const FinderConfig& cfg, FinderLog* log_out) {
    if (cfg.grid_n < 2 || !(cfg.tol_find > 0) || !(cfg.r_dedup_rel > 0) || cfg.max_newton < 1)
        throw Error(ErrorCode::InvalidSpec, "finder configuration values must be positive");
    FinderLog log;
    std::vector<Candidate> cands;
    for (const auto& chart : chart_atlas(spec)) scan_chart(spec, chart, cfg, cands, log);

    const double r_dedup = cfg.r_dedup_rel * spec.diameter_estimate();
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        if (x.kind != y.kind) return x.kind == UmbilicKind::NonIsolated;
        return x.residual < y.residual;
    });
    std::vector<UmbilicRecord> recs;
    for (const auto& c : cands) recs.push_back(make_record(spec, c));

    // Flat patches whose connecting surface midpoint is also flat belong to one
    // non-isolated locus.
    std::vector<std::size_t> parent(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) parent[i] = i;
    auto root = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    auto flat_between = [&](const Vec3& p, const Vec3& q) {
        const Vec3 mid = 0.5 * (p + q);
        if (mid.norm() < 1e-9 * spec.diameter_estimate()) return false;
        const ChartPoint cp = deepest_chart_point(spec, surface_point_along(spec, mid));
        return relative_umbilic_residual(forms_closed(spec, cp)) < cfg.tol_find;
    };
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].kind != UmbilicKind::NonIsolated) continue;
        for (std::size_t j = 0; j < i; ++j) {
            if (recs[j].kind != UmbilicKind::NonIsolated || root(i) == root(j)) continue;
            if ((recs[i].ambient - recs[j].ambient).norm() < r_dedup ||
                flat_between(recs[i].ambient, recs[j].ambient))
                parent[root(i)] = root(j);
        }
    }

    std::vector<UmbilicRecord> kept;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& rec = recs[i];
        if (rec.kind == UmbilicKind::NonIsolated) {
            if (root(i) == i) kept.push_back(rec);
            continue;
        }
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const UmbilicRecord& k) {
            return (k.ambient - rec.ambient).norm() < r_dedup;
        });
        if (!dup) kept.push_back(rec);
    }

    // Move isolated records into their deepest chart.
    for (auto& rec : kept) {
        if (rec.kind != UmbilicKind::Isolated) continue;
        const ChartPoint cp = deepest_chart_point(spec, rec.ambient);
        const double r = umbilic_residual(spec, cp);
        if (r < cfg.tol_find) {
            rec.chart = cp.chart;
            rec.uv = Vec2(cp.u, cp.v);
            rec.residual = r;
            rec.ambient = chart_to_ambient(spec, cp);
        }
    }

    // A candidate around which the principal line field does not wind is a
    // near-flat valley point of some degenerate umbilic, not an umbilic.
    std::vector<UmbilicRecord> out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& rec = kept[i];
        if (rec.kind == UmbilicKind::Isolated) {
            const auto ext = chart_extent(spec, rec.chart);
            double radius = 1e-3 * std::max(ext[0], ext[1]);
            for (std::size_t j = 0; j < kept.size(); ++j) {
                if (j == i) continue;
                if (auto other = ambient_to_chart(spec, rec.chart, kept[j].ambient))
                    radius = std::min(radius, 0.25 * std::hypot(other->u - rec.uv.x(), other->v - rec.uv.y()));
            }
            try {
                const WindingResult w = line_field_winding(spec, rec.chart, rec.uv, radius, 128);
                if (w.twice_index == 0) {
                    ++log.spurious;
                    continue;
                }
            } catch (const Error& e) {
                log.messages.push_back(std::string("winding check skipped: ") + e.what());
            }
        }
        out.push_back(rec);
    }

    auto key = [](const UmbilicRecord& r) {
        return std::array<long long, 3>{std::llround(r.ambient.x() * 1e9), std::llround(r.ambient.y() * 1e9),
                                        std::llround(r.ambient.z() * 1e9)};
    };
    std::sort(out.begin(), out.end(), [&](const UmbilicRecord& x, const UmbilicRecord& y) { return key(x) < key(y); });
    if (log_out) *log_out = std::move(log);
    return out;
}

}  // namespace umb
