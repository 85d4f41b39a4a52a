#include "umbilic/index.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace umb {

WindingResult umbilic_index(const SurfaceSpec& spec, const UmbilicRecord& rec, const std::vector<UmbilicRecord>& all,
                            const IndexConfig& cfg) {
    if (rec.kind != UmbilicKind::Isolated)
        throw Error(ErrorCode::NotIsolated, "index is undefined on a non-isolated umbilic locus");
    double radius = cfg.radius > 0 ? cfg.radius : 1e3 * std::sqrt(cfg.tol_find);
    for (const auto& other : all) {
        if ((other.ambient - rec.ambient).norm() == 0.0) continue;
        if (auto cp = ambient_to_chart(spec, rec.chart, other.ambient)) {
            const double d = std::hypot(cp->u - rec.uv.x(), cp->v - rec.uv.y());
            radius = std::min(radius, 0.5 * d);
        }
    }
    return line_field_winding(spec, rec.chart, rec.uv, radius, cfg.samples);
}

void compute_indices(const SurfaceSpec& spec, std::vector<UmbilicRecord>& records, const IndexConfig& cfg) {
    for (auto& rec : records) {
        if (rec.kind != UmbilicKind::Isolated) continue;
        const WindingResult w = umbilic_index(spec, rec, records, cfg);
        rec.twice_index = w.twice_index;
        rec.index_radius = w.radius;
        rec.index_samples = w.samples;
    }
}

PoincareHopfReport poincare_hopf_check(const std::vector<UmbilicRecord>& records) {
    PoincareHopfReport rep;
    for (const auto& rec : records) {
        if (rec.kind != UmbilicKind::Isolated || !rec.twice_index)
            throw Error(ErrorCode::MissingIndex, "record at " + rec.chart.name() + " has no computed index");
        rep.twice_sum += *rec.twice_index;
    }
    rep.pass = rep.twice_sum == 4;
    return rep;
}

IndexMultiset index_multiset(const std::vector<UmbilicRecord>& records) {
    IndexMultiset ms;
    for (const auto& rec : records)
        if (rec.twice_index) ++ms[*rec.twice_index];
    return ms;
}

std::string format_half_integer(int twice) {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
}

std::string format_multiset(const IndexMultiset& ms) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [twice, count] : ms) {
        if (!first) os << ", ";
        first = false;
        os << format_half_integer(twice) << " x" << count;
    }
    os << '}';
    return os.str();
}

std::string sweep_group(const SurfaceSpec& spec) {
    switch (spec.family()) {
    case Family::SuperQuadric:
        return "superquadric";
    case Family::Ellipsoid:
        return "ellipsoid";
    case Family::PerturbedEllipsoid: {
        const auto& p = spec.perturbed_ellipsoid();
        if (p.a == p.b) return "perturbed_ellipsoid/a_equals_b";
        const ThresholdReport t = critical_epsilon(p.a, p.b);
        return "perturbed_ellipsoid/" + to_string(t.regime) + (p.epsilon > t.epsilon_critical ? "/above" : "/below");
    }
    }
    return "unknown";
}

SweepReport conjecture_sweep(const std::vector<SurfaceSpec>& specs, const FinderConfig& finder,
                             const IndexConfig& index, const std::function<std::string(const SurfaceSpec&)>& group) {
    SweepReport rep;
    std::map<std::string, IndexMultiset> first_seen;
    for (const auto& spec : specs) {
        SweepRow row{spec, group(spec), 0, std::nullopt, {}};
        try {
            auto recs = find_umbilics(spec, finder);
            row.count = recs.size();
            compute_indices(spec, recs, index);
            row.multiset = index_multiset(recs);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        auto [it, inserted] = rep.constant_by_group.try_emplace(row.group, true);
        if (!row.multiset) {
            it->second = false;
        } else if (auto seen = first_seen.find(row.group); seen == first_seen.end()) {
            first_seen.emplace(row.group, *row.multiset);
        } else if (seen->second != *row.multiset) {
            it->second = false;
        }
        rep.rows.push_back(std::move(row));
    }
    for (const auto& [g, ok] : rep.constant_by_group) rep.constant = rep.constant && ok;
    return rep;
}

std::vector<SurfaceSpec> superquadric_sweep_grid() {
    std::vector<SurfaceSpec> out;
    for (int k : {2, 3, 4})
        for (double a : {1.0, 10.0, 100.0})
            for (double b : {1.0, 10.0, 100.0})
                for (double c : {1.0, 10.0, 100.0}) out.push_back(SurfaceSpec::super_quadric(a, b, c, k));
    return out;
}

std::vector<SurfaceSpec> perturbed_sweep_grid(Regime regime) {
    const std::vector<std::pair<double, double>> ab =
        regime == Regime::AGreaterB
            ? std::vector<std::pair<double, double>>{{0.516, 0.3}, {0.5, 0.2}, {1.0, 0.5}, {2.0, 1.5}}
            : std::vector<std::pair<double, double>>{{0.3, 0.516}, {0.2, 0.5}, {0.5, 1.0}, {1.5, 2.0}};
    std::vector<SurfaceSpec> out;
    for (const auto& [a, b] : ab) {
        const double ec = critical_epsilon(a, b).epsilon_critical;
        for (double f : {1.5, 3.0, 10.0}) out.push_back(SurfaceSpec::perturbed_ellipsoid(a, b, f * ec));
    }
    return out;
}

}  // namespace umb
