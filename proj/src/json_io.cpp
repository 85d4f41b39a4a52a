#include "umbilic/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace umb {

namespace {

double number_field(const Json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::InvalidSpec, std::string("missing field \"") + key + "\"");
    const Json& v = j.at(key);
    if (!v.is_number()) throw Error(ErrorCode::InvalidSpec, std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

void check_fields(const Json& j, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw Error(ErrorCode::InvalidSpec, "unexpected field \"" + key + "\"");
}

void emit(const Json& j, int depth, std::string& out) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close_pad(2 * depth, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(key).dump() + ": ";
                emit(value, depth + 1, out);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                emit(j[i], depth + 1, out);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

SurfaceSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "surface spec must be a JSON object");
    if (!j.contains("family") || !j.at("family").is_string())
        throw Error(ErrorCode::InvalidSpec, "missing string field \"family\"");
    const std::string family = j.at("family").get<std::string>();
    if (family == "superquadric") {
        check_fields(j, {"family", "a", "b", "c", "k"});
        const double k = number_field(j, "k");
        if (!j.at("k").is_number_integer()) throw Error(ErrorCode::InvalidSpec, "field \"k\" must be an integer");
        return SurfaceSpec::super_quadric(number_field(j, "a"), number_field(j, "b"), number_field(j, "c"),
                                          static_cast<int>(k));
    }
    if (family == "perturbed_ellipsoid") {
        check_fields(j, {"family", "a", "b", "epsilon"});
        return SurfaceSpec::perturbed_ellipsoid(number_field(j, "a"), number_field(j, "b"),
                                                number_field(j, "epsilon"));
    }
    if (family == "ellipsoid") {
        check_fields(j, {"family", "a", "b", "c"});
        return SurfaceSpec::ellipsoid(number_field(j, "a"), number_field(j, "b"), number_field(j, "c"));
    }
    throw Error(ErrorCode::InvalidSpec, "unknown family \"" + family + "\"");
}

Json spec_to_json(const SurfaceSpec& spec) {
    switch (spec.family()) {
        case Family::SuperQuadric: {
            const auto& p = spec.super_quadric();
            return {{"family", "superquadric"}, {"a", p.a}, {"b", p.b}, {"c", p.c}, {"k", p.k}};
        }
        case Family::PerturbedEllipsoid: {
            const auto& p = spec.perturbed_ellipsoid();
            return {{"family", "perturbed_ellipsoid"}, {"a", p.a}, {"b", p.b}, {"epsilon", p.epsilon}};
        }
        case Family::Ellipsoid: {
            const auto& p = spec.ellipsoid();
            return {{"family", "ellipsoid"}, {"a", p.a}, {"b", p.b}, {"c", p.c}};
        }
    }
    return {};
}

SurfaceSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidSpec, "cannot open spec file " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidSpec, path + ": " + e.what());
    }
    return spec_from_json(j);
}

std::string dump_json(const Json& j) {
    std::string out;
    emit(j, 0, out);
    out += "\n";
    return out;
}

Json forms_to_json(const ChartPoint& cp, const FundamentalForms& ff, const CurvatureSummary& cs) {
    return {{"chart", cp.chart.name()},
            {"uv", {cp.u, cp.v}},
            {"E", ff.E},
            {"F", ff.F},
            {"G", ff.G},
            {"e", ff.e},
            {"f", ff.f},
            {"g", ff.g},
            {"K", cs.K},
            {"H", cs.H},
            {"k1", cs.k1},
            {"k2", cs.k2},
            {"dir1", {cs.dir1.x(), cs.dir1.y()}},
            {"dir2", {cs.dir2.x(), cs.dir2.y()}},
            {"degenerate", cs.degenerate}};
}

Json umbilic_to_json(const UmbilicRecord& rec) {
    Json j = {{"xyz", {rec.ambient.x(), rec.ambient.y(), rec.ambient.z()}},
              {"chart", rec.chart.name()},
              {"uv", {rec.uv.x(), rec.uv.y()}},
              {"residual", rec.residual},
              {"kind", rec.kind == UmbilicKind::Isolated ? "isolated" : "non_isolated"}};
    if (rec.index()) {
        j["index"] = *rec.index();
        j["index_radius"] = rec.index_radius;
        j["index_samples"] = rec.index_samples;
    } else {
        j["index"] = nullptr;
    }
    return j;
}

Json umbilics_to_json(const std::vector<UmbilicRecord>& records) {
    Json arr = Json::array();
    for (const auto& r : records) arr.push_back(umbilic_to_json(r));
    return arr;
}

}  // namespace umb
