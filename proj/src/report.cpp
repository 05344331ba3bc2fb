#include "kere/report.hpp"

#include <cstdio>

namespace kere {

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

OrderedJson point_to_json(const SurfacePoint& p) {
    OrderedJson a = OrderedJson::array();
    a.push_back(fmt_real(p.c[0]));
    a.push_back(fmt_real(p.c[1]));
    if (p.surface == Surface::Sphere) a.push_back(fmt_real(p.c[2]));
    return a;
}

OrderedJson vec2_to_json(Vec2 v) {
    return OrderedJson::array({fmt_real(v[0]), fmt_real(v[1])});
}

OrderedJson mat2i_to_json(const Mat2i& m) {
    return OrderedJson::array({OrderedJson::array({m.m[0][0], m.m[0][1]}),
                               OrderedJson::array({m.m[1][0], m.m[1][1]})});
}

OrderedJson classification_to_json(const ClassificationResult& r) {
    OrderedJson j;
    j["class"] = to_string(r.cls);
    j["surface"] = to_string(r.surface);
    if (r.cls == MapClass::Periodic) j["period"] = r.period;
    j["alpha"] = fmt_real(r.alpha);
    j["rho"] = vec2_to_json(r.rho);
    if (r.evidence.singular_clusters >= 0) {
        j["singular_clusters"] = r.evidence.singular_clusters;
        j["singular_zones"] = r.evidence.singular_zones;
        j["flagged_fraction"] = fmt_real(r.evidence.flagged_fraction);
    }
    OrderedJson ev;
    ev["max_cluster_diameter"] = fmt_real(r.evidence.max_cluster_diameter);
    if (!r.evidence.singular_points.empty()) {
        OrderedJson pts = OrderedJson::array();
        for (const auto& p : r.evidence.singular_points) pts.push_back(point_to_json(p));
        ev["singular_points"] = pts;
    }
    if (r.evidence.homology) ev["homology"] = mat2i_to_json(*r.evidence.homology);
    if (r.evidence.rotation_data) ev["rotation_data"] = vec2_to_json(*r.evidence.rotation_data);
    if (r.evidence.fixed_point_count >= 0)
        ev["fixed_point_count"] = r.evidence.fixed_point_count;
    ev["fixed_curve"] = r.evidence.fixed_curve;
    if (r.evidence.omega_alpha_gap >= 0.0)
        ev["omega_alpha_gap"] = fmt_real(r.evidence.omega_alpha_gap);
    if (!r.evidence.notes.empty()) ev["notes"] = r.evidence.notes;
    j["evidence"] = ev;
    OrderedJson conf;
    conf["decision_margin"] = fmt_real(r.confidence.decision_margin);
    if (r.confidence.periodic_residual >= 0.0)
        conf["periodic_residual"] = fmt_real(r.confidence.periodic_residual);
    j["confidence"] = conf;
    return j;
}

OrderedJson singular_to_json(const SingularSetEstimate& est) {
    OrderedJson j;
    j["grid"] = est.grid_resolution;
    j["eps"] = fmt_real(est.eps);
    j["threshold"] = fmt_real(est.threshold);
    j["horizon"] = est.horizon;
    j["flagged"] = static_cast<long long>(est.flag_count());
    j["total"] = static_cast<long long>(est.flagged.size());
    j["fraction"] = fmt_real(est.flagged_fraction());
    return j;
}

namespace {

const char* model_name(ConjugacyMap::Model m) {
    switch (m) {
        case ConjugacyMap::Model::PolarRotation: return "polar_rotation";
        case ConjugacyMap::Model::TorusTranslation: return "torus_translation";
        case ConjugacyMap::Model::TorusReversingType1: return "torus_reversing_type1";
        case ConjugacyMap::Model::TorusReversingType2: return "torus_reversing_type2";
        case ConjugacyMap::Model::KleinPhi: return "klein_phi";
        case ConjugacyMap::Model::KleinPsi: return "klein_psi";
    }
    return "?";
}

}  // namespace

OrderedJson conjugacy_to_json(const ConjugacyMap& h, bool include_nodes) {
    OrderedJson j;
    j["model"] = model_name(h.model);
    j["model_param"] = vec2_to_json(h.model_param);
    j["rows"] = h.rows;
    j["cols"] = h.cols;
    j["surface"] = to_string(h.target_surface);
    j["residual"] = fmt_real(h.residual);
    if (include_nodes) {
        OrderedJson nodes = OrderedJson::array();
        for (int i = 0; i < h.rows; ++i) {
            for (int c = 0; c < h.cols; ++c) {
                Vec2 u = h.node_coords(i, c);
                OrderedJson row = OrderedJson::array();
                row.push_back(fmt_real(u[0]));
                row.push_back(fmt_real(u[1]));
                for (const auto& coord : point_to_json(h.at(i, c))) row.push_back(coord);
                nodes.push_back(row);
            }
        }
        j["nodes"] = nodes;
    }
    return j;
}

OrderedJson make_document(OrderedJson config, OrderedJson result, OrderedJson diagnostics) {
    OrderedJson doc;
    doc["tool_version"] = kToolVersion;
    doc["config"] = std::move(config);
    doc["result"] = std::move(result);
    doc["diagnostics"] = std::move(diagnostics);
    return doc;
}

namespace {

bool type_matches(const nlohmann::json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
}

bool validate_node(const nlohmann::json& schema, const nlohmann::json& doc, std::string path,
                   std::string* error) {
    auto fail = [&](const std::string& msg) {
        if (error) *error = path + ": " + msg;
        return false;
    };
    if (schema.contains("type")) {
        if (!type_matches(doc, schema.at("type").get<std::string>()))
            return fail("expected type " + schema.at("type").get<std::string>());
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& v : schema.at("enum"))
            if (v == doc) ok = true;
        if (!ok) return fail("value not in enum");
    }
    if (schema.contains("required")) {
        for (const auto& key : schema.at("required")) {
            if (!doc.contains(key.get<std::string>()))
                return fail("missing required key '" + key.get<std::string>() + "'");
        }
    }
    if (schema.contains("properties") && doc.is_object()) {
        for (const auto& [key, sub] : schema.at("properties").items()) {
            if (!doc.contains(key)) continue;
            if (!validate_node(sub, doc.at(key), path + "/" + key, error)) return false;
        }
    }
    if (schema.contains("items") && doc.is_array()) {
        const auto& sub = schema.at("items");
        for (std::size_t i = 0; i < doc.size(); ++i)
            if (!validate_node(sub, doc[i], path + "[" + std::to_string(i) + "]", error))
                return false;
    }
    return true;
}

}  // namespace

bool validate_schema(const nlohmann::json& schema, const nlohmann::json& doc,
                     std::string* error) {
    return validate_node(schema, doc, "$", error);
}

}  // namespace kere
