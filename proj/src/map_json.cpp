#include "kere/map_json.hpp"

namespace kere {

using nlohmann::json;

namespace {

Complex complex_from(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing complex param '") + key + "'");
    const auto& v = j.at(key);
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2)
        return Complex(v[0].get<double>(), v[1].get<double>());
    throw ConfigError(std::string("complex param '") + key + "' must be a number or [re,im]");
}

double real_from(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing param '") + key + "'");
    return j.at(key).get<double>();
}

json complex_to(Complex z) { return json::array({z.real(), z.imag()}); }

std::vector<SurfaceMap> chain_from(const json& j) {
    if (!j.contains("chain") || !j.at("chain").is_array() || j.at("chain").empty())
        throw ConfigError("map kind requires a non-empty 'chain' array");
    std::vector<SurfaceMap> out;
    for (const auto& item : j.at("chain")) out.push_back(map_from_json(item));
    return out;
}

}  // namespace

SurfaceMap map_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("map definition must be an object with a 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const json params = j.contains("params") ? j.at("params") : json::object();

    if (kind == "identity") {
        if (!j.contains("surface")) throw ConfigError("identity map needs 'surface'");
        return SurfaceMap::identity(surface_from_string(j.at("surface").get<std::string>()));
    }
    if (kind == "mobius")
        return SurfaceMap::mobius(complex_from(params, "a"), complex_from(params, "b"),
                                  complex_from(params, "c"), complex_from(params, "d"));
    if (kind == "fractional_reflection")
        return SurfaceMap::fractional_reflection(
            complex_from(params, "a"), complex_from(params, "b"),
            complex_from(params, "c"), complex_from(params, "d"));
    if (kind == "rotation_profile") {
        if (!params.contains("knots")) throw ConfigError("rotation_profile needs 'knots'");
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : params.at("knots"))
            knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        return SurfaceMap::rotation_profile(std::move(knots));
    }
    if (kind == "radial_warp") return SurfaceMap::radial_warp(real_from(params, "amp"));
    if (kind == "translation")
        return SurfaceMap::torus_translation(real_from(params, "alpha"),
                                             real_from(params, "beta"));
    if (kind == "reversing_type1")
        return SurfaceMap::torus_reversing_type1(real_from(params, "alpha"));
    if (kind == "reversing_type2")
        return SurfaceMap::torus_reversing_type2(real_from(params, "alpha"));
    if (kind == "linear") {
        if (!params.contains("matrix")) throw ConfigError("linear map needs 'matrix'");
        const auto& m = params.at("matrix");
        Mat2i A;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) A.m[i][k] = m[i][k].get<int>();
        return SurfaceMap::torus_linear(A);
    }
    if (kind == "warp_s" || kind == "warp_t") {
        double amp = real_from(params, "amp");
        double phase = params.contains("phase") ? params.at("phase").get<double>() : 0.0;
        double freq = params.contains("freq") ? params.at("freq").get<double>() : 1.0;
        return kind == "warp_s" ? SurfaceMap::torus_warp_s(amp, phase, freq)
                                : SurfaceMap::torus_warp_t(amp, phase, freq);
    }
    if (kind == "klein_phi") return SurfaceMap::klein_phi(real_from(params, "alpha"));
    if (kind == "klein_psi") return SurfaceMap::klein_psi(real_from(params, "alpha"));
    if (kind == "klein_warp") return SurfaceMap::klein_warp(real_from(params, "amp"));
    if (kind == "klein_lift") {
        auto ch = chain_from(j);
        if (ch.size() != 1) throw ConfigError("klein_lift takes exactly one chain entry");
        return SurfaceMap::klein_lift(std::move(ch[0]));
    }
    if (kind == "annulus_rotation")
        return SurfaceMap::annulus_rotation(real_from(params, "alpha"));
    if (kind == "annulus_reversing")
        return SurfaceMap::annulus_reversing(real_from(params, "alpha"));
    if (kind == "annulus_warp") return SurfaceMap::annulus_warp(real_from(params, "amp"));
    if (kind == "mobius_strip_rotation")
        return SurfaceMap::mobius_strip_rotation(real_from(params, "alpha"));
    if (kind == "mobius_strip_lift") {
        auto ch = chain_from(j);
        if (ch.size() != 1) throw ConfigError("mobius_strip_lift takes exactly one chain entry");
        return SurfaceMap::mobius_strip_lift(std::move(ch[0]));
    }
    if (kind == "double") {
        auto ch = chain_from(j);
        if (ch.size() != 1) throw ConfigError("double takes exactly one chain entry");
        if (ch[0].surface() == Surface::Annulus)
            return SurfaceMap::double_to_torus(std::move(ch[0]));
        if (ch[0].surface() == Surface::MobiusStrip)
            return SurfaceMap::double_to_klein(std::move(ch[0]));
        throw ConfigError("double expects an annulus or Mobius strip map");
    }
    if (kind == "inverted") {
        auto ch = chain_from(j);
        if (ch.size() != 1) throw ConfigError("inverted takes exactly one chain entry");
        return ch[0].inverted();
    }
    if (kind == "composite") return SurfaceMap::compose(chain_from(j));
    throw ConfigError("unknown map kind '" + kind + "'");
}

json map_to_json(const SurfaceMap& f) {
    json j;
    j["surface"] = to_string(f.surface());
    j["kind"] = to_string(f.kind());
    const auto& p = f.params();
    json params = json::object();
    switch (f.kind()) {
        case MapKind::Identity:
            break;
        case MapKind::Mobius:
        case MapKind::FractionalReflection:
            params["a"] = complex_to(Complex(p[0], p[1]));
            params["b"] = complex_to(Complex(p[2], p[3]));
            params["c"] = complex_to(Complex(p[4], p[5]));
            params["d"] = complex_to(Complex(p[6], p[7]));
            break;
        case MapKind::RotationProfile: {
            json knots = json::array();
            for (std::size_t i = 0; i + 1 < p.size(); i += 2)
                knots.push_back(json::array({p[i], p[i + 1]}));
            params["knots"] = knots;
            break;
        }
        case MapKind::RadialWarp:
        case MapKind::AnnulusWarp:
            params["amp"] = p[0];
            break;
        case MapKind::TorusTranslation:
            params["alpha"] = p[0];
            params["beta"] = p[1];
            break;
        case MapKind::TorusReversingType1:
        case MapKind::TorusReversingType2:
        case MapKind::AnnulusRotation:
        case MapKind::AnnulusReversing:
            params["alpha"] = p[0];
            break;
        case MapKind::TorusLinear:
            params["matrix"] = json::array({json::array({int(p[0]), int(p[1])}),
                                            json::array({int(p[2]), int(p[3])})});
            break;
        case MapKind::TorusWarpS:
        case MapKind::TorusWarpT:
            params["amp"] = p[0];
            params["phase"] = p[1];
            params["freq"] = p[2];
            break;
        default:
            break;
    }
    if (!params.empty()) j["params"] = params;
    if (!f.chain().empty()) {
        json chain = json::array();
        for (const auto& g : f.chain()) chain.push_back(map_to_json(g));
        j["chain"] = chain;
    }
    return j;
}

SurfaceMap map_from_string(const std::string& text) {
    json j = json::parse(text);
    return map_from_json(j);
}

}  // namespace kere
