#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "kere/classify.hpp"
#include "kere/conjugacy.hpp"
#include "kere/map_json.hpp"
#include "kere/render.hpp"
#include "kere/report.hpp"

namespace fs = std::filesystem;
using namespace kere;

namespace {

struct Job {
    std::string command;
    std::string map_arg;
    int horizon = 500;
    int grid = 64;
    double eps = 0.1;
    double threshold = 0.05;
    bool threshold_set = false;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::vector<std::string> formats{"json"};
    std::string point_arg;
};

SurfaceMap load_map(const std::string& arg) {
    std::string text = arg;
    auto first = text.find_first_not_of(" \t\n");
    if (first == std::string::npos) throw ConfigError("empty --map argument");
    if (text[first] != '{') {
        std::ifstream in(arg);
        if (!in) throw ConfigError("cannot open map file '" + arg + "'");
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    try {
        return map_from_string(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("map JSON parse: ") + e.what());
    }
}

bool wants(const Job& job, const std::string& fmt) {
    return std::find(job.formats.begin(), job.formats.end(), fmt) != job.formats.end();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

OrderedJson config_json(const Job& job, const SurfaceMap* map) {
    OrderedJson cfg;
    cfg["command"] = job.command;
    if (map) cfg["map"] = OrderedJson(map_to_json(*map));
    OrderedJson budgets;
    budgets["horizon"] = job.horizon;
    budgets["grid"] = job.grid;
    budgets["eps"] = fmt_real(job.eps);
    budgets["threshold"] = fmt_real(job.threshold);
    budgets["seed"] = static_cast<long long>(job.seed);
    cfg["budgets"] = budgets;
    cfg["formats"] = job.formats;
    return cfg;
}

ClassifyBudget classify_budget(const Job& job) {
    ClassifyBudget b;
    b.grid = job.grid;
    b.horizon = job.horizon;
    b.eps = job.eps;
    if (job.threshold_set) b.threshold = job.threshold;
    b.seed = job.seed;
    return b;
}

void render_singular_svg(const fs::path& path, const SingularSetEstimate& est, Surface surf) {
    SvgCanvas svg(512, 512);
    double cell = 1.0 / est.grid_resolution;
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        Vec2 u = project_unit(est.grid[i]);
        if (est.flagged[i])
            svg.rect_unit(Vec2{u[0] - 0.5 * cell, u[1] - 0.5 * cell}, Vec2{cell, cell},
                          "#c0392b");
    }
    svg.text(8, 16, to_string(surf) + " singular estimate");
    write_text(path, svg.str());
}

int run_analyze(const Job& job) {
    SurfaceMap f = load_map(job.map_arg);
    SingularSetEstimate est = singular_set(f, job.grid, job.eps, job.horizon, job.threshold,
                                           6, job.seed);
    OrderedJson result;
    result["singular"] = singular_to_json(est);
    if (f.has_lift()) {
        try {
            Vec2 rho = rotation_vector(f, std::max(1000, job.horizon));
            result["rotation_vector"] = vec2_to_json(rho);
        } catch (const Error&) {
            result["rotation_vector"] = nullptr;
        }
        result["homology"] = mat2i_to_json(homology_matrix_of(f));
    }
    MapRecurrence rec = is_recurrent_map(f, 12, std::min(job.horizon, 512), job.eps);
    OrderedJson recj;
    recj["recurrent"] = rec.recurrent;
    if (rec.recurrent) recj["n"] = rec.n;
    recj["sup_distance"] = fmt_real(rec.sup_distance);
    result["recurrence"] = recj;

    fs::create_directories(job.out_dir);
    OrderedJson doc = make_document(config_json(job, &f), result, OrderedJson::object());
    if (wants(job, "json")) write_text(fs::path(job.out_dir) / "analyze.json", doc.dump(2) + "\n");
    if (wants(job, "svg"))
        render_singular_svg(fs::path(job.out_dir) / "singular.svg", est, f.surface());
    if (wants(job, "png")) {
        Raster img(512, 512);
        for (std::size_t i = 0; i < est.grid.size(); ++i)
            if (est.flagged[i]) img.set_unit(project_unit(est.grid[i]), 192, 57, 43);
        write_png_rgb((fs::path(job.out_dir) / "singular.png").string(), img.w, img.h, img.rgb);
    }
    std::cout << doc["result"]["singular"].dump() << "\n";
    return 0;
}

int run_classify(const Job& job) {
    SurfaceMap f = load_map(job.map_arg);
    ClassificationResult res = classify(f, classify_budget(job));
    OrderedJson doc = make_document(config_json(job, &f), classification_to_json(res),
                                    OrderedJson::object());
    fs::create_directories(job.out_dir);
    if (wants(job, "json"))
        write_text(fs::path(job.out_dir) / "classify.json", doc.dump(2) + "\n");
    std::cout << doc["result"].dump() << "\n";
    return 0;
}

int run_conjugate(const Job& job) {
    SurfaceMap f = load_map(job.map_arg);
    ClassificationResult res = classify(f, classify_budget(job));
    ConjugacyBudget cb;
    cb.grid_r = job.grid;
    cb.grid_t = job.grid;
    cb.seed = job.seed;

    OrderedJson result;
    result["class"] = to_string(res.cls);
    std::optional<ConjugacyMap> h;
    switch (res.cls) {
        case MapClass::Elliptic:
            h = elliptic_conjugacy(f, cb);
            break;
        case MapClass::TorusTranslation:
            h = torus_translation_conjugacy(f, cb);
            break;
        case MapClass::TorusReversingType1:
            h = reversing_normalization(f, 1);
            break;
        case MapClass::TorusReversingType2:
            h = reversing_normalization(f, 2);
            break;
        case MapClass::KleinPhi:
        case MapClass::KleinPsi: {
            KleinNormalization kn = klein_normalization(
                klein_oriented_lift(f), SurfaceMap::torus_reversing_type1(0.5));
            result["psi_form"] = kn.psi_form;
            result["theta_residual"] = fmt_real(kn.theta_residual);
            h = kn.B;
            break;
        }
        default:
            result["status"] = "undetermined";
            result["reason"] = "no conjugacy construction for class " + to_string(res.cls);
            break;
    }
    if (h) {
        result["status"] = "ok";
        result["conjugacy"] = conjugacy_to_json(*h, true);
    }

    fs::create_directories(job.out_dir);
    OrderedJson doc = make_document(config_json(job, &f), result, OrderedJson::object());
    if (wants(job, "json"))
        write_text(fs::path(job.out_dir) / "conjugate.json", doc.dump(2) + "\n");
    if (h && wants(job, "svg")) {
        SvgCanvas svg(512, 512);
        for (int i = 0; i < h->rows; ++i) {
            std::vector<Vec2> row;
            for (int j = 0; j < h->cols; ++j) row.push_back(project_unit(h->at(i, j)));
            row.push_back(project_unit(h->at(i, 0)));
            svg.polyline_unit(row, "#2c6fbb", 0.7);
        }
        write_text(fs::path(job.out_dir) / "conjugacy.svg", svg.str());
    }
    std::cout << (h ? "conjugacy residual " + fmt_real(h->residual)
                    : std::string("conjugacy unavailable"))
              << "\n";
    return 0;
}

int run_render(const Job& job) {
    SurfaceMap f = load_map(job.map_arg);
    SurfacePoint x = [&] {
        if (job.point_arg.empty()) {
            Rng rng(job.seed ^ 0x706f696eULL);
            return random_point(f.surface(), rng);
        }
        double a = 0, b = 0;
        if (std::sscanf(job.point_arg.c_str(), "%lf,%lf", &a, &b) != 2)
            throw ConfigError("--point expects 'a,b'");
        return make_point(f.surface(), a, b, std::sqrt(std::max(0.0, 1 - a * a - b * b)));
    }();

    OrbitSegment seg = orbit(f, x, 0, job.horizon);
    std::vector<Vec2> pts;
    for (const auto& p : seg.points) pts.push_back(project_unit(p));

    fs::create_directories(job.out_dir);
    std::vector<std::string> files;
    if (wants(job, "svg")) {
        SvgCanvas svg(512, 512);
        svg.polyline_unit(pts, "#2c6fbb", 1.0);
        for (const auto& p : pts) svg.dot_unit(p, 1.2, "#13324f");
        write_text(fs::path(job.out_dir) / "orbit.svg", svg.str());
        files.push_back("orbit.svg");
    }
    if (wants(job, "png")) {
        Raster img(512, 512);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (std::fabs(pts[i + 1][0] - pts[i][0]) > 0.5 ||
                std::fabs(pts[i + 1][1] - pts[i][1]) > 0.5)
                continue;
            img.line_unit(pts[i], pts[i + 1], 44, 111, 187);
        }
        write_png_rgb((fs::path(job.out_dir) / "orbit.png").string(), img.w, img.h, img.rgb);
        files.push_back("orbit.png");
    }
    OrderedJson result;
    result["orbit_points"] = static_cast<long long>(pts.size());
    result["files"] = files;
    OrderedJson doc = make_document(config_json(job, &f), result, OrderedJson::object());
    if (wants(job, "json")) write_text(fs::path(job.out_dir) / "render.json", doc.dump(2) + "\n");
    std::cout << "rendered " << pts.size() << " orbit points\n";
    return 0;
}

struct GalleryEntry {
    std::string name;
    SurfaceMap map;
    MapClass expected;
};

std::vector<GalleryEntry> gallery_entries() {
    std::vector<GalleryEntry> g;
    auto rot = [](double a) {
        return SurfaceMap::mobius(Complex(std::cos(2 * M_PI * a), std::sin(2 * M_PI * a)), 0, 0, 1);
    };
    g.push_back({"sphere_rotation", rot(0.361803398875), MapClass::Elliptic});
    g.push_back({"sphere_parabolic", SurfaceMap::mobius(1, 1, 0, 1), MapClass::Parabolic});
    g.push_back({"sphere_hyperbolic", SurfaceMap::mobius(2, 0, 0, 1), MapClass::Hyperbolic});
    g.push_back({"sphere_reflection", SurfaceMap::fractional_reflection(1, 0, 0, 1),
                 MapClass::Reflection});
    g.push_back({"sphere_semi_parabolic", SurfaceMap::fractional_reflection(1, 1, 0, 1),
                 MapClass::SemiParabolic});
    g.push_back({"sphere_semi_hyperbolic", SurfaceMap::fractional_reflection(2, 0, 0, 1),
                 MapClass::SemiHyperbolic});
    g.push_back({"sphere_semi_elliptic",
                 SurfaceMap::fractional_reflection(
                     0, Complex(std::cos(1.9), std::sin(1.9)), 1, 0),
                 MapClass::SemiElliptic});
    g.push_back({"sphere_rotation_profile",
                 SurfaceMap::rotation_profile({{0.0, 0.0}, {1.0, 1.0}}), MapClass::NotRegular});
    g.push_back({"torus_translation",
                 SurfaceMap::torus_translation(0.618033988750, 0.414213562373),
                 MapClass::TorusTranslation});
    g.push_back({"torus_reversing_type1", SurfaceMap::torus_reversing_type1(0.381966011250),
                 MapClass::TorusReversingType1});
    g.push_back({"torus_reversing_type2", SurfaceMap::torus_reversing_type2(0.271828182846),
                 MapClass::TorusReversingType2});
    g.push_back({"torus_quarter_turn", SurfaceMap::torus_linear(Mat2i{{{0, -1}, {1, 0}}}),
                 MapClass::Periodic});
    g.push_back({"klein_phi", SurfaceMap::klein_phi(0.318309886184), MapClass::KleinPhi});
    g.push_back({"klein_psi", SurfaceMap::klein_psi(0.381966011250), MapClass::KleinPsi});
    g.push_back({"annulus_rotation", SurfaceMap::annulus_rotation(0.414213562373),
                 MapClass::AnnulusRotation});
    g.push_back({"annulus_reversing", SurfaceMap::annulus_reversing(0.318309886184),
                 MapClass::AnnulusReversing});
    g.push_back({"mobius_strip_rotation", SurfaceMap::mobius_strip_rotation(0.236067977500),
                 MapClass::MobiusStrip});
    return g;
}

int run_gallery(const Job& job) {
    ClassifyBudget budget = classify_budget(job);
    auto entries = gallery_entries();
    OrderedJson rows = OrderedJson::array();
    std::string csv = "name,surface,expected,got,agree,alpha\n";
    int agree_count = 0;
    for (const auto& e : entries) {
        ClassificationResult res = classify(e.map, budget);
        bool agree = res.cls == e.expected;
        agree_count += agree;
        OrderedJson row;
        row["name"] = e.name;
        row["surface"] = to_string(e.map.surface());
        row["expected"] = to_string(e.expected);
        row["got"] = to_string(res.cls);
        row["agree"] = agree;
        row["alpha"] = fmt_real(res.alpha);
        if (res.cls == MapClass::Periodic) row["period"] = res.period;
        rows.push_back(row);
        csv += e.name + "," + to_string(e.map.surface()) + "," + to_string(e.expected) + "," +
               to_string(res.cls) + "," + (agree ? "true" : "false") + "," +
               fmt_real(res.alpha) + "\n";
    }
    OrderedJson result;
    result["rows"] = rows;
    result["agreement"] = std::to_string(agree_count) + "/" + std::to_string(entries.size());

    fs::create_directories(job.out_dir);
    OrderedJson doc = make_document(config_json(job, nullptr), result, OrderedJson::object());
    if (wants(job, "json")) write_text(fs::path(job.out_dir) / "gallery.json", doc.dump(2) + "\n");
    if (wants(job, "csv")) write_text(fs::path(job.out_dir) / "gallery.csv", csv);
    std::cout << "gallery agreement " << result["agreement"].get<std::string>() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kere: analysis and classification of surface homeomorphisms"};
    Job job;

    app.add_option("--command", job.command, "analyze|classify|conjugate|render|gallery")
        ->required();
    app.add_option("--map", job.map_arg, "map definition: JSON file path or inline JSON");
    app.add_option("--horizon", job.horizon, "iteration horizon");
    app.add_option("--grid", job.grid, "grid resolution");
    app.add_option("--eps", job.eps, "separation scale for the modulus test");
    auto* thr = app.add_option("--threshold", job.threshold, "singular flag threshold");
    app.add_option("--seed", job.seed, "random seed");
    app.add_option("--out", job.out_dir, "output directory");
    app.add_option("--format", job.formats, "output formats: json,csv,svg,png")
        ->delimiter(',');
    app.add_option("--point", job.point_arg, "base point 'a,b' for render");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    job.threshold_set = thr->count() > 0;

    try {
        if (job.command == "analyze") return run_analyze(job);
        if (job.command == "classify") return run_classify(job);
        if (job.command == "conjugate") return run_conjugate(job);
        if (job.command == "render") return run_render(job);
        if (job.command == "gallery") return run_gallery(job);
        throw ConfigError("unknown command '" + job.command + "'");
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        // construction and estimation failures are analysis outcomes, not
        // tool faults; report them and exit cleanly
        bool analysis_outcome =
            dynamic_cast<const ResidualTooLarge*>(&e) || dynamic_cast<const ChainStuck*>(&e) ||
            dynamic_cast<const NotStationary*>(&e) ||
            dynamic_cast<const ContinuityGapAtHalf*>(&e) ||
            dynamic_cast<const ThetaCommutationFailure*>(&e) ||
            dynamic_cast<const NormalFormError*>(&e) ||
            dynamic_cast<const NonTrivialHomology*>(&e) ||
            dynamic_cast<const NotDegreeOne*>(&e) ||
            dynamic_cast<const DivergenceToPole*>(&e) ||
            dynamic_cast<const BudgetExceeded*>(&e);
        if (analysis_outcome) {
            std::cout << "{\"status\":\"undetermined\",\"reason\":\"" << e.what() << "\"}\n";
            return 0;
        }
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
