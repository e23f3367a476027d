// wring: generate vorticity fields, measure helicity and the Godbillon-Vey
// invariant, evolve under Euler, apply shear maps, and run the link calculators.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wring/wring.hpp"

namespace fs = std::filesystem;
using namespace wring;

namespace {

json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::BadArgument, "cannot open '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, "'" + path + "' is not valid JSON: " + e.what());
    }
}

// Output paths are checked before any compute starts.
void require_writable(const std::string& path) {
    if (path.empty() || path == "-") return;
    fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
        fail(ErrorKind::BadArgument, "output directory '" + parent.string() + "' does not exist");
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::BadArgument, "cannot open '" + path + "' for writing");
    os << text;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            fail(ErrorKind::BadArgument, "'" + item + "' is not a number");
        }
    }
    return out;
}

FieldBundle load_bundle(const std::string& path) { return from_field_file(read_wrg1(path)); }

// --- generate --------------------------------------------------------------

struct GenerateArgs {
    std::string family;
    int n = defaults().grid_n;
    double box = defaults().box_length;
    std::string out;
    std::string spec;
    double shear = 0.3;
    double radius = 0.0;
    std::string abc = "1,1,1";
};

FieldBundle generate(const GenerateArgs& a) {
    Grid3 g = Grid3::cube(a.n, a.box);
    json spec = a.spec.empty() ? json::object() : read_json(a.spec);
    if (a.family == "clebsch") {
        if (spec.contains("f") || spec.contains("g"))
            return gen_clebsch(g, spec.at("f").get<TrigSeries>(), spec.at("g").get<TrigSeries>());
        return gen_clebsch_default(g);
    }
    if (a.family == "clebsch_offset") return gen_clebsch_default(g, clebsch_offset_phase());
    if (a.family == "sheared_clebsch") return gen_sheared_clebsch(g, a.shear);
    if (a.family == "morse") return gen_morse(g);
    if (a.family == "kupka") return gen_kupka_tube(g, a.radius);
    if (a.family == "abc") {
        auto c = parse_list(a.abc);
        if (c.size() != 3) fail(ErrorKind::BadArgument, "--abc needs three coefficients");
        return gen_beltrami_abc(g, c[0], c[1], c[2]);
    }
    if (a.family == "rings") {
        auto rings = spec.value("rings", hopf_rings());
        auto fluxes = spec.value("fluxes", std::vector<double>(rings.size(), 1.0));
        return gen_linked_rings(g, rings, spec.value("core_radius", defaults().ring_core_radius), fluxes,
                                spec.value("profile_power", 3));
    }
    fail(ErrorKind::BadArgument, "unknown family '" + a.family + "'");
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string input;
    std::string eta = "canonical";
    double eps = defaults().eta_eps;
    std::string report;
    std::string density_out;
    bool richardson = false;
    bool no_bound = false;
};

int analyze_cmd(const AnalyzeArgs& a) {
    require_writable(a.report);
    require_writable(a.density_out);
    AnalyzeOptions opt;
    opt.choice = {parse_eta_kind(a.eta), a.eps};
    opt.choice.validate();
    opt.richardson = a.richardson;
    FieldBundle b = load_bundle(a.input);

    AnalysisReport r = analyze(b, opt);
    int code = 0;
    std::string bound_note;
    if (r.integrable && !a.no_bound && b.W.max_norm() > 0.0) {
        try {
            BoundReport br = obstruction_bound(b, a.eps, opt.tol);
            r.bound = br.data;
            if (!br.holds) code = 5;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::MaskTooSmall) throw;
            bound_note = e.what();
        }
    }
    json j = to_json(r);
    if (!bound_note.empty()) j["bound_note"] = bound_note;
    if (code == 5) j["bound_holds"] = false;
    emit(a.report, j.dump(2) + "\n");

    if (!a.density_out.empty()) {
        FieldFile f;
        f.grid = b.grid;
        f.meta = {{"kind", "gv_density"}, {"eta_choice", opt.choice}};
        f.fields.push_back(named("gv_density", r.gv_density));
        write_wrg1(a.density_out, f);
    }
    if (!r.integrable) {
        std::cerr << "wring: " << r.message << "\n";
        return exit_code(ErrorKind::IntegrabilityFailure);
    }
    if (code == 5) std::cerr << "wring: obstruction bound violated\n";
    return code;
}

// --- evolve ----------------------------------------------------------------

struct EvolveArgs {
    std::string input;
    double T = 0.5;
    double dt = 0.0;
    double cfl = defaults().cfl;
    int record_every = 1;
    std::string csv;
    std::string out;
    std::string eta = "canonical";
    bool reproject = false;
    bool no_dealias = false;
};

int evolve_cmd(const EvolveArgs& a) {
    require_writable(a.csv);
    require_writable(a.out);
    if (!(a.T > 0.0)) fail(ErrorKind::BadArgument, "--T must be positive");
    if (a.record_every < 1) fail(ErrorKind::BadArgument, "--record-every must be at least 1");
    EvolutionOptions opt;
    opt.dt = a.dt;
    opt.cfl = a.cfl;
    opt.reproject = a.reproject;
    opt.dealias = !a.no_dealias;
    EvolutionState s = make_state(load_bundle(a.input), opt);
    int steps = int(std::ceil(a.T / s.dt - 1e-12));
    s.dt = a.T / steps;
    auto series = track_invariants(s, steps, a.record_every, {parse_eta_kind(a.eta), defaults().eta_eps});
    std::ostringstream os;
    write_series_csv(os, series);
    emit(a.csv, os.str());
    if (!a.out.empty()) write_wrg1(a.out, to_field_file(s.bundle));
    return 0;
}

// --- diffeo ----------------------------------------------------------------

struct DiffeoArgs {
    std::string input;
    std::string out;
    std::vector<std::string> shears;
    std::string map;
    bool inverse = false;
    double tol = defaults().diffeo_consistency_tol;
};

int diffeo_cmd(const DiffeoArgs& a) {
    require_writable(a.out);
    DiffeoMap m;
    if (!a.map.empty()) m.shears = read_json(a.map).at("shears").get<std::vector<Shear>>();
    for (const auto& s : a.shears) {
        auto v = parse_list(s);
        if (v.size() != 3 && v.size() != 4) fail(ErrorKind::BadArgument, "--shear wants axis,along,amplitude[,k]");
        m.shears.push_back(Shear{int(v[0]), int(v[1]), v[2], v.size() == 4 ? int(v[3]) : 1});
    }
    m.validate();
    if (a.inverse) m = m.inverse();
    FieldBundle out = apply_diffeo(load_bundle(a.input), m, a.tol);
    write_wrg1(a.out, to_field_file(out));
    std::cout << json{{"curl_residual", out.meta.curl_residual}, {"history", out.meta.history}}.dump(2) << "\n";
    return 0;
}

// --- thurston / link ---------------------------------------------------------

int thurston_cmd(const std::string& slopes, const std::string& fluxes) {
    if (slopes.empty() == fluxes.empty()) fail(ErrorKind::BadArgument, "give exactly one of --slopes or --fluxes");
    json j;
    SlopeData sd;
    if (!slopes.empty()) {
        sd.slopes = parse_list(slopes);
        sd.n_components = int(sd.slopes.size());
    } else {
        auto phi = parse_list(fluxes);
        FluxSlopes f = flux_slopes(phi);
        sd = f.slopes;
        j["fluxes"] = phi;
        j["identity_residual"] = f.identity_residual;
    }
    double gv = thurston_gv(sd);
    j["slopes"] = sd.slopes;
    j["gv"] = gv;
    j["gv_over_pi_squared"] = gv / (std::numbers::pi * std::numbers::pi);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int link_cmd(const std::string& input, const std::string& preset, int samples) {
    if (input.empty() == preset.empty()) fail(ErrorKind::BadArgument, "give exactly one of a curve file or --preset");
    CurveSet cs;
    if (!preset.empty()) {
        if (preset == "hopf")
            cs = hopf_pair(1.0, 1.0, std::size_t(samples));
        else if (preset == "four_chain")
            cs = four_chain(1.0, std::size_t(samples));
        else
            fail(ErrorKind::BadArgument, "unknown preset '" + preset + "'");
    } else {
        try {
            cs = read_json(input).get<CurveSet>();
        } catch (const json::exception& e) {
            fail(ErrorKind::Format, std::string("bad curve file: ") + e.what());
        }
    }
    LinkHelicities h = linking_helicities(cs);
    json j = {{"linking_matrix", h.linking}, {"helicity_per_component", h.per_component}, {"helicity", h.total}};
    if (cs.curves.size() >= 2) {
        json pairs = json::array();
        for (std::size_t i = 0; i < cs.curves.size(); ++i)
            for (std::size_t k = i + 1; k < cs.curves.size(); ++k) {
                LinkingNumber ln = gauss_linking(cs.curves[i], cs.curves[k]);
                pairs.push_back({{"i", i}, {"j", k}, {"value", ln.value}, {"min_distance", ln.min_distance}});
            }
        j["gauss_integrals"] = pairs;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int selftest_cmd(int n, const std::vector<int>& only, const std::string& report) {
    require_writable(report);
    AcceptanceConfig cfg = n > 0 ? AcceptanceConfig::forced(n) : AcceptanceConfig{};
    std::vector<CriterionResult> rs;
    if (only.empty()) {
        rs = run_acceptance(cfg, &std::cout);
    } else {
        for (int id : only) {
            rs.push_back(run_criterion(id, cfg));
            std::cout << format_line(rs.back()) << std::endl;
        }
    }
    int pass = 0, xfail = 0;
    for (const auto& r : rs) {
        pass += r.pass;
        xfail += r.expected_fail();
    }
    std::cout << pass << " passed, " << xfail << " expected failures, " << (rs.size() - pass - xfail)
              << " failed\n";
    if (!report.empty()) emit(report, json(rs).dump(2) + "\n");
    return all_passed(rs) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wring: helicity and Godbillon-Vey diagnostics for periodic vorticity fields.\n"
                 "Thread count for FFTs: environment variable WRING_THREADS (default 1)."};
    app.require_subcommand(0, 1);
    bool show_defaults = false;
    app.add_flag("--defaults", show_defaults, "Print every default as JSON and exit");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Generate a field bundle (WRG1)");
    gen->add_option("--family", ga.family, "clebsch, clebsch_offset, sheared_clebsch, morse, kupka, abc, rings")
        ->required()
        ->check(CLI::IsMember({"clebsch", "clebsch_offset", "sheared_clebsch", "morse", "kupka", "abc", "rings"}));
    gen->add_option("--n", ga.n, "Grid points per axis")->capture_default_str()->check(CLI::Range(8, 1024));
    gen->add_option("--box", ga.box, "Box side length")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--out", ga.out, "Output WRG1 file")->required();
    gen->add_option("--spec", ga.spec, "JSON parameters (clebsch: f, g; rings: rings, fluxes, core_radius, profile_power)")
        ->check(CLI::ExistingFile);
    gen->add_option("--shear", ga.shear, "Shear amplitude for sheared_clebsch")->capture_default_str();
    gen->add_option("--radius", ga.radius, "Kupka support radius (0 = quarter of the box)")->capture_default_str();
    gen->add_option("--abc", ga.abc, "ABC coefficients a,b,c")->capture_default_str();

    AnalyzeArgs aa;
    auto* ana = app.add_subcommand("analyze", "Helicity, GV and the steady-flow bound for a bundle");
    ana->add_option("input", aa.input, "WRG1 bundle")->required()->check(CLI::ExistingFile);
    ana->add_option("--eta", aa.eta, "eta choice")->capture_default_str()->check(CLI::IsMember({"canonical", "velocity"}));
    ana->add_option("--eps", aa.eps, "Denominator exclusion threshold")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    ana->add_option("--report", aa.report, "JSON report path (default stdout)");
    ana->add_option("--density-out", aa.density_out, "Write the GV density as WRG1");
    ana->add_flag("--richardson", aa.richardson, "Add the eps -> 0 Richardson estimate");
    ana->add_flag("--no-bound", aa.no_bound, "Skip the obstruction bound");

    EvolveArgs ea;
    auto* evo = app.add_subcommand("evolve", "Integrate the Euler equations and record invariants (CSV)");
    evo->add_option("input", ea.input, "WRG1 bundle")->required()->check(CLI::ExistingFile);
    evo->add_option("--T", ea.T, "Final time")->capture_default_str();
    evo->add_option("--dt", ea.dt, "Time step (0 = from CFL)")->capture_default_str()->check(CLI::NonNegativeNumber);
    evo->add_option("--cfl", ea.cfl, "CFL number for the automatic step")->capture_default_str()->check(CLI::Range(0.0, 0.5));
    evo->add_option("--record-every", ea.record_every, "Sample every k steps")->capture_default_str();
    evo->add_option("--csv", ea.csv, "CSV output path (default stdout)");
    evo->add_option("--out", ea.out, "Write the final bundle");
    evo->add_option("--eta", ea.eta, "eta choice for GV samples")->capture_default_str()->check(CLI::IsMember({"canonical", "velocity"}));
    evo->add_flag("--reproject", ea.reproject, "Restore curl A = W after every step");
    evo->add_flag("--no-dealias", ea.no_dealias, "Disable 2/3 dealiasing");

    DiffeoArgs da;
    auto* dif = app.add_subcommand("diffeo", "Push a bundle forward by a composition of shears");
    dif->add_option("input", da.input, "WRG1 bundle")->required()->check(CLI::ExistingFile);
    dif->add_option("--out", da.out, "Output WRG1 file")->required();
    dif->add_option("--shear", da.shears, "axis,along,amplitude[,k]: x_axis += amplitude sin(k x_along)");
    dif->add_option("--map", da.map, "JSON map {\"shears\": [...]}")->check(CLI::ExistingFile);
    dif->add_flag("--inverse", da.inverse, "Apply the inverse map");
    dif->add_option("--tol", da.tol, "Allowed |curl A - W| / |W| after the map")->capture_default_str();

    std::string slopes, fluxes;
    auto* thu = app.add_subcommand("thurston", "GV of a Thurston foliation from slopes or fluxes");
    thu->add_option("--slopes", slopes, "s_1,...,s_N");
    thu->add_option("--fluxes", fluxes, "Phi_1,...,Phi_N");

    std::string curves, preset;
    int samples = 256;
    auto* lnk = app.add_subcommand("link", "Linking matrix and tube helicities for closed curves");
    lnk->add_option("input", curves, "JSON curve set {curves, fluxes[, linking_matrix]}")->check(CLI::ExistingFile);
    lnk->add_option("--preset", preset, "hopf or four_chain")->check(CLI::IsMember({"hopf", "four_chain"}));
    lnk->add_option("--samples", samples, "Samples per preset curve")->capture_default_str()->check(CLI::Range(64, 1 << 16));

    int st_n = 0;
    std::vector<int> st_only;
    std::string st_report;
    auto* st = app.add_subcommand("selftest", "Run the acceptance suite");
    st->add_option("--n", st_n, "Force every resolution from n (expected failures are marked)")->check(CLI::Range(0, 512));
    st->add_option("--only", st_only, "Run only these criteria")->check(CLI::Range(1, 12));
    st->add_option("--report", st_report, "JSON results path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(ErrorKind::BadArgument);
    }

    try {
        if (show_defaults) {
            std::cout << defaults_json().dump(2) << "\n";
            return 0;
        }
        if (*gen) {
            require_writable(ga.out);
            FieldBundle b = generate(ga);
            write_wrg1(ga.out, to_field_file(b));
            return 0;
        }
        if (*ana) return analyze_cmd(aa);
        if (*evo) return evolve_cmd(ea);
        if (*dif) return diffeo_cmd(da);
        if (*thu) return thurston_cmd(slopes, fluxes);
        if (*lnk) return link_cmd(curves, preset, samples);
        if (*st) return selftest_cmd(st_n, st_only, st_report);
        std::cout << app.help();
        return exit_code(ErrorKind::BadArgument);
    } catch (const Error& e) {
        std::cerr << "wring: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "wring: internal error: " << e.what() << "\n";
        return 5;
    }
}
