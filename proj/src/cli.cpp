#include "ihs/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ihs/atoms.hpp"
#include "ihs/bifurcation.hpp"
#include "ihs/classifier.hpp"
#include "ihs/kovalevskaya.hpp"
#include "ihs/model_io.hpp"

namespace ihs::cli {

namespace {

using Json = nlohmann::ordered_json;

// Carries an exit code and the report to print alongside the diagnostic.
struct CommandFailure : std::runtime_error {
    CommandFailure(const std::string& what, Json report) : std::runtime_error(what), report(std::move(report)) {}
    Json report;
};

struct Common {
    double tol = default_tol;
    std::size_t samples = default_samples;
    std::uint64_t seed = default_seed;
};

Json config_json(const Common& c)
{
    return {{"seed", c.seed}, {"tol", c.tol}, {"samples", c.samples}};
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

void emit(const Json& report, const std::string& path, std::ostream& out)
{
    const std::string text = report.dump(2) + "\n";
    if (!path.empty()) write_file(path, text);
    out << text;
}

Json vec(const Eigen::VectorXd& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json named_point(const IntegrableModel& m, const PhasePoint& p)
{
    Json j = Json::object();
    for (std::size_t i = 0; i < m.dimension(); ++i) j[m.symbols().coordinates[i]] = p.coords[static_cast<Eigen::Index>(i)];
    return j;
}

std::string type_triple(const WilliamsonType& t)
{
    return "(" + std::to_string(t.elliptic) + "," + std::to_string(t.hyperbolic) + "," + std::to_string(t.focus) + ")";
}

Json type_json(const std::optional<WilliamsonType>& t)
{
    if (!t) return nullptr;
    Json eig = Json::array();
    for (const auto& z : t->eigenvalues) eig.push_back({z.real(), z.imag()});
    return {{"rank", t->rank},
            {"elliptic", t->elliptic},
            {"hyperbolic", t->hyperbolic},
            {"focus", t->focus},
            {"triple", type_triple(*t)},
            {"eigenvalues", eig},
            {"coefficients", t->coefficients},
            {"spectral_gap", t->spectral_gap}};
}

Json verdict_json(const NonDegeneracyVerdict& v)
{
    return {{"verdict", to_string(v.verdict)},
            {"rank", v.rank},
            {"n", v.n},
            {"type", type_json(v.type)},
            {"certificate",
             {{"commutator_defect", v.commutator_defect},
              {"symplectic_defect", v.symplectic_defect},
              {"span_rank", v.span_rank},
              {"spectral_gap", v.spectral_gap},
              {"attempts", v.attempts}}},
            {"reason", v.reason}};
}

// "R1=1,S1=g/2": unlisted coordinates are zero; values may use parameters.
PhasePoint parse_point(const IntegrableModel& m, const std::string& text)
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.dimension()));
    std::vector<bool> seen(m.dimension(), false);
    SymbolTable values;
    values.parameters = m.symbols().parameters;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ModelError("point entry '" + item + "' is not name=value");
        std::string name = item.substr(0, eq);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        const auto i = m.symbols().coordinate_index(name);
        if (!i) throw ModelError("point names unknown coordinate '" + name + "'");
        if (seen[*i]) throw ModelError("coordinate '" + name + "' given twice");
        seen[*i] = true;
        try {
            x[static_cast<Eigen::Index>(*i)] = evaluate(parse(item.substr(eq + 1), values), {}, m.params());
        } catch (const ParseError& e) {
            throw ModelError("value of '" + name + "': " + e.what());
        }
    }
    return PhasePoint(x);
}

// A single half-width, or per-coordinate "lo:hi" ranges separated by commas.
Box parse_box(const std::string& text, std::size_t dimension)
{
    if (text.find(':') == std::string::npos) {
        std::size_t used = 0;
        const double h = std::stod(text, &used);
        if (used != text.size() || !(h > 0)) throw ModelError("box half-width must be a positive number");
        return Box::cube(dimension, h);
    }
    Box b{Eigen::VectorXd(static_cast<Eigen::Index>(dimension)), Eigen::VectorXd(static_cast<Eigen::Index>(dimension))};
    std::stringstream ss(text);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
        if (k >= dimension) throw ModelError("box has more ranges than coordinates");
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ModelError("box range '" + item + "' is not lo:hi");
        const double lo = std::stod(item.substr(0, colon)), hi = std::stod(item.substr(colon + 1));
        if (!(lo < hi)) throw ModelError("box range '" + item + "' is empty");
        b.lower[static_cast<Eigen::Index>(k)] = lo;
        b.upper[static_cast<Eigen::Index>(k)] = hi;
        ++k;
    }
    if (k != dimension) throw ModelError("box needs one range per coordinate");
    return b;
}

Json diagram_summary(const BifurcationDiagram& d)
{
    int elliptic = 0, hyperbolic = 0, unknown = 0;
    for (const auto& a : d.arcs) {
        if (a.label == ArcLabel::elliptic_family) ++elliptic;
        else if (a.label == ArcLabel::hyperbolic_family) ++hyperbolic;
        else ++unknown;
    }
    Json vertices = Json::array();
    for (const auto& v : d.vertices)
        vertices.push_back({{"value", vec(v.value)},
                            {"rank", v.rank},
                            {"verdict", v.verdict},
                            {"type", v.type ? Json(type_triple(*v.type)) : Json(nullptr)}});
    return {{"axes", d.axes},
            {"arcs", d.arcs.size()},
            {"elliptic_arcs", elliptic},
            {"hyperbolic_arcs", hyperbolic},
            {"unknown_arcs", unknown},
            {"vertices", vertices},
            {"cusp_candidates", d.cusps.size()},
            {"failures", d.failures}};
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
    std::string model;
    std::optional<double> g;
    double jacobi_tol = 1e-10;
    double box = 2.0;
    std::string out;
};

int cmd_verify(const VerifyArgs& a, const Common& c, std::ostream& out)
{
    const IntegrableModel m = resolve_model(a.model, a.g);
    const auto comm = check_commutation(m, c.samples, c.tol, c.seed, a.box);
    const auto jac = check_jacobi(m.structure, m.params(), c.samples, a.jacobi_tol, c.seed, a.box);
    const auto cas = check_casimirs(m.structure, m.params(), c.samples, a.jacobi_tol, c.seed, a.box);
    const bool pass = comm.pass && jac.pass && cas.pass;
    Json report;
    report["command"] = "verify";
    report["model"] = m.name;
    report["config"] = config_json(c);
    report["box"] = a.box;
    report["commutation"] = {{"max_residual", comm.max_residual},
                             {"worst_pair", {m.momentum_names[comm.worst_pair.first], m.momentum_names[comm.worst_pair.second]}},
                             {"tolerance", comm.tolerance},
                             {"pass", comm.pass}};
    report["jacobi"] = {{"max_residual", jac.max_residual}, {"tolerance", a.jacobi_tol}, {"pass", jac.pass}};
    report["casimirs"] = {{"count", m.structure.casimirs().size()},
                          {"max_residual", cas.max_residual},
                          {"tolerance", a.jacobi_tol},
                          {"pass", cas.pass}};
    report["pass"] = pass;
    emit(report, a.out, out);
    return pass ? ok : check_failed;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
    std::string model;
    std::string point;
    std::optional<double> g;
    int attempts = 32;
    std::string out;
};

int cmd_classify(const ClassifyArgs& a, const Common& c, std::ostream& out)
{
    const IntegrableModel m = resolve_model(a.model, a.g);
    const PhasePoint p = parse_point(m, a.point);
    ClassifierOptions o;
    o.tol = c.tol;
    o.leaf_tol = c.tol;
    o.attempts = a.attempts;
    o.seed = c.seed;
    const PointClassification pc = classify_point(m, p, o);
    Json report;
    report["command"] = "classify";
    report["model"] = m.name;
    report["config"] = config_json(c);
    report["point"] = named_point(m, p);
    report["value"] = vec(m.momentum_value(p));
    report["rank"] = pc.rank;
    report["n"] = pc.n;
    report["regular"] = pc.regular;
    if (pc.regular) {
        report["summary"] = "regular, rank " + std::to_string(pc.rank);
        report["classification"] = nullptr;
    } else {
        const auto& v = pc.verdict;
        report["summary"] = to_string(v.verdict) + (v.type ? " " + type_triple(*v.type) : std::string());
        report["classification"] = verdict_json(v);
    }
    emit(report, a.out, out);
    return ok;
}

// ------------------------------------------------------------------- trace

struct TraceArgs {
    std::string model;
    std::optional<double> g;
    std::string box;
    std::optional<int> resolution;
    double max_step = ContinuationOptions{}.max_step;
    std::string out;
};

int cmd_trace(const TraceArgs& a, const Common& c, std::ostream& out)
{
    const IntegrableModel m = resolve_model(a.model, a.g);
    if (m.n() != 2) throw ModelError("trace needs a momentum map with two components");
    const bool kovalevskaya = m.name == "kovalevskaya";
    const Box box = !a.box.empty() ? parse_box(a.box, m.dimension())
                    : kovalevskaya ? kovalevskaya_box(KovalevskayaDiagramOptions{}.s_bound)
                                   : Box::cube(m.dimension(), 2.0);
    ContinuationOptions copt;
    copt.tol = c.tol;
    copt.seed = c.seed;
    copt.max_step = a.max_step;
    copt.initial_step = std::min(copt.initial_step, a.max_step);
    ScanOptions scan;
    scan.tol = c.tol;
    scan.resolution = a.resolution.value_or(kovalevskaya ? KovalevskayaDiagramOptions{}.resolution : scan.resolution);
    scan.dedupe_radius = 2.0 * copt.max_step;

    std::vector<SingularSeed> seeds;
    if (kovalevskaya)
        for (const auto& p : involution_fixed_points(m.parameter("g"))) seeds.push_back({p, 0, m.momentum_value(p)});
    for (auto& s : scan_singular_points(m, box, scan)) seeds.push_back(std::move(s));
    const BifurcationDiagram d = trace_diagram(m, seeds, box, copt);

    Json files = Json::array();
    if (!a.out.empty()) {
        namespace fs = std::filesystem;
        const fs::path target(a.out);
        const std::string ext = target.extension().string();
        if (ext != ".svg" && ext != ".csv" && ext != ".json")
            throw ModelError("--out must end in .svg, .csv or .json");
        for (const auto& [suffix, format] : {std::pair{".svg", ExportFormat::svg}, std::pair{".csv", ExportFormat::csv},
                                             std::pair{".json", ExportFormat::json}}) {
            fs::path path = target;
            path.replace_extension(suffix);
            export_diagram(d, format, path.string());
            files.push_back(path.string());
        }
    }
    Json report;
    report["command"] = "trace";
    report["model"] = m.name;
    report["config"] = config_json(c);
    report["box"] = {{"lower", vec(box.lower)}, {"upper", vec(box.upper)}};
    report["scan_resolution"] = scan.resolution;
    report["max_step"] = copt.max_step;
    report["seeds"] = seeds.size();
    report["diagram"] = diagram_summary(d);
    report["files"] = files;
    emit(report, "", out);
    return d.failures.empty() ? ok : check_failed;
}

// ------------------------------------------------------------------- atoms

struct AtomsArgs {
    std::string product;
    std::string out;
};

AlmostDirectProduct resolve_product(const std::string& ref)
{
    for (const auto& n : named_products())
        if (n.product.name == ref) return n.product;
    if (ref == "C2-trivial") return c2_trivial();
    std::ifstream f(ref, std::ios::binary);
    if (!f) throw AtomError("no named product or readable file '" + ref + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_product(ss.str());
}

int cmd_atoms_check(const AtomsArgs& a, const Common& c, std::ostream& out)
{
    const AlmostDirectProduct p = resolve_product(a.product);
    Json report;
    report["command"] = "atoms check";
    report["config"] = config_json(c);
    report["product"] = p.name;
    Json comps = Json::array();
    for (const auto& at : p.components) comps.push_back(at.name);
    report["components"] = comps;
    report["group"] = {{"name", p.group.name()}, {"order", p.group.order()}};
    const auto problems = validate(p);
    if (!problems.empty()) {
        report["error"] = problems;
        throw CommandFailure("invalid product: " + problems.front(), report);
    }
    const FreenessReport free = check_free(p);
    report["free"] = free.free;
    if (!free.free) {
        const std::string who = p.group.elements()[static_cast<std::size_t>(*free.witness)];
        report["witness"] = who;
        report["error"] = "action is not free: element " + who + " has a fixed point on every component";
        throw CommandFailure(report["error"].get<std::string>(), report);
    }
    const CrossCheck cc = cross_check_criteria(p);
    const auto w = williamson_profile(p);
    report["williamson"] = {{"rank", w.rank}, {"elliptic", w.elliptic}, {"hyperbolic", w.hyperbolic}, {"focus", w.focus}};
    report["complexity"] = complexity(p);
    report["iv"] = cc.iv;
    report["vi"] = cc.vi;
    report["verdict"] = to_string(stability_verdict(p));
    emit(report, a.out, out);
    return ok;
}

int cmd_atoms_exceptions(const AtomsArgs& a, const Common& c, std::ostream& out)
{
    Json report;
    report["command"] = "atoms exceptions";
    report["config"] = config_json(c);
    Json list = Json::array();
    for (const auto& e : exceptions_report())
        list.push_back({{"subject", e.subject},
                        {"initial_value", e.initial_value},
                        {"used_value", e.used_value},
                        {"derivation", e.derivation}});
    report["exceptions"] = list;
    emit(report, a.out, out);
    return ok;
}

int cmd_atoms_list(const AtomsArgs& a, const Common& c, std::ostream& out)
{
    Json report;
    report["command"] = "atoms list";
    report["config"] = config_json(c);
    Json list = Json::array();
    for (const auto& n : named_products())
        list.push_back({{"name", n.product.name}, {"family", n.family}, {"complexity", complexity(n.product)},
                        {"expected_complexity", n.expected_complexity},
                        {"verdict", to_string(stability_verdict(n.product))}});
    report["products"] = list;
    emit(report, a.out, out);
    return ok;
}

// ------------------------------------------------------------ kovalevskaya

struct ReportArgs {
    double g = 0.0;
    std::string out;
    std::string svg;
    bool no_diagram = false;
    double s_bound = KovalevskayaDiagramOptions{}.s_bound;
    int resolution = KovalevskayaDiagramOptions{}.resolution;
};

int cmd_kovalevskaya_report(const ReportArgs& a, const Common& c, std::ostream& out)
{
    ClassifierOptions o;
    o.tol = c.tol;
    o.leaf_tol = c.tol;
    o.seed = c.seed;
    const VertexReport vr = classify_vertices(a.g, o);
    const auto closed = vertex_values(a.g);
    const IntegrableModel m = build_kovalevskaya(a.g);

    Json report;
    report["command"] = "kovalevskaya report";
    report["config"] = config_json(c);
    report["g"] = a.g;
    report["g_squared"] = a.g * a.g;
    if (vr.regime) {
        report["regime"] = std::string(1, *vr.regime);
    } else {
        report["regime"] = nullptr;
        report["regime_note"] = "g^2 lies on a threshold; no regime is asserted";
    }
    report["thresholds"] = {0.0, 1.0, regime_threshold_cd(), 2.0};

    bool values_ok = true;
    Json points = Json::array();
    for (std::size_t i = 0; i < 2; ++i) {
        const FixedPointReport& fp = vr.points[i];
        const double err = (fp.value - closed[i]).cwiseAbs().maxCoeff();
        values_ok = values_ok && err <= 1e-12;
        points.push_back({{"name", fp.name},
                          {"point", named_point(m, fp.point)},
                          {"value", {fp.value[0], fp.value[1]}},
                          {"closed_form_value", {closed[i][0], closed[i][1]}},
                          {"value_error", err},
                          {"rank", fp.rank},
                          {"label", fp.label},
                          {"type_name", fp.verdict.type ? Json(type_name(*fp.verdict.type)) : Json(nullptr)},
                          {"classification", verdict_json(fp.verdict)}});
    }
    report["fixed_points"] = points;
    report["vertex_types"] = vr.type_multiset();

    bool diagram_ok = true;
    if (a.no_diagram) {
        report["diagram"] = nullptr;
    } else {
        KovalevskayaDiagramOptions dopt;
        dopt.s_bound = a.s_bound;
        dopt.resolution = a.resolution;
        dopt.continuation.tol = c.tol;
        dopt.continuation.seed = c.seed;
        const BifurcationDiagram d = kovalevskaya_diagram(a.g, dopt);
        Json summary = diagram_summary(d);
        Json distances = Json::array();
        for (const auto& v : closed) {
            const double dist = distance_to_arcs(d, v);
            distances.push_back({{"value", {v[0], v[1]}},
                                 {"distance", dist},
                                 {"within_step", dist <= dopt.continuation.max_step}});
        }
        summary["vertex_distances"] = distances;
        summary["max_step"] = dopt.continuation.max_step;
        report["diagram"] = summary;
        diagram_ok = d.failures.empty();
        if (!a.svg.empty()) export_diagram(d, ExportFormat::svg, a.svg);
    }
    report["pass"] = values_ok && diagram_ok;
    emit(report, a.out, out);
    return values_ok && diagram_ok ? ok : check_failed;
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--tol", c.tol, "numerical tolerance")->capture_default_str();
    app->add_option("--samples", c.samples, "random sample count")->capture_default_str();
    app->add_option("--seed", c.seed, "random seed")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Singularities of integrable Hamiltonian systems", "ihs"};
    app.require_subcommand(1);
    Common common;

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "check commutation, Jacobi identity and Casimirs by sampling");
    v->add_option("--model", verify.model, "model file or built-in name")->required();
    v->add_option("--g", verify.g, "override parameter g");
    v->add_option("--jacobi-tol", verify.jacobi_tol, "tolerance for Jacobi and Casimir residuals")->capture_default_str();
    v->add_option("--box", verify.box, "sampling half-width")->capture_default_str();
    v->add_option("--out", verify.out, "also write the report here");
    add_common(v, common);

    ClassifyArgs classify;
    auto* cl = app.add_subcommand("classify", "rank, non-degeneracy and Williamson type at a point");
    cl->add_option("--model", classify.model, "model file or built-in name")->required();
    cl->add_option("--point", classify.point, "coordinates as name=value pairs, unlisted ones are 0")->required();
    cl->add_option("--g", classify.g, "override parameter g");
    cl->add_option("--attempts", classify.attempts, "random combinations tried")->capture_default_str();
    cl->add_option("--out", classify.out, "also write the report here");
    add_common(cl, common);

    TraceArgs trace;
    auto* tr = app.add_subcommand("trace", "trace the bifurcation diagram of a two-component momentum map");
    tr->add_option("--model", trace.model, "model file or built-in name")->required();
    tr->add_option("--g", trace.g, "override parameter g");
    tr->add_option("--box", trace.box, "half-width, or lo:hi per coordinate separated by commas");
    tr->add_option("--resolution", trace.resolution, "scan grid points per axis");
    tr->add_option("--max-step", trace.max_step, "largest continuation step")->capture_default_str();
    tr->add_option("--out", trace.out, "diagram path (.svg, .csv or .json); the other formats are written alongside");
    add_common(tr, common);

    AtomsArgs atoms_args;
    auto* at = app.add_subcommand("atoms", "almost-direct products of atoms");
    at->require_subcommand(1);
    auto* at_check = at->add_subcommand("check", "complexity, connectedness criteria and stability verdict");
    at_check->add_option("--product", atoms_args.product, "product JSON file or named product")->required();
    at_check->add_option("--out", atoms_args.out, "also write the report here");
    add_common(at_check, common);
    auto* at_exc = at->add_subcommand("exceptions", "catalog values revised for consistency");
    at_exc->add_option("--out", atoms_args.out, "also write the report here");
    add_common(at_exc, common);
    auto* at_list = at->add_subcommand("list", "named products with their complexity");
    at_list->add_option("--out", atoms_args.out, "also write the report here");
    add_common(at_list, common);

    ReportArgs rep;
    auto* kv = app.add_subcommand("kovalevskaya", "the Kovalevskaya top");
    kv->require_subcommand(1);
    auto* kv_rep = kv->add_subcommand("report", "fixed points, vertex types, regime and diagram");
    kv_rep->add_option("--g", rep.g, "area constant")->required();
    kv_rep->add_option("--out", rep.out, "also write the report here");
    kv_rep->add_option("--svg", rep.svg, "write the diagram as SVG");
    kv_rep->add_flag("--no-diagram", rep.no_diagram, "skip tracing the diagram");
    kv_rep->add_option("--s-bound", rep.s_bound, "trace box bound on |S_i|")->capture_default_str();
    kv_rep->add_option("--resolution", rep.resolution, "scan grid points per axis")->capture_default_str();
    add_common(kv_rep, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "ihs: " << e.what() << "\n";
        return usage_error;
    }
    if (!(common.tol > 0) || !std::isfinite(common.tol)) {
        err << "ihs: --tol must be positive\n";
        return usage_error;
    }

    std::string command = "ihs";
    try {
        if (*v) return command = "verify", cmd_verify(verify, common, out);
        if (*cl) return command = "classify", cmd_classify(classify, common, out);
        if (*tr) return command = "trace", cmd_trace(trace, common, out);
        if (*at_check) return command = "atoms check", cmd_atoms_check(atoms_args, common, out);
        if (*at_exc) return command = "atoms exceptions", cmd_atoms_exceptions(atoms_args, common, out);
        if (*at_list) return command = "atoms list", cmd_atoms_list(atoms_args, common, out);
        if (*kv_rep) return command = "kovalevskaya report", cmd_kovalevskaya_report(rep, common, out);
    } catch (const CommandFailure& e) {
        out << e.report.dump(2) << "\n";
        err << "ihs " << command << ": " << e.what() << "\n";
        return check_failed;
    } catch (const std::exception& e) {
        Json report{{"command", command}, {"config", config_json(common)}, {"error", e.what()}};
        out << report.dump(2) << "\n";
        err << "ihs " << command << ": " << e.what() << "\n";
        return check_failed;
    }
    err << "ihs: no command given\n";
    return usage_error;
}

}  // namespace ihs::cli
