#pragma once

// Command-line front end. Every command writes a JSON report (stdout unless
// --report is given) and returns
//   0 ok, 1 a verification gate failed, 2 domain or numeric error, 3 usage or parse error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "canonical.hpp"
#include "classify.hpp"
#include "equivalence.hpp"
#include "io.hpp"
#include "parser.hpp"

namespace lmsurf::cli {

enum ExitCode : int { Ok = 0, GateFailed = 1, NumericError = 2, UsageError = 3 };

class ConfigError : public Error {
public:
    using Error::Error;
};

struct JobConfig {
    std::string command;
    std::string f;
    std::string g;
    bool canonical = false;  // g alone, f = 1/g'
    std::string part = "real";
    std::string domain = "-1:1:-1:1";
    std::string grid = "21x21";
    std::string z0;
    std::string w0;
    std::string w_domain;
    int sign = 1;
    double quad_tol = 1e-10;
    int fd_order = 0;  // 0: exact jets when available
    std::string out;
    std::string format;
    std::string report;

    // canonicalize
    double ode_tol = 1e-6;
    // verify
    std::string csv;
    std::string gauge;
    bool canonical_checks = false;
    double tol_h = 1e-6;
    double tol_coeff = 1e-4;
    double tol_pde = 1e-5;
    double margin = 0.3;
    // classify
    std::string cubic_path;
    // transform
    double phi = 0.0;
    std::string alpha = "0";
    std::string form = "fractional";
    std::string reading = "g";
    double tol = 1e-9;
};

inline Rect parse_domain(const std::string& text)
{
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') {
            throw ConfigError("domain '" + text + "': expected umin:umax:vmin:vmax");
        }
        v.push_back(x);
    }
    if (v.size() != 4) {
        throw ConfigError("domain '" + text + "': expected umin:umax:vmin:vmax");
    }
    const Rect r{v[0], v[1], v[2], v[3]};
    if (!(r.u_min < r.u_max) || !(r.v_min < r.v_max)) {
        throw ConfigError("domain '" + text + "': need min < max on both axes");
    }
    return r;
}

inline GridSpec parse_grid(const std::string& text)
{
    const auto x = text.find_first_of("xX");
    try {
        if (x != std::string::npos) {
            std::size_t a = 0;
            std::size_t b = 0;
            const std::string su = text.substr(0, x);
            const std::string sv = text.substr(x + 1);
            const GridSpec g{std::stoi(su, &a), std::stoi(sv, &b)};
            if (a == su.size() && b == sv.size() && g.nu >= 3 && g.nv >= 3) {
                return g;
            }
        }
    }
    catch (const std::logic_error&) {
    }
    throw ConfigError("grid '" + text + "': expected NxM with N, M >= 3");
}

inline Part parse_part(const std::string& text)
{
    if (text == "real" || text == "re") {
        return Part::Real;
    }
    if (text == "imag" || text == "imaginary" || text == "im") {
        return Part::Imaginary;
    }
    throw ConfigError("part '" + text + "': expected real or imag");
}

inline SplitComplex parse_point(const std::string& name, const std::string& text)
{
    try {
        return parse_split_complex(text);
    }
    catch (const Error& e) {
        throw ConfigError(name + " '" + text + "': " + e.what());
    }
}

inline CanonicalGauge parse_gauge(const std::string& text)
{
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        v.push_back(std::strtod(item.c_str(), &end));
        if (item.empty() || *end != '\0') {
            v.clear();
            break;
        }
    }
    if (v.size() != 3 || (v[0] != 1.0 && v[0] != -1.0)) {
        throw ConfigError("gauge '" + text + "': expected eps,A,B with eps = 1 or -1");
    }
    return {static_cast<int>(v[0]), v[1], v[2]};
}

inline std::string error_kind(const Error& e)
{
    if (dynamic_cast<const BranchError*>(&e)) {
        return "BranchError";
    }
    if (dynamic_cast<const ZeroDivisor*>(&e)) {
        return "ZeroDivisor";
    }
    if (dynamic_cast<const NoSquareRoot*>(&e)) {
        return "NoSquareRoot";
    }
    if (dynamic_cast<const DomainError*>(&e)) {
        return "DomainError";
    }
    if (dynamic_cast<const TimelikeViolation*>(&e)) {
        return "TimelikeViolation";
    }
    if (dynamic_cast<const DegenerateNormal*>(&e)) {
        return "DegenerateNormal";
    }
    if (dynamic_cast<const StepFailure*>(&e)) {
        return "StepFailure";
    }
    if (dynamic_cast<const InconclusiveOverlap*>(&e)) {
        return "InconclusiveOverlap";
    }
    return "Error";
}

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(const std::vector<std::string>& args);

    int cmd_generate(const JobConfig& cfg);
    int cmd_canonicalize(const JobConfig& cfg);
    int cmd_verify(const JobConfig& cfg);
    int cmd_classify(const JobConfig& cfg);
    int cmd_transform(const JobConfig& cfg);

private:
    HoloExpr expr_arg(const std::string& name, const std::string& text)
    {
        if (text.empty()) {
            throw ConfigError("--" + name + " is required");
        }
        try {
            return parse_expr(text);
        }
        catch (const SyntaxError& e) {
            err_ << "error: --" << name << ": " << e.what() << '\n';
            err_ << "  " << text << '\n' << "  " << std::string(e.offset(), ' ') << "^\n";
            if (!e.expected().empty()) {
                err_ << "  expected one of:";
                for (const auto& x : e.expected()) {
                    err_ << ' ' << x;
                }
                err_ << '\n';
            }
            throw;
        }
    }

    GeneratingData data_arg(const JobConfig& cfg)
    {
        const SplitComplex z0 = cfg.z0.empty() ? SplitComplex(0.0) : parse_point("--z0", cfg.z0);
        const Part part = parse_part(cfg.part);
        if (cfg.canonical) {
            if (!cfg.f.empty()) {
                throw ConfigError("--canonical takes --g only");
            }
            return GeneratingData::canonical(expr_arg("g", cfg.g), z0, part);
        }
        return GeneratingData::general(expr_arg("f", cfg.f), expr_arg("g", cfg.g), z0, part);
    }

    void emit(const JobConfig& cfg, nlohmann::json report)
    {
        report["schema_version"] = report_schema_version;
        report["command"] = cfg.command;
        const std::string text = report.dump(2);
        if (cfg.report.empty()) {
            out_ << text << '\n';
            return;
        }
        std::ofstream file(cfg.report);
        if (!file) {
            throw ConfigError("cannot write report to " + cfg.report);
        }
        file << text << '\n';
    }

    std::ostream& out_;
    std::ostream& err_;
};

inline FormsOptions forms_options(const JobConfig& cfg)
{
    FormsOptions opt;
    if (cfg.fd_order != 0) {
        opt.method = DerivativeMethod::FiniteDifference;
        opt.fd_order = cfg.fd_order;
    }
    return opt;
}

inline std::string mesh_format(const JobConfig& cfg)
{
    if (!cfg.format.empty()) {
        return cfg.format;
    }
    const auto dot = cfg.out.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : cfg.out.substr(dot + 1);
    if (ext == "obj" || ext == "csv" || ext == "json") {
        return ext;
    }
    throw ConfigError("cannot infer the mesh format of '" + cfg.out + "'; pass --format obj|csv|json");
}

inline int Runner::cmd_generate(const JobConfig& cfg)
{
    const GeneratingData data = data_arg(cfg);
    const Rect domain = parse_domain(cfg.domain);
    const GridSpec grid = parse_grid(cfg.grid);
    SurfaceOptions sopt;
    sopt.tol = cfg.quad_tol;
    const SurfacePatch patch = evaluate_surface(data, domain, grid, sopt);
    const FormsOptions fopt = forms_options(cfg);
    const FormsField forms = compute_all_forms(patch, fopt);

    double max_h = 0.0;
    double k_min = nan_value;
    double k_max = nan_value;
    std::size_t nodes = 0;
    for (const auto& c : forms.curv) {
        if (!c) {
            continue;
        }
        ++nodes;
        max_h = std::max(max_h, std::abs(c->H));
        k_min = nodes == 1 ? c->K : std::min(k_min, c->K);
        k_max = nodes == 1 ? c->K : std::max(k_max, c->K);
    }

    nlohmann::json report;
    report["f"] = to_string(data.f());
    report["g"] = to_string(data.g());
    report["kind"] = data.kind() == GeneratingData::Kind::Canonical ? "canonical" : "general";
    report["part"] = to_string(data.part());
    report["base_point"] = to_json(data.base_point());
    report["domain"] = to_json(domain);
    report["grid"] = {grid.nu, grid.nv};
    report["integration"] = patch.method == IntegrationMethod::Symbolic ? "symbolic" : "quadrature";
    report["invalid_samples"] = patch.invalid_count();
    report["form_nodes"] = nodes;
    report["derivatives"] = cfg.fd_order == 0 ? "analytic" : "finite-difference";
    report["max_abs_H"] = json_number(nodes ? max_h : nan_value);
    report["K_min"] = json_number(k_min);
    report["K_max"] = json_number(k_max);

    if (!cfg.out.empty()) {
        const std::string fmt = mesh_format(cfg);
        std::ofstream file(cfg.out);
        if (!file) {
            throw ConfigError("cannot write " + cfg.out);
        }
        if (fmt == "obj") {
            const ObjMesh mesh = patch_mesh(patch);
            write_obj(file, mesh);
            report["vertices"] = mesh.vertices.size();
            report["faces"] = mesh.faces.size();
        }
        else if (fmt == "csv") {
            write_csv(file, patch, fopt);
        }
        else if (fmt == "json") {
            nlohmann::json pts = nlohmann::json::array();
            for (std::size_t k = 0; k < patch.points.size(); ++k) {
                pts.push_back(patch.valid[k] ? to_json(patch.points[k]) : nlohmann::json(nullptr));
            }
            file << nlohmann::json{{"schema_version", report_schema_version},
                                   {"domain", to_json(domain)},
                                   {"grid", {grid.nu, grid.nv}},
                                   {"points", pts}}
                        .dump()
                 << '\n';
        }
        else {
            throw ConfigError("unknown format '" + fmt + "'");
        }
        report["output"] = cfg.out;
        report["format"] = fmt;
    }
    emit(cfg, report);
    return Ok;
}

inline int Runner::cmd_canonicalize(const JobConfig& cfg)
{
    const HoloExpr f = expr_arg("f", cfg.f);
    const HoloExpr g = expr_arg("g", cfg.g);
    const Rect domain = parse_domain(cfg.domain);
    const GridSpec grid = parse_grid(cfg.grid);
    if (cfg.sign != 1 && cfg.sign != -1) {
        throw ConfigError("--sign must be 1 or -1");
    }
    CanonicalizationResult res;
    if (cfg.z0.empty()) {
        res = canonicalize_region(f, g, domain, cfg.sign);
    }
    else {
        const SplitComplex z0 = parse_point("--z0", cfg.z0);
        const SplitComplex w0 = cfg.w0.empty() ? SplitComplex(0.0) : parse_point("--w0", cfg.w0);
        const Rect w_domain = cfg.w_domain.empty() ? domain : parse_domain(cfg.w_domain);
        res = canonicalize(f, g, w0, z0, w_domain, cfg.sign);
    }
    const ResidualStats stats = res.ode_residual(res.w_domain, grid);
    const bool identity = res.affine() && *res.slope == SplitComplex(1.0) && null_abs(res.z0 - res.w0) < 1e-12;
    const bool passed = stats.samples > 0 && stats.max < cfg.ode_tol;

    nlohmann::json report;
    report["f"] = to_string(f);
    report["g"] = to_string(g);
    report["sign"] = res.sign;
    report["z0"] = to_json(res.z0);
    report["w0"] = to_json(res.w0);
    report["w_domain"] = to_json(res.w_domain);
    report["affine"] = res.affine();
    report["identity"] = identity;
    report["slope"] = res.affine() ? to_json(*res.slope) : nlohmann::json(nullptr);
    report["g_tilde"] = res.g_tilde_expr ? nlohmann::json(to_string(*res.g_tilde_expr, "w")) : nlohmann::json(nullptr);
    report["residual"] = {{"quantity", "|z'^2 f g' - 1|"},
                          {"max", json_number(stats.max)},
                          {"mean", json_number(stats.mean)},
                          {"samples", stats.samples},
                          {"tolerance", cfg.ode_tol}};
    report["passed"] = passed;
    emit(cfg, report);
    return passed ? Ok : GateFailed;
}

inline int Runner::cmd_verify(const JobConfig& cfg)
{
    SurfacePatch patch;
    std::optional<GeneratingData> data;
    nlohmann::json report;
    if (!cfg.csv.empty()) {
        if (!cfg.f.empty() || !cfg.g.empty()) {
            throw ConfigError("--csv excludes --f/--g");
        }
        std::ifstream file(cfg.csv);
        if (!file) {
            throw ConfigError("cannot read " + cfg.csv);
        }
        patch = read_csv_patch(file);
        report["source"] = cfg.csv;
    }
    else {
        data = data_arg(cfg);
        SurfaceOptions sopt;
        sopt.tol = cfg.quad_tol;
        patch = evaluate_surface(*data, parse_domain(cfg.domain), parse_grid(cfg.grid), sopt);
        report["source"] = {{"f", to_string(data->f())},
                            {"g", to_string(data->g())},
                            {"kind", data->kind() == GeneratingData::Kind::Canonical ? "canonical" : "general"},
                            {"part", to_string(data->part())}};
    }
    CanonicalGauge gauge;
    if (!cfg.gauge.empty()) {
        gauge = parse_gauge(cfg.gauge);
        patch = apply_gauge(gauge, patch);
    }
    report["gauge"] = {gauge.eps, gauge.A, gauge.B};
    report["domain"] = to_json(patch.domain);
    report["grid"] = {patch.grid.nu, patch.grid.nv};

    const bool canonical_checks =
        cfg.canonical_checks || (data && data->kind() == GeneratingData::Kind::Canonical);
    // Nodes near the curvature blow-up locus |g|^2 = 1 are excluded for canonical data.
    std::function<bool(double, double)> filter;
    if (data && data->kind() == GeneratingData::Kind::Canonical) {
        filter = [g = data->g(), gauge, margin = cfg.margin](double u, double v) {
            const auto [uu, vv] = gauge(u, v);
            try {
                const SplitComplex gv = eval(g, {uu, vv});
                return std::abs(1.0 - (gv.re() * gv.re() - gv.im() * gv.im())) > margin;
            }
            catch (const Error&) {
                return false;
            }
        };
        report["node_filter"] = {{"rule", "|1 - |g|^2| > margin"}, {"margin", cfg.margin}};
    }

    const FormsOptions fopt = forms_options(cfg);
    nlohmann::json gates = nlohmann::json::object();
    bool all = true;
    FormsField forms;
    try {
        forms = compute_all_forms(patch, fopt);
        gates["timelike"] = {{"passed", true}};
    }
    catch (const TimelikeViolation& e) {
        gates["timelike"] = {{"passed", false}, {"detail", e.what()}};
        report["gates"] = gates;
        report["passed"] = false;
        emit(cfg, report);
        return GateFailed;
    }

    double max_h = 0.0;
    std::size_t nodes = 0;
    for (const auto& c : forms.curv) {
        if (c) {
            ++nodes;
            max_h = std::max(max_h, std::abs(c->H));
        }
    }
    const bool h_ok = nodes > 0 && max_h < cfg.tol_h;
    all = all && h_ok;
    gates["minimal"] = {{"passed", h_ok}, {"max_abs_H", json_number(max_h)}, {"nodes", nodes}, {"tolerance", cfg.tol_h}};

    if (canonical_checks) {
        VerifyOptions vopt;
        vopt.forms = fopt;
        vopt.node_filter = filter;
        const CanonicalReport rep = verify_canonical_coefficients(patch, vopt);
        const bool ok = rep.passes(cfg.tol_coeff);
        all = all && ok;
        gates["canonical_coefficients"] = {
            {"passed", ok},
            {"nodes", rep.nodes},
            {"negative_nodes", rep.negative_nodes},
            {"positive_nodes", rep.positive_nodes},
            {"max", {{"E+G", json_number(rep.max.e_plus_g)},
                     {"F", json_number(rep.max.f)},
                     {"E_vs_K", json_number(rep.max.e_vs_k)},
                     {"L", json_number(rep.max.l)},
                     {"M", json_number(rep.max.m)},
                     {"N", json_number(rep.max.n)}}},
            {"worst", json_number(rep.worst)},
            {"worst_at", {json_number(rep.worst_u), json_number(rep.worst_v)}},
            {"tolerance", cfg.tol_coeff}};

        const ScalarField K = curvature_field(patch, fopt);
        const CurvatureSign sign = rep.positive_nodes > rep.negative_nodes ? CurvatureSign::Positive
                                                                          : CurvatureSign::Negative;
        const ScalarField residual = ganchev_pde_residual(K, sign);
        const FieldSummary s = summarize(residual, filter);
        const bool pde_ok = s.defined > 0 && s.max_abs < cfg.tol_pde;
        all = all && pde_ok;
        gates["curvature_pde"] = {{"passed", pde_ok},
                                  {"sign", sign == CurvatureSign::Negative ? "negative" : "positive"},
                                  {"evaluation", K.evaluator ? "pointwise" : "lattice"},
                                  {"max_abs_residual", json_number(s.max_abs)},
                                  {"nodes", s.defined},
                                  {"tolerance", cfg.tol_pde}};
    }
    report["gates"] = gates;
    report["passed"] = all;
    emit(cfg, report);
    return all ? Ok : GateFailed;
}

inline int Runner::cmd_classify(const JobConfig& cfg)
{
    nlohmann::json input;
    if (cfg.cubic_path == "-") {
        input = nlohmann::json::parse(std::cin);
    }
    else {
        std::ifstream file(cfg.cubic_path);
        if (!file) {
            throw ConfigError("cannot read " + cfg.cubic_path);
        }
        input = nlohmann::json::parse(file);
    }
    const CubicParametrization x = cubic_from_json(input);
    const ClassificationVerdict v = classify_cubic(x);
    nlohmann::json report;
    report["input"] = cfg.cubic_path;
    report["degree"] = x.degree();
    report["verdict"] = to_string(v.verdict);
    report["f"] = v.f ? nlohmann::json(to_string(*v.f)) : nlohmann::json(nullptr);
    report["g"] = v.g ? nlohmann::json(to_string(*v.g)) : nlohmann::json(nullptr);
    report["scale"] = json_number(v.scale);
    report["mirrored"] = v.mirrored;
    report["notes"] = v.notes;
    emit(cfg, report);
    return Ok;
}

inline int Runner::cmd_transform(const JobConfig& cfg)
{
    const HoloExpr g = expr_arg("g", cfg.g);
    MoebiusParams m;
    m.phi = cfg.phi;
    m.alpha = parse_point("--alpha", cfg.alpha);
    m.sign = cfg.sign;
    if (cfg.form == "fractional") {
        m.form = MoebiusForm::Fractional;
    }
    else if (cfg.form == "inversion") {
        m.form = MoebiusForm::Inversion;
    }
    else {
        throw ConfigError("--form must be fractional or inversion");
    }
    if (cfg.reading == "g") {
        m.inversion = InversionReading::ReciprocalG;
    }
    else if (cfg.reading == "f") {
        m.inversion = InversionReading::ReciprocalF;
    }
    else {
        throw ConfigError("--reading must be g or f");
    }
    if (m.sign != 1 && m.sign != -1) {
        throw ConfigError("--sign must be 1 or -1");
    }
    const Rect domain = parse_domain(cfg.domain);
    const GridSpec grid = parse_grid(cfg.grid);
    const HoloExpr gt = moebius_transform(g, m);

    nlohmann::json report;
    report["g"] = to_string(g);
    report["g_tilde"] = to_string(gt);
    report["params"] = {{"phi", m.phi},
                        {"alpha", to_json(m.alpha)},
                        {"sign", m.sign},
                        {"form", to_string(m.form)},
                        {"inversion_reading", m.inversion == InversionReading::ReciprocalG ? "1/g" : "1/f"}};
    bool all = true;
    if (m.form == MoebiusForm::Fractional) {
        const MotionWitness w = motion_witness(m);
        const double disc = witness_discrepancy(g, m, domain, grid);
        const bool ok = disc < cfg.tol;
        all = all && ok;
        report["witness"] = {{"A", to_json(w.A)},
                             {"B", to_json(w.B)},
                             {"S", to_json(w.S)},
                             {"max_discrepancy", json_number(disc)},
                             {"tolerance", cfg.tol},
                             {"passed", ok}};
    }

    // K = -16 |g'|^4 / (1 - |g|^2)^4 at equal parameters, relative to max(1, |K|).
    double worst = 0.0;
    std::size_t nodes = 0;
    std::size_t undefined = 0;
    const double hu = (domain.u_max - domain.u_min) / (grid.nu - 1);
    const double hv = (domain.v_max - domain.v_min) / (grid.nv - 1);
    for (int j = 0; j < grid.nv; ++j) {
        for (int i = 0; i < grid.nu; ++i) {
            const SplitComplex z{domain.u_min + i * hu, domain.v_min + j * hv};
            try {
                const double k1 = canonical_curvature_formula(g, z);
                const double k2 = canonical_curvature_formula(gt, z);
                if (!std::isfinite(k1) || !std::isfinite(k2)) {
                    ++undefined;
                    continue;
                }
                worst = std::max(worst, std::abs(k2 - k1) / std::max(1.0, std::abs(k1)));
                ++nodes;
            }
            catch (const Error&) {
                ++undefined;
            }
        }
    }
    const bool k_ok = nodes > 0 && worst < cfg.tol;
    all = all && k_ok;
    report["curvature_invariance"] = {
        {"max_relative_difference", json_number(worst)},
        {"nodes", nodes},
        {"undefined_nodes", undefined},
        {"tolerance", cfg.tol},
        {"passed", k_ok}};
    report["passed"] = all;
    emit(cfg, report);
    return all ? Ok : GateFailed;
}

inline int Runner::run(const std::vector<std::string>& args)
{
    CLI::App app{"Minimal timelike surfaces in Minkowski 3-space from split-complex data", "lmsurf"};
    app.require_subcommand(1);
    JobConfig cfg;

    const auto data_opts = [&cfg](CLI::App* sub) {
        sub->add_option("--f", cfg.f, "f(z) of the pair (f, g)");
        sub->add_option("--g", cfg.g, "g(z)");
        sub->add_flag("--canonical", cfg.canonical, "g alone, with f = 1/g' (canonical parameters)");
        sub->add_option("--part", cfg.part, "real or imag")->capture_default_str();
        sub->add_option("--z0", cfg.z0, "base point, e.g. 0.5-0.25J");
        sub->add_option("--tol", cfg.quad_tol, "quadrature tolerance")->capture_default_str();
    };
    const auto lattice_opts = [&cfg](CLI::App* sub) {
        sub->add_option("--domain", cfg.domain, "umin:umax:vmin:vmax")->capture_default_str();
        sub->add_option("--grid", cfg.grid, "NxM samples")->capture_default_str();
    };

    auto* gen = app.add_subcommand("generate", "sample a surface patch and export it");
    data_opts(gen);
    lattice_opts(gen);
    gen->add_option("--out", cfg.out, "mesh file (.obj, .csv, .json)");
    gen->add_option("--format", cfg.format, "obj, csv or json")->check(CLI::IsMember({"obj", "csv", "json"}));
    gen->add_option("--fd-order", cfg.fd_order, "finite-difference order for forms (0: exact)");

    auto* can = app.add_subcommand("canonicalize", "transform (f, g) to canonical parameters");
    can->add_option("--f", cfg.f, "f(z)");
    can->add_option("--g", cfg.g, "g(z)");
    lattice_opts(can);
    can->add_option("--z0", cfg.z0, "z(w0); defaults to the centre of --domain with an automatic w-square");
    can->add_option("--w0", cfg.w0, "w0 (with --z0)");
    can->add_option("--w-domain", cfg.w_domain, "w rectangle (with --z0; defaults to --domain)");
    can->add_option("--sign", cfg.sign, "branch of z' = +-1/sqrt(f g')")->capture_default_str();
    can->add_option("--tol", cfg.ode_tol, "gate on the ODE residual")->capture_default_str();

    auto* ver = app.add_subcommand("verify", "run the minimality and canonical-parameter gates");
    data_opts(ver);
    lattice_opts(ver);
    ver->add_option("--csv", cfg.csv, "verify a sampled patch from a CSV table instead");
    ver->add_option("--gauge", cfg.gauge, "eps,A,B: verify the patch in gauged parameters");
    ver->add_flag("--canonical-checks", cfg.canonical_checks, "also run coefficient and curvature-PDE gates");
    ver->add_option("--fd-order", cfg.fd_order, "finite-difference order for forms (0: exact when available)");
    ver->add_option("--tol-h", cfg.tol_h, "gate on max |H|")->capture_default_str();
    ver->add_option("--tol-coeff", cfg.tol_coeff, "gate on canonical coefficients")->capture_default_str();
    ver->add_option("--tol-pde", cfg.tol_pde, "gate on the curvature PDE residual")->capture_default_str();
    ver->add_option("--margin", cfg.margin, "skip nodes with |1 - |g|^2| below this (canonical data)")
        ->capture_default_str();

    auto* cls = app.add_subcommand("classify", "classify a cubic parametrization given as JSON");
    cls->add_option("path", cfg.cubic_path, "coefficient JSON, or - for stdin")->required();

    auto* tr = app.add_subcommand("transform", "apply a Moebius-type transformation to canonical data g");
    tr->add_option("--g", cfg.g, "g(z)");
    lattice_opts(tr);
    tr->add_option("--phi", cfg.phi, "hyperbolic angle")->capture_default_str();
    tr->add_option("--alpha", cfg.alpha, "split-complex alpha")->capture_default_str();
    tr->add_option("--sign", cfg.sign, "+1 or -1")->capture_default_str();
    tr->add_option("--form", cfg.form, "fractional or inversion")->capture_default_str();
    tr->add_option("--reading", cfg.reading, "inversion reading: g (1/g) or f (1/f = g')")->capture_default_str();
    tr->add_option("--tol", cfg.tol, "gate tolerance")->capture_default_str();

    for (auto* sub : {gen, can, ver, cls, tr}) {
        sub->add_option("--report", cfg.report, "write the JSON report here instead of stdout");
    }

    std::vector<std::string> owned{"lmsurf"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : owned) {
        argv.push_back(a.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e, out_, err_) == 0 ? Ok : UsageError;
    }

    try {
        if (*gen) {
            cfg.command = "generate";
            return cmd_generate(cfg);
        }
        if (*can) {
            cfg.command = "canonicalize";
            return cmd_canonicalize(cfg);
        }
        if (*ver) {
            cfg.command = "verify";
            return cmd_verify(cfg);
        }
        if (*cls) {
            cfg.command = "classify";
            return cmd_classify(cfg);
        }
        cfg.command = "transform";
        return cmd_transform(cfg);
    }
    catch (const SyntaxError&) {
        return UsageError;  // diagnostics already printed
    }
    catch (const ConfigError& e) {
        err_ << "error: " << e.what() << '\n';
        return UsageError;
    }
    catch (const FormatError& e) {
        err_ << "error: " << e.what() << '\n';
        return UsageError;
    }
    catch (const InvalidParams& e) {
        err_ << "error: " << e.what() << '\n';
        return UsageError;
    }
    catch (const nlohmann::json::exception& e) {
        err_ << "error: " << e.what() << '\n';
        return UsageError;
    }
    catch (const Error& e) {
        err_ << "error (" << error_kind(e) << "): " << e.what() << '\n';
        return NumericError;
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return Runner(out, err).run(args);
}

} // namespace lmsurf::cli
