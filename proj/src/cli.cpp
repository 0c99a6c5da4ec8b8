#include "diskgeo/cli.hpp"

#include "diskgeo/carleson.hpp"
#include "diskgeo/criteria.hpp"
#include "diskgeo/error.hpp"
#include "diskgeo/geometry.hpp"
#include "diskgeo/report.hpp"
#include "diskgeo/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace diskgeo::cli {

namespace {

struct Common {
    std::string weight = "exp:a=1,b=1";
    double r_max = kDefaultRMax;
    std::uint64_t seed = 7;
    std::string output;
    std::string csv;
    std::string heatmap;
    Thresholds th;
};

struct Args {
    Common c;
    // dist
    std::string metric = "tau", from = "0,0", to;
    double tol = kDefaultTolRel;
    int max_level = kDefaultMaxLevel, min_level = 0;
    // maps
    std::string map, phi, psi, parts, mode = "surrogate", tgrid = "0:1:0.1";
    double mesh_radius = 0.99;
    int mesh_level = 0;
    // carleson
    double delta = 0.0, samples = 1e6;  // delta 0: m_tau / 2 of the weight
    int box_k = 8, box_angles = 16;
    // verify
    std::string suite = "all";
    std::size_t points = 500;
};

Point parse_point(const std::string& s) {
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return {std::stod(s), 0.0};
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "expected a point as x,y, got '" + s + "'");
    }
}

int status_exit(Status s) {
    switch (s) {
        case Status::Satisfied: return kPass;
        case Status::Violated: return kFail;
        case Status::Inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

Json flag_value(const std::string& s) {
    if (s.empty()) return s;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end && *end == '\0') {
        if (d == std::floor(d) && std::abs(d) < 9e15 && s.find_first_of(".eE") == std::string::npos)
            return static_cast<std::int64_t>(d);
        return number(d);
    }
    return s;
}

/// Every option of the subcommand with its effective value.
Json collect_flags(const CLI::App& sub) {
    Json flags = Json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        if (name == "help" || name == "config" || name.empty()) continue;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            flags[name] = res.size() == 1 ? flag_value(res.front()) : Json(res);
        } else {
            flags[name] = flag_value(opt->get_default_str());
        }
    }
    return flags;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    body(f);
    if (!f) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

CriteriaOptions criteria_options(const Common& c) {
    CriteriaOptions opt;
    opt.th = c.th;
    opt.r_max = c.r_max;
    return opt;
}

/// Gamma (or any point statistic) on a polar raster for the heatmap.
void gamma_heatmap(const std::string& path, const std::function<double(Point)>& f, double r_hi,
                   const std::string& title) {
    const int nr = 40, nt = 96;
    std::vector<double> edges(nr + 1);
    for (int i = 0; i <= nr; ++i) edges[i] = r_hi * i / nr;
    std::vector<std::vector<double>> values(nr, std::vector<double>(nt));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j)
            values[i][j] = f(std::polar(0.5 * (edges[i] + edges[i + 1]), kTwoPi * (j + 0.5) / nt));
    write_file(path, [&](std::ostream& os) { write_polar_heatmap(os, edges, values, title); });
}

bool is_map_head(const std::string& token) {
    static const char* heads[] = {"id", "scale:", "affine:", "moebius:", "mono:", "perturb:", "convex:", "comp:"};
    for (const char* h : heads)
        if (token.rfind(h, 0) == 0) return true;
    return false;
}

}  // namespace

std::vector<std::string> split_map_list(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    int depth = 0;
    for (char ch : text) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            tokens.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    tokens.push_back(cur);
    std::vector<std::string> out;
    for (auto& t : tokens) {
        if (!out.empty() && !is_map_head(t))
            out.back() += "," + t;
        else
            out.push_back(t);
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical geometry and operator criteria for exponential-type weights on the unit disk", "diskgeo"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "TOML file with option values (sections per subcommand)");
    app.require_subcommand(1);
    app.set_version_flag("--version", version());

    Args a;
    auto add_common = [&](CLI::App* sub, bool with_heatmap) {
        sub->add_option("--weight", a.c.weight, "exp:a=1,b=1 | logproxy:alpha=0 | custom:@file.json");
        sub->add_option("--r-max", a.c.r_max, "truncation radius")->check(CLI::Range(0.5, 1.0));
        sub->add_option("--seed", a.c.seed, "RNG seed");
        sub->add_option("-o,--output", a.c.output, "JSON report path (default stdout)");
        sub->add_option("--csv", a.c.csv, "CSV output path");
        if (with_heatmap) sub->add_option("--heatmap", a.c.heatmap, "SVG heatmap path");
        sub->add_option("--eps-zero", a.c.th.eps_zero, "ToZero threshold");
        sub->add_option("--cap", a.c.th.cap, "saturation cap for ratios");
        sub->add_option("--eps-f", a.c.th.eps_f, "F-set threshold");
        sub->add_option("--angles", a.c.th.n_angles, "boundary angles")->check(CLI::PositiveNumber);
        sub->add_option("--aperture", a.c.th.aperture, "Stolz aperture")->check(CLI::Range(1.0, 1e6));
        sub->add_option("--rays", a.c.th.rays, "rays per Stolz radius")->check(CLI::PositiveNumber);
    };
    auto add_maps = [&](CLI::App* sub) {
        sub->add_option("--phi", a.phi, "first map")->required();
        sub->add_option("--psi", a.psi, "second map")->required();
    };
    auto add_mode = [&](CLI::App* sub) {
        sub->add_option("--mode", a.mode, "rho_tau evaluation")->check(CLI::IsMember({"surrogate", "exact"}));
        sub->add_option("--mesh-radius", a.mesh_radius, "exact-mode mesh radius")->check(CLI::Range(0.5, 1.0));
        sub->add_option("--mesh-level", a.mesh_level, "exact-mode mesh level")->check(CLI::Range(0, 9));
    };

    auto* dist = app.add_subcommand("dist", "distance between two points");
    add_common(dist, false);
    dist->add_option("--metric", a.metric)->check(CLI::IsMember({"tau", "phi"}));
    dist->add_option("--from", a.from, "x,y");
    dist->add_option("--to", a.to, "x,y")->required();
    dist->add_option("--tol", a.tol, "relative convergence tolerance")->check(CLI::PositiveNumber);
    dist->add_option("--max-level", a.max_level)->check(CLI::Range(0, 12));
    dist->add_option("--min-level", a.min_level)->check(CLI::Range(0, 12));

    auto* analyze = app.add_subcommand("analyze", "boundedness / compactness of a composition operator");
    add_common(analyze, false);
    analyze->add_option("--map", a.map)->required();

    auto* diff = app.add_subcommand("diff", "compactness of a difference of composition operators");
    add_common(diff, true);
    add_maps(diff);
    add_mode(diff);

    auto* sumdiff = app.add_subcommand("sumdiff", "compactness of C_phi minus a finite sum");
    add_common(sumdiff, false);
    sumdiff->add_option("--phi", a.phi)->required();
    sumdiff->add_option("--parts", a.parts, "M1,M2,...")->required();
    add_mode(sumdiff);

    auto* carleson = app.add_subcommand("carleson", "pullback-measure Carleson box statistics");
    add_common(carleson, true);
    carleson->add_option("--map", a.map)->required();
    carleson->add_option("--delta", a.delta, "box parameter in (0, m_tau); default m_tau/2")->check(CLI::Range(0.0, 1.0));
    carleson->add_option("--samples", a.samples)->check(CLI::Range(1.0, 1e10));
    carleson->add_option("--box-radii", a.box_k, "centres at 1 - 2^-k, k = 1..K")->check(CLI::Range(1, 20));
    carleson->add_option("--box-angles", a.box_angles)->check(CLI::Range(1, 1024));

    auto* verify = app.add_subcommand("verify", "numerical checks of the supporting inequalities");
    add_common(verify, false);
    verify->add_option("--suite", a.suite)
        ->check(CLI::IsMember({"all", "submean", "diff", "separation", "impot", "expdecay", "inclusion"}));
    verify->add_option("--points", a.points)->check(CLI::Range(1, 1000000));

    auto* path = app.add_subcommand("path", "path-connectedness evidence between two maps");
    add_common(path, false);
    add_maps(path);
    path->add_option("--tgrid", a.tgrid, "a:b:step");

    auto* wv = app.add_subcommand("weight-validate", "class-W conditions of a weight");
    add_common(wv, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::CallForVersion&) {
        out << version() << '\n';
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "diskgeo: " << e.what() << "\nRun with --help for usage.\n";
        return kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    RunConfig cfg;
    cfg.command = sub->get_name();
    cfg.weight = a.c.weight;
    cfg.r_max = a.c.r_max;
    cfg.seed = a.c.seed;
    cfg.th = a.c.th;
    cfg.tol_rel = a.tol;
    cfg.max_level = a.max_level;
    cfg.flags = collect_flags(*sub);
    if (!a.c.output.empty()) cfg.outputs["json"] = a.c.output;
    if (!a.c.csv.empty()) cfg.outputs["csv"] = a.c.csv;
    if (!a.c.heatmap.empty()) cfg.outputs["heatmap"] = a.c.heatmap;

    Json result;
    int code = kPass;
    try {
        const WeightModel model = build_weight(parse_weight_spec(a.c.weight), a.c.r_max);
        cfg.weight = model.spec_string();
        const CriteriaOptions copt = criteria_options(a.c);
        CompactDifferenceOptions dopt;
        dopt.criteria = copt;
        dopt.mode = a.mode == "exact" ? GammaMode::Exact : GammaMode::Surrogate;
        dopt.mesh_radius = a.mesh_radius;
        dopt.mesh_level = a.mesh_level;

        if (sub == dist) {
            DistanceOptions o;
            o.tol_rel = a.tol;
            o.max_level = a.max_level;
            o.min_level = std::min(a.min_level, a.max_level);
            const auto d = distance(model, a.metric == "phi" ? Metric::Phi : Metric::Tau, parse_point(a.from),
                                    parse_point(a.to), o);
            result = to_json(d);
            code = d.converged ? kPass : kInconclusive;
        } else if (sub == analyze) {
            const SelfMapExpr m = parse_map(a.map);
            cfg.maps = {m.to_string()};
            const auto sm = check_selfmap(m, kSelfMapSamples, a.c.seed, a.c.r_max);
            if (!sm.is_selfmap) throw Error(ErrorCode::NotSelfMap, a.map + " leaves the disk");
            const Verdict c = compactness(model, m, copt);
            const FSet f = f_set(model, m, copt);
            result = {{"verdict", to_json(c)}, {"f_set", to_json(f)}, {"selfmap_sup", sm.sup_modulus}};
            if (!a.c.csv.empty()) write_file(a.c.csv, [&](std::ostream& os) { write_profiles_csv(os, c.profiles); });
            code = status_exit(c.status);
        } else if (sub == diff || sub == sumdiff) {
            const SelfMapExpr p = parse_map(a.phi);
            cfg.maps = {p.to_string()};
            if (sub == diff) {
                const SelfMapExpr q = parse_map(a.psi);
                cfg.maps.push_back(q.to_string());
                const auto rep = compact_difference(model, p, q, dopt);
                result = to_json(rep);
                if (!a.c.csv.empty())
                    write_file(a.c.csv, [&](std::ostream& os) { write_profiles_csv(os, rep.verdict.profiles); });
                if (!a.c.heatmap.empty()) {
                    std::unique_ptr<ExactRho> exact;
                    if (dopt.mode == GammaMode::Exact)
                        exact = std::make_unique<ExactRho>(model, dopt.mesh_radius, dopt.mesh_level);
                    gamma_heatmap(
                        a.c.heatmap,
                        [&](Point z) {
                            const auto g = gamma_difference(model, p, q, z, dopt.mode, exact.get(), a.c.th.cap);
                            return g.truncated ? NAN : g.value;
                        },
                        0.99, "Gamma(" + p.to_string() + ", " + q.to_string() + ")");
                }
                code = status_exit(rep.verdict.status);
            } else {
                std::vector<SelfMapExpr> parts;
                for (const auto& s : split_map_list(a.parts)) {
                    parts.push_back(parse_map(s));
                    cfg.maps.push_back(parts.back().to_string());
                }
                try {
                    const Verdict v = finite_sum_difference(model, p, parts, dopt);
                    result = {{"verdict", to_json(v)}};
                    code = status_exit(v.status);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::HypothesisViolated) throw;
                    result = {{"verdict", {{"status", "Inconclusive"}, {"label", "HypothesisViolated"}, {"reason", e.what()}}}};
                    code = kInconclusive;
                }
            }
        } else if (sub == carleson) {
            if (a.delta == 0.0) a.delta = 0.5 * model.m_tau();
            if (!(a.delta < model.m_tau()))
                throw Error(ErrorCode::InvalidArgument, "--delta must be below m_tau = " + std::to_string(model.m_tau()) +
                                                            " for this weight");
            cfg.flags["delta"] = a.delta;
            const SelfMapExpr m = parse_map(a.map);
            cfg.maps = {m.to_string()};
            const auto centers = default_box_centers(a.box_k, a.box_angles);
            std::vector<BoxStat> boxes;
            const auto n = static_cast<std::size_t>(a.samples);
            operator_norm_proxy(model, m, centers, a.delta, n, a.c.seed, &boxes);
            // trend of estimate / delta^2 along each angle
            std::vector<LimitProfile> trends;
            auto rank = [](Trend t) {
                return t == Trend::ToZero ? 0 : t == Trend::Bounded ? 1 : t == Trend::Inconclusive ? 2 : 3;
            };
            Trend worst = Trend::ToZero;
            for (int j = 0; j < a.box_angles; ++j) {
                LimitProfile prof;
                prof.angle = kTwoPi * j / a.box_angles;
                for (int k = 0; k < a.box_k; ++k) {
                    const BoxStat& b = boxes[static_cast<std::size_t>(k) * a.box_angles + j];
                    prof.samples.push_back({b.center, std::abs(b.center), b.estimate / (a.delta * a.delta)});
                }
                classify(prof, a.c.th);
                if (rank(prof.trend) > rank(worst)) worst = prof.trend;
                trends.push_back(std::move(prof));
            }
            const char* label = worst == Trend::ToZero      ? "Vanishing"
                                : worst == Trend::Bounded    ? "Bounded"
                                : worst == Trend::ToInfinity ? "Unbounded"
                                                             : "Inconclusive";
            double proxy = 0.0;
            for (const auto& b : boxes) proxy = std::max(proxy, b.estimate);
            Json jb = Json::array();
            for (const auto& b : boxes) jb.push_back(to_json(b));
            Json jt = Json::array();
            for (const auto& t : trends) jt.push_back(to_json(t));
            result = {{"boxes", jb},
                      {"trend", {{"label", label}, {"norm_proxy_relative", number(proxy)}, {"profiles", jt}}},
                      {"caveat", "mass beyond r_max is not sampled"}};
            if (!a.c.csv.empty()) write_file(a.c.csv, [&](std::ostream& os) { write_boxes_csv(os, boxes); });
            if (!a.c.heatmap.empty()) {
                std::vector<double> edges{0.0};
                for (int k = 1; k < a.box_k; ++k) edges.push_back(1.0 - std::ldexp(1.0, -k) * 0.75);
                edges.push_back(1.0);
                std::vector<std::vector<double>> values(a.box_k, std::vector<double>(a.box_angles));
                for (int k = 0; k < a.box_k; ++k)
                    for (int j = 0; j < a.box_angles; ++j)
                        values[k][j] = boxes[static_cast<std::size_t>(k) * a.box_angles + j].estimate;
                write_file(a.c.heatmap, [&](std::ostream& os) {
                    write_polar_heatmap(os, edges, values, "Carleson box statistic, " + m.to_string(),
                                        -kPi / a.box_angles);
                });
            }
            code = worst == Trend::ToInfinity ? kFail : worst == Trend::Inconclusive ? kInconclusive : kPass;
        } else if (sub == verify) {
            const auto checks = run_verify_suite(model, {a.suite, a.points, a.c.seed});
            Json arr = Json::array();
            bool literal_fail = false;
            for (const auto& c : checks) {
                arr.push_back(to_json(c));
                literal_fail = literal_fail || (c.explicit_constant && c.n_violations > 0);
            }
            result = arr;
            code = literal_fail ? kFail : kPass;
        } else if (sub == path) {
            const SelfMapExpr p = parse_map(a.phi), q = parse_map(a.psi);
            cfg.maps = {p.to_string(), q.to_string()};
            const auto rep = path_connectedness(model, p, q, parse_t_grid(a.tgrid), copt);
            result = to_json(rep);
            code = rep.all_bounded && std::isfinite(rep.lipschitz) ? kPass : kFail;
        } else if (sub == wv) {
            const auto rep = validate_class_w(model);
            result = to_json(rep);
            code = rep.pass ? kPass : kFail;
        }
    } catch (const Error& e) {
        err << "diskgeo: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "diskgeo: " << e.what() << '\n';
        return kUsage;
    }

    const std::string text = envelope(cfg, std::move(result)).dump(2) + "\n";
    if (a.c.output.empty()) {
        out << text;
    } else {
        try {
            write_file(a.c.output, [&](std::ostream& os) { os << text; });
        } catch (const Error& e) {
            err << "diskgeo: " << e.what() << '\n';
            return kUsage;
        }
    }
    return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"diskgeo"};
    for (const auto& s : args) argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace diskgeo::cli
