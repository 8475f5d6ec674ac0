// mmelab: experiment runner around the mme library. Every subcommand loads
// one JSON config (file < MMELAB_* environment < flags), runs a pipeline,
// and writes a deterministic report.json (plus CSV/SVG data) into --out.
// Exit codes: 0 ok, 1 verification failed, 2 bad config, 3 numerical error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mme/dimension.hpp"
#include "mme/greens.hpp"
#include "mme/lyapunov.hpp"
#include "mme/parallel.hpp"
#include "mme/sampler.hpp"
#include "mme/verifier.hpp"

extern char** environ;

using json = nlohmann::json;
using namespace mme;

namespace {

constexpr const char* kVersion = "0.1.0";

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- config ---------------------------------------------------------------

json default_config() {
    return json{
        {"map", json{{"kind", "poly1d"}, {"coeffs", json::array({0.0, 0.0, 1.0})}}},
        {"seed", 1},
        {"n_points", 5000},
        {"burn_in", 40},
        {"cocycle_length", 25},
        {"eps", 0.2},
        {"r", 0.05},
        {"m", 5},
        {"m_lo", 1},
        {"m_hi", 6},
        {"k", 10},
        {"n_scales", 12},
        {"r_lo_frac", 1e-3},
        {"r_hi_frac", 0.1},
        {"n_test_points", 10000},
        {"grid", 64},
        {"point", json::array()},
        {"out", "out"},
    };
}

void apply_env_overrides(json& cfg) {
    const std::string prefix = "MMELAB_";
    for (char** e = environ; *e; ++e) {
        std::string entry(*e);
        if (entry.rfind(prefix, 0) != 0) continue;
        auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(prefix.size(), eq - prefix.size());
        for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        std::string value = entry.substr(eq + 1);
        json parsed = json::parse(value, nullptr, false);
        cfg[key] = parsed.is_discarded() ? json(value) : parsed;
    }
}

json load_config(const std::string& path) {
    json cfg = default_config();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw SchemaError("cannot open config file: " + path);
        json file = json::parse(in, nullptr, false);
        if (file.is_discarded()) throw SchemaError("config is not valid JSON: " + path);
        if (!file.is_object()) throw SchemaError("config root must be a JSON object");
        for (auto& [k, v] : file.items()) cfg[k] = v;
    }
    apply_env_overrides(cfg);
    return cfg;
}

double require_number(const json& cfg, const std::string& key) {
    if (!cfg.contains(key) || !cfg[key].is_number())
        throw SchemaError("config key '" + key + "' must be a number");
    return cfg[key].get<double>();
}

int require_int(const json& cfg, const std::string& key, int lo, int hi) {
    double v = require_number(cfg, key);
    if (v != static_cast<int>(v) || v < lo || v > hi)
        throw SchemaError("config key '" + key + "' must be an integer in [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

double require_positive(const json& cfg, const std::string& key) {
    double v = require_number(cfg, key);
    if (!(v > 0.0)) throw SchemaError("config key '" + key + "' must be positive");
    return v;
}

cx parse_cx(const json& v, const std::string& where) {
    if (v.is_number()) return cx(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return cx(v[0].get<double>(), v[1].get<double>());
    throw SchemaError(where + ": coefficients must be numbers or [re, im] pairs");
}

Poly1D parse_poly(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) throw SchemaError(where + " must be a coefficient array");
    std::vector<cx> coeffs;
    for (const auto& v : arr) coeffs.push_back(parse_cx(v, where));
    return Poly1D(coeffs);
}

PolyMap build_map(const json& cfg) {
    if (!cfg.contains("map") || !cfg["map"].is_object())
        throw SchemaError("config key 'map' must be an object");
    const json& m = cfg["map"];
    std::string kind = m.value("kind", "");
    try {
        if (kind == "poly1d") return PolyMap::one_d(parse_poly(m.at("coeffs"), "map.coeffs"));
        if (kind == "product") {
            if (!m.contains("factors") || !m["factors"].is_array())
                throw SchemaError("map.factors must be an array of coefficient arrays");
            std::vector<Poly1D> factors;
            for (const auto& f : m["factors"]) factors.push_back(parse_poly(f, "map.factors"));
            return PolyMap::product(factors);
        }
        if (kind == "skew") {
            Poly1D p = parse_poly(m.at("p"), "map.p");
            if (!m.contains("q_w") || !m["q_w"].is_array())
                throw SchemaError("map.q_w must be an array of coefficient arrays");
            std::vector<Poly1D> q_w;
            for (const auto& q : m["q_w"]) q_w.push_back(parse_poly(q, "map.q_w"));
            return PolyMap::skew(p, q_w);
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("map spec: ") + e.what());
    } catch (const MapError& e) {
        throw SchemaError(std::string("map spec: ") + e.what());
    }
    throw SchemaError("map.kind must be one of poly1d, product, skew");
}

CPoint parse_point(const json& cfg, int n) {
    const json& p = cfg["point"];
    if (!p.is_array()) throw SchemaError("config key 'point' must be an array");
    CPoint x(n);
    if (p.empty()) {  // default probe: (1, 0, ...)
        x.setZero();
        x[0] = cx(1.0, 0.0);
        return x;
    }
    if (static_cast<int>(p.size()) != n)
        throw SchemaError("config key 'point' must have one entry per coordinate");
    for (int i = 0; i < n; ++i) x[i] = parse_cx(p[i], "point");
    return x;
}

// ---- output ---------------------------------------------------------------

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_report(const std::filesystem::path& dir, json report, json cfg) {
    cfg.erase("out");  // output location does not affect results
    report["config"] = cfg;
    report["config_hash"] = hex64(fnv1a(cfg.dump()));
    report["version"] = kVersion;
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report.dump(2) << "\n";
}

void write_points_csv(const std::filesystem::path& dir, const std::vector<CPoint>& pts) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "points.csv", std::ios::binary);
    int n = pts.empty() ? 0 : static_cast<int>(pts.front().size());
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << "re_" << j << ",im_" << j;
    out << "\n";
    char buf[64];
    for (const auto& p : pts) {
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", p[j].real(), p[j].imag());
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
}

void write_svg(const std::filesystem::path& dir, const std::vector<CPoint>& pts) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "points.svg", std::ios::binary);
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& p : pts) {
        lo_x = std::min(lo_x, p[0].real());
        hi_x = std::max(hi_x, p[0].real());
        lo_y = std::min(lo_y, p[0].imag());
        hi_y = std::max(hi_y, p[0].imag());
    }
    double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
    auto sx = [&](double x) { return 20.0 + 960.0 * (x - lo_x) / span; };
    auto sy = [&](double y) { return 980.0 - 960.0 * (y - lo_y) / span; };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n";
    char buf[96];
    for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1\" fill=\"black\"/>\n",
                      sx(p[0].real()), sy(p[0].imag()));
        out << buf;
    }
    out << "</svg>\n";
}

json bounds_json(const BoundsReport& b) {
    auto one = [](const BoundCheck& c) {
        return json{{"pass", c.pass}, {"threshold", c.threshold}, {"margin", c.margin}};
    };
    return json{{"briend_duval", one(b.briend_duval)}, {"bedford_jonsson", one(b.bedford_jonsson)}};
}

json lyap_json(const LyapunovEstimate& e) {
    return json{{"lambda_min", e.lambda_min},   {"lambda_max", e.lambda_max},
                {"lambda_sum", e.lambda_sum},   {"stderr_min", e.stderr_min},
                {"stderr_max", e.stderr_max},   {"stderr_sum", e.stderr_sum},
                {"n_orbits", e.n_orbits},       {"cocycle_length", e.cocycle_length}};
}

json verification_json(const VerificationReport& r) {
    json measured = json::object();
    for (const auto& [k, v] : r.measured) measured[k] = v;
    return json{{"experiment", r.experiment},
                {"pass", r.pass},
                {"measured", measured},
                {"note", r.note}};
}

// ---- pipelines ------------------------------------------------------------

struct Run {
    json cfg;
    PolyMap map;
    std::uint64_t seed;
    std::filesystem::path out;
    bool svg;
};

json dimension_json(const Run& r, const MeasureSample& sample, const LyapunovEstimate& est) {
    RadiiSpec spec;
    spec.r_lo_frac = require_positive(r.cfg, "r_lo_frac");
    spec.r_hi_frac = require_positive(r.cfg, "r_hi_frac");
    spec.n_scales = require_int(r.cfg, "n_scales", 3, 64);
    int k = require_int(r.cfg, "k", 4, 1000);
    double diam = sample_diameter(sample.points);
    Estimate corr = correlation_dimension(sample.points, spec.r_lo_frac * diam,
                                          spec.r_hi_frac * diam, spec.n_scales);
    Estimate knn = knn_local_dimension(sample.points, k, r.seed + 0xD1);

    int d = static_cast<int>(r.map.degree());
    std::vector<double> exponents =
        r.map.n() == 1 ? std::vector<double>{est.lambda_sum}
                       : std::vector<double>{est.lambda_min, est.lambda_max};
    double bound = theorem_bound(d, est.lambda_max, r.map.n());
    double sigma = 3.0 * (corr.stderr_ + knn.stderr_);
    return json{{"correlation_dim", corr.value},
                {"correlation_stderr", corr.stderr_},
                {"knn_dim", knn.value},
                {"knn_stderr", knn.stderr_},
                {"k", k},
                {"mane", mane_formula(d, est.lambda_sum)},
                {"conjecture2", conjecture2_formula(d, exponents)},
                {"theorem_bound", bound},
                {"pass", corr.value <= bound + sigma && knn.value <= bound + sigma}};
}

int cmd_green(const Run& r) {
    auto params = default_params(r.map);
    int grid = require_int(r.cfg, "grid", 2, 4096);
    double extent = params.escape_radius;
    std::vector<double> g(static_cast<std::size_t>(grid) * grid);
    parallel_for(g.size(), [&](std::size_t idx) {
        int i = static_cast<int>(idx) / grid, j = static_cast<int>(idx) % grid;
        double x = -extent + 2.0 * extent * j / (grid - 1);
        double y = -extent + 2.0 * extent * i / (grid - 1);
        CPoint z(r.map.n());
        z.setZero();
        z[0] = cx(x, y);
        g[idx] = escape_rate(r.map, z, params);
    });
    std::filesystem::create_directories(r.out);
    std::ofstream csv(r.out / "green.csv", std::ios::binary);
    csv << "x,y,g\n";
    char buf[96];
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        int i = static_cast<int>(idx) / grid, j = static_cast<int>(idx) % grid;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n",
                      -extent + 2.0 * extent * j / (grid - 1),
                      -extent + 2.0 * extent * i / (grid - 1), g[idx]);
        csv << buf;
    }
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, v);
    write_report(r.out,
                 json{{"subcommand", "green"},
                      {"grid", grid},
                      {"extent", extent},
                      {"escape_radius", params.escape_radius},
                      {"g_max", gmax}},
                 r.cfg);
    return 0;
}

int cmd_sample(const Run& r) {
    int n_points = require_int(r.cfg, "n_points", 1, 10000000);
    int burn_in = require_int(r.cfg, "burn_in", 1, 10000);
    auto s = sample_measure(r.map, n_points, burn_in, r.seed);
    write_points_csv(r.out, s.points);
    if (r.svg) write_svg(r.out, s.points);
    write_report(r.out,
                 json{{"subcommand", "sample"},
                      {"n_points", static_cast<int>(s.points.size())},
                      {"burn_in", burn_in}},
                 r.cfg);
    return 0;
}

int cmd_lyapunov(const Run& r) {
    int n_points = require_int(r.cfg, "n_points", 1, 10000000);
    int burn_in = require_int(r.cfg, "burn_in", 1, 10000);
    int m = require_int(r.cfg, "cocycle_length", 1, 10000);
    auto s = sample_measure(r.map, n_points, burn_in, r.seed);
    auto est = estimate_exponents(r.map, s, m);
    auto bounds = check_bounds(est, static_cast<int>(r.map.degree()), r.map.n());
    json rep = lyap_json(est);
    rep["subcommand"] = "lyapunov";
    rep["bounds"] = bounds_json(bounds);
    write_report(r.out, rep, r.cfg);
    return 0;
}

int cmd_dimension(const Run& r) {
    int n_points = require_int(r.cfg, "n_points", 2000, 10000000);
    int burn_in = require_int(r.cfg, "burn_in", 1, 10000);
    int m = require_int(r.cfg, "cocycle_length", 1, 10000);
    auto s = sample_measure(r.map, n_points, burn_in, r.seed);
    auto est = estimate_exponents(r.map, s, m);
    json rep = dimension_json(r, s, est);
    rep["subcommand"] = "dimension";
    write_points_csv(r.out, s.points);
    if (r.svg) write_svg(r.out, s.points);
    write_report(r.out, rep, r.cfg);
    return 0;
}

int cmd_verify_lemma1(const Run& r) {
    double eps = require_positive(r.cfg, "eps");
    int n_test = require_int(r.cfg, "n_test_points", 100, 1000000);
    Lemma1Config cfg(r.map, eps, n_test);
    CPoint x = parse_point(r.cfg, r.map.n());
    auto rep = verify_inverse_branch(r.map, x, cfg, r.seed);
    json out = verification_json(rep);
    out["subcommand"] = "verify-lemma1";
    write_report(r.out, out, r.cfg);
    return rep.pass ? 0 : 1;
}

int cmd_verify_lemma2(const Run& r) {
    double eps = require_positive(r.cfg, "eps");
    double radius = require_positive(r.cfg, "r");
    int m = require_int(r.cfg, "m", 1, 64);
    int n_points = require_int(r.cfg, "n_points", 1, 10000000);
    int burn_in = require_int(r.cfg, "burn_in", 1, 10000);
    int cl = require_int(r.cfg, "cocycle_length", 1, 10000);
    auto s = sample_measure(r.map, n_points, burn_in, r.seed);
    auto est = estimate_exponents(r.map, s, cl);
    OrbitWindow w = backward_orbit(r.map, m, r.seed + 1, burn_in);
    auto rep = verify_preimage_scaling(r.map, w, radius, eps, est, r.seed + 2);
    json out = verification_json(rep);
    out["subcommand"] = "verify-lemma2";
    write_report(r.out, out, r.cfg);
    return rep.pass ? 0 : 1;
}

int cmd_verify_covering(const Run& r) {
    double eps = require_positive(r.cfg, "eps");
    double r0 = require_positive(r.cfg, "r");
    int m_lo = require_int(r.cfg, "m_lo", 1, 12);
    int m_hi = require_int(r.cfg, "m_hi", 1, 12);
    int n_points = require_int(r.cfg, "n_points", 5000, 10000000);
    int burn_in = require_int(r.cfg, "burn_in", 1, 10000);
    int cl = require_int(r.cfg, "cocycle_length", 1, 10000);
    auto s = sample_measure(r.map, n_points, burn_in, r.seed);
    auto est = estimate_exponents(r.map, s, cl);
    auto rep = covering_statistics(r.map, s, m_lo, m_hi, r0, eps, est, r.seed + 1);
    json out = verification_json(rep);
    out["subcommand"] = "verify-covering";
    write_report(r.out, out, r.cfg);
    return rep.pass ? 0 : 1;
}

int cmd_run(const Run& r) {
    int n_points = require_int(r.cfg, "n_points", 2000, 10000000);
    int burn_in = require_int(r.cfg, "burn_in", 1, 10000);
    int m = require_int(r.cfg, "cocycle_length", 1, 10000);
    auto s = sample_measure(r.map, n_points, burn_in, r.seed);
    auto est = estimate_exponents(r.map, s, m);
    auto bounds = check_bounds(est, static_cast<int>(r.map.degree()), r.map.n());
    json rep{{"subcommand", "run"},
             {"lyapunov", lyap_json(est)},
             {"bounds", bounds_json(bounds)},
             {"dimension", dimension_json(r, s, est)}};
    write_points_csv(r.out, s.points);
    if (r.svg) write_svg(r.out, s.points);
    write_report(r.out, rep, r.cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmelab: maximal-entropy-measure laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_flag;
    std::uint64_t seed_flag = 0;
    int workers = 0;
    bool svg = false;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed_flag, "override the config seed");
    app.add_option("--workers", workers, "worker thread count (default: all cores)");
    app.add_option("--out", out_flag, "output directory (overrides config)");
    app.add_flag("--svg", svg, "also write an SVG scatter of the sample");

    const std::pair<const char*, int (*)(const Run&)> commands[] = {
        {"green", cmd_green},
        {"sample", cmd_sample},
        {"lyapunov", cmd_lyapunov},
        {"dimension", cmd_dimension},
        {"verify-lemma1", cmd_verify_lemma1},
        {"verify-lemma2", cmd_verify_lemma2},
        {"verify-covering", cmd_verify_covering},
        {"run", cmd_run},
    };
    for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    if (workers > 0) set_workers(workers);

    try {
        Run r{load_config(config_path), PolyMap::one_d(Poly1D({cx(0), cx(0), cx(1)})), 0, {},
              svg};
        try {
            r.map = build_map(r.cfg);
            if (!r.cfg.contains("seed") || !r.cfg["seed"].is_number())
                throw SchemaError("config key 'seed' must be a number");
            if (seed_opt->count() > 0) r.cfg["seed"] = seed_flag;
            if (!out_flag.empty()) r.cfg["out"] = out_flag;
            if (!r.cfg["out"].is_string()) throw SchemaError("config key 'out' must be a string");
            r.seed = r.cfg["seed"].get<std::uint64_t>();
            r.out = r.cfg["out"].get<std::string>();
        } catch (const json::exception& e) {
            throw SchemaError(e.what());
        }

        for (const auto& [name, fn] : commands)
            if (app.get_subcommand(name)->parsed()) return fn(r);
        return 2;
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    }
}
