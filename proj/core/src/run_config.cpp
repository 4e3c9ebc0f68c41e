#include "tvflow/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tvflow/field_io.hpp"
#include "tvflow/pgm.hpp"

namespace tvflow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, sep)) out.push_back(trim(tok));
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + s + "'");
    }
}

int to_int(const std::string& key, const std::string& s) {
    const double v = to_double(key, s);
    if (v != std::floor(v)) throw ConfigError("config key '" + key + "': not an integer");
    return static_cast<int>(v);
}

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return parse(kv);
}

RunConfig RunConfig::parse(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    std::map<std::string, std::string> rest = kv;
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = rest.find(key);
        if (it == rest.end()) return std::nullopt;
        std::string v = it->second;
        rest.erase(it);
        return v;
    };

    if (auto v = take("dim")) c.dim = to_int("dim", *v);
    if (c.dim != 1 && c.dim != 2) throw ConfigError("config key 'dim' must be 1 or 2");
    if (auto v = take("n")) {
        const auto parts = split(*v, ',');
        if (parts.empty() || parts.size() > 2) throw ConfigError("config key 'n': expected n1[,n2]");
        c.n[0] = to_int("n", parts[0]);
        if (parts.size() == 2) c.n[1] = to_int("n", parts[1]);
    }
    if (auto v = take("L")) {
        const auto parts = split(*v, ',');
        if (parts.empty() || parts.size() > 2) throw ConfigError("config key 'L': expected L1[,L2]");
        c.L[0] = to_double("L", parts[0]);
        if (parts.size() == 2) c.L[1] = to_double("L", parts[1]);
    }
    if (auto v = take("T")) c.T = to_double("T", *v);
    if (auto v = take("tau")) c.tau = to_double("tau", *v);
    if (auto v = take("eps")) c.eps = to_double("eps", *v);
    if (auto v = take("alpha")) c.alpha_spec = *v;
    if (auto v = take("beta"))
        c.beta_spec = *v;
    else
        throw ConfigError("missing required config key 'beta'");
    if (auto v = take("f")) c.f_spec = *v;
    if (auto v = take("u0")) c.u0_spec = *v;
    if (auto v = take("output-dir")) c.output_dir = *v;
    if (auto v = take("save-every")) c.save_every = to_int("save-every", *v);
    if (auto v = take("tol-rel")) c.tol_rel = to_double("tol-rel", *v);
    if (auto v = take("max-newton")) c.max_newton = to_int("max-newton", *v);
    if (auto v = take("eps-levels")) c.eps_levels = to_int("eps-levels", *v);
    if (auto v = take("tol-limit")) c.tol_limit = to_double("tol-limit", *v);
    if (auto v = take("seed")) c.seed = static_cast<std::uint64_t>(to_double("seed", *v));

    if (!rest.empty()) throw ConfigError("unknown config key '" + rest.begin()->first + "'");
    if (c.save_every < 1) throw ConfigError("config key 'save-every' must be >= 1");
    return c;
}

Grid RunConfig::build_grid() const {
    return dim == 1 ? Grid::line(n[0], L[0]) : Grid::rect(n[0], n[1], L[0], L[1]);
}

ScalarField edge_stop_alpha(const ScalarField& u0, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("edge-stop sigma must be > 0");
    // few Jacobi smoothing sweeps before taking the gradient magnitude
    ScalarField s = u0;
    for (int sweep = 0; sweep < 4; ++sweep) {
        const ScalarField lap = laplacian(s);
        const double h2 = std::pow(std::min(s.grid.h[0], s.grid.h[1]), 2);
        for (std::size_t j = 0; j < s.size(); ++j) s[j] += 0.2 * h2 * lap[j];
    }
    const VectorField g = gradient(s);
    ScalarField a(u0.grid);
    for (std::size_t j = 0; j < a.size(); ++j) {
        double m2 = g.comp[0][j] * g.comp[0][j];
        if (u0.grid.dim == 2) m2 += g.comp[1][j] * g.comp[1][j];
        a[j] = 1.0 / (1.0 + m2 / (sigma * sigma));
    }
    return a;
}

ScalarField field_from_image(const ImageDatum& img) {
    Grid g = img.height > 1
                 ? Grid::rect(img.width, img.height, 1.0,
                              static_cast<double>(img.height) / img.width)
                 : Grid::line(img.width, 1.0);
    ScalarField u(g);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            u[g.index(x, y)] = static_cast<double>(img.at(x, y)) / img.maxval;
    return u;
}

namespace {

ScalarField build_scalar(const Grid& grid, const std::string& key,
                         const std::string& spec, const ScalarField* u0) {
    if (spec.rfind("constant:", 0) == 0)
        return ScalarField(grid, to_double(key, spec.substr(9)));
    if (spec.rfind("file:", 0) == 0) {
        ScalarField f = read_field(spec.substr(5));
        if (f.grid != grid)
            throw ConfigError("config key '" + key + "': field file grid mismatch");
        return f;
    }
    if (key == "alpha" && spec.rfind("edge-stop:", 0) == 0) {
        if (!u0) throw ConfigError("edge-stop alpha requires u0");
        return edge_stop_alpha(*u0, to_double(key, spec.substr(10)));
    }
    throw ConfigError("config key '" + key + "': unrecognized spec '" + spec + "'");
}

ScalarField build_u0(const Grid& grid, const std::string& spec) {
    if (spec.rfind("file:", 0) == 0) {
        ScalarField f = read_field(spec.substr(5));
        if (f.grid != grid) throw ConfigError("config key 'u0': field file grid mismatch");
        return f;
    }
    if (spec == "preset:step") {
        ScalarField u(grid);
        for (int iy = 0; iy < grid.n[1]; ++iy)
            for (int ix = 0; ix < grid.n[0]; ++ix)
                u[grid.index(ix, iy)] = (ix + 0.5) * grid.h[0] < grid.extent[0] / 2 ? 1.0 : 0.0;
        return u;
    }
    if (spec == "preset:sine") {
        // Neumann-compatible cosine mode
        ScalarField u(grid);
        for (int iy = 0; iy < grid.n[1]; ++iy)
            for (int ix = 0; ix < grid.n[0]; ++ix) {
                double v = std::cos(M_PI * (ix + 0.5) * grid.h[0] / grid.extent[0]);
                if (grid.dim == 2)
                    v *= std::cos(M_PI * (iy + 0.5) * grid.h[1] / grid.extent[1]);
                u[grid.index(ix, iy)] = v;
            }
        return u;
    }
    if (spec.rfind("preset:image:", 0) == 0) {
        const ScalarField u = field_from_image(read_pgm(spec.substr(13)));
        if (u.grid != grid)
            throw ConfigError("config key 'u0': image dimensions do not match n");
        return u;
    }
    throw ConfigError("config key 'u0': unrecognized spec '" + spec + "'");
}

Forcing build_forcing(const Grid& grid, const std::string& spec, double T) {
    if (spec == "zero") return Forcing::zero();
    if (spec.rfind("constant:", 0) == 0)
        return Forcing::constant_in_time(ScalarField(grid, to_double("f", spec.substr(9))));
    if (spec.rfind("file:", 0) == 0) {
        ScalarField f = read_field(spec.substr(5));
        if (f.grid != grid) throw ConfigError("config key 'f': field file grid mismatch");
        return Forcing::constant_in_time(std::move(f));
    }
    if (spec.rfind("file-sequence:", 0) == 0) {
        const auto paths = split(spec.substr(14), ',');
        if (paths.empty()) throw ConfigError("config key 'f': empty file sequence");
        std::vector<ScalarField> samples;
        for (const auto& p : paths) {
            samples.push_back(read_field(p));
            if (samples.back().grid != grid)
                throw ConfigError("config key 'f': field file grid mismatch in " + p);
        }
        return Forcing::sampled(std::move(samples), T / static_cast<double>(paths.size()));
    }
    throw ConfigError("config key 'f': unrecognized spec '" + spec + "'");
}

}  // namespace

FlowProblem RunConfig::build_problem() const {
    FlowProblem p;
    p.grid = build_grid();
    p.u0 = build_u0(p.grid, u0_spec);
    p.alpha = build_scalar(p.grid, "alpha", alpha_spec, &p.u0);
    p.beta = build_scalar(p.grid, "beta", beta_spec, nullptr);
    p.f = build_forcing(p.grid, f_spec, T);
    p.T = T;
    p.tau = tau;
    p.eps = Epsilon(eps);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

SolverConfig RunConfig::build_solver() const {
    SolverConfig s;
    s.tol_rel = tol_rel;
    s.max_newton = max_newton;
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

}  // namespace tvflow
