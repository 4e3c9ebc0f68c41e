#ifndef TVFLOW_RUN_CONFIG_HPP
#define TVFLOW_RUN_CONFIG_HPP

#include <map>
#include <string>

#include "tvflow/flow.hpp"

namespace tvflow {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Textual run configuration: UTF-8 `key = value` lines, `#` comments.
///
/// Keys: dim, n, L, T, tau, eps, alpha, beta, f, u0, output-dir, save-every,
/// tol-rel, max-newton, eps-levels, tol-limit, seed.
/// Field specs: alpha/beta accept `constant:<c>` or `file:<path>`, alpha also
/// `edge-stop:<sigma>`; f accepts `zero`, `constant:<c>`, `file:<path>` or
/// `file-sequence:<p1>,<p2>,...`; u0 accepts `file:<path>`, `preset:step`,
/// `preset:sine`, or `preset:image:<path>`.
struct RunConfig {
    int dim = 1;
    std::array<int, 2> n{16, 1};
    std::array<double, 2> L{1.0, 1.0};
    double T = 1.0;
    double tau = 0.1;
    double eps = 1.0;
    std::string alpha_spec = "constant:1";
    std::string beta_spec;  // required, no default
    std::string f_spec = "zero";
    std::string u0_spec = "preset:step";
    std::string output_dir = "out";
    int save_every = 1;
    double tol_rel = 1e-10;
    int max_newton = 100;
    int eps_levels = 12;       // continuation depth for eps = 0 runs
    double tol_limit = 1e-4;   // continuation stopping gap
    std::uint64_t seed = 0;

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse(const std::map<std::string, std::string>& kv);

    Grid build_grid() const;
    FlowProblem build_problem() const;
    SolverConfig build_solver() const;
};

/// Edge-stopping weight 1/(1 + |grad(smoothed u0)|^2 / sigma^2).
ScalarField edge_stop_alpha(const ScalarField& u0, double sigma);

/// Image pixels rescaled to [0,1] as a cell-centered field on a unit-width grid.
ScalarField field_from_image(const struct ImageDatum& img);

}  // namespace tvflow

#endif
