// percond: batch front end for periodic two-phase conductivity runs.
//
// Subcommands:
//   solve    one eps: writes result.json and fields.csv
//   sweep    eps grid: writes sweep.csv, fit.json, orders.json, plot.gp
//   validate identity suite: writes validate.json, exit 1 on any failure
//
// Exit codes: 0 success, 1 validation failure, 2 config error, 3 numerical
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "percond/checks.hpp"
#include "percond/config.hpp"
#include "percond/continuation.hpp"
#include "percond/effective.hpp"
#include "percond/errors.hpp"
#include "percond/output.hpp"
#include "percond/parallel.hpp"

namespace {

using nlohmann::json;
using namespace percond;

json matrix_json(const Eigen::Matrix2d& m) {
    return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})});
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& out_override,
                               const std::string& name) {
    const std::string dir = out_override.empty() ? cfg.out_dir : out_override;
    return std::filesystem::path(dir) / name;
}

struct ProbeRow {
    int j;
    Vec2 x;
    char region; // '+' inclusion, '-' matrix
    double u;
    Vec2 grad;
};

std::vector<ProbeRow> sample_fields(const RunConfig& cfg, const Instance& inst, Vec2 p,
                                    double eps) {
    const BoundaryOperators ops = make_boundary_operators(inst.geometry);
    std::vector<ProbeRow> rows;
    for (int j : cfg.directions) {
        ProblemData pd = inst.problem;
        pd.direction = j;
        const EpsSolution sol = solve_eps(pd, inst.evaluator, p, eps, ops);
        std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(j));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double margin = 0.02 * std::min(inst.cell.q(0), inst.cell.q(1));
        int n_ext = 0;
        while (n_ext < 14) {
            const Vec2 x{margin + u01(rng) * (inst.cell.q(0) - 2 * margin),
                         margin + u01(rng) * (inst.cell.q(1) - 2 * margin)};
            if (inst.geometry.spec.contains((x - p) / eps, 1.4)) continue;
            ++n_ext;
            rows.push_back({j, x, '-', sol.u_minus(x), sol.grad_u_minus(x)});
        }
        int n_int = 0;
        while (n_int < 6) {
            const double t = 2.0 * std::numbers::pi * u01(rng);
            const double r = 0.7 * std::sqrt(u01(rng));
            const Vec2 x = p + (eps * r) * inst.geometry.spec.point(t);
            ++n_int;
            rows.push_back({j, x, '+', sol.u_plus(x), sol.grad_u_plus(x)});
        }
    }
    return rows;
}

std::string fields_csv(const std::vector<ProbeRow>& rows) {
    std::ostringstream os;
    os << csv_schema_header() << "\n";
    os << "j,x1,x2,region,u,du1,du2\n";
    for (const ProbeRow& r : rows) {
        os << r.j << ',' << format_double(r.x.x) << ',' << format_double(r.x.y) << ','
           << r.region << ',' << format_double(r.u) << ',' << format_double(r.grad.x)
           << ',' << format_double(r.grad.y) << "\n";
    }
    return os.str();
}

int cmd_solve(const RunConfig& cfg, const std::string& out_override) {
    if (!cfg.eps)
        throw config_error("solve: config must set a single \"eps\"");
    const Instance inst = make_instance(cfg);
    const Vec2 p = cfg.center();
    const double eps = *cfg.eps;
    // Surfaces the containment constraint as a config error before any solve.
    validate_scaled(p, eps, inst.geometry, inst.cell);

    const BoundaryOperators ops = make_boundary_operators(inst.geometry);
    const EffectiveResult res =
        lambda_eff(inst.problem, inst.evaluator, p, eps, cfg.directions, ops);

    json out;
    out["schema"] = "percond-result v1";
    out["config_fingerprint"] = cfg.fingerprint;
    out["eps"] = res.eps;
    out["eps_prime"] = res.eps_prime;
    out["lambda_eff"] = matrix_json(res.lambda_eff);
    out["Lambda"] = matrix_json(res.Lambda);
    out["Lambda_plus"] = matrix_json(res.Lambda_plus);
    out["Lambda_minus"] = matrix_json(res.Lambda_minus);
    out["f_term"] = matrix_json(res.f_term);
    out["directions"] = cfg.directions;
    json conds = json::array(), mults = json::array(), densities = json::object();
    for (int j : cfg.directions) {
        conds.push_back(res.cond[static_cast<std::size_t>(j - 1)]);
        mults.push_back(res.max_multiplier[static_cast<std::size_t>(j - 1)]);
        ProblemData pd = inst.problem;
        pd.direction = j;
        const EpsSolution sol = solve_eps(pd, inst.evaluator, p, eps, ops);
        json d;
        d["theta_i"] = vector_json(sol.theta_i.values);
        d["theta_o"] = vector_json(sol.theta_o.values);
        d["C_minus"] = sol.C_minus;
        densities["j" + std::to_string(j)] = std::move(d);
    }
    out["condition_numbers"] = conds;
    out["max_multipliers"] = mults;
    out["densities"] = densities;

    atomic_write_text(out_path(cfg, out_override, "result.json").string(), out.dump(2) + "\n");
    atomic_write_text(out_path(cfg, out_override, "fields.csv").string(),
                      fields_csv(sample_fields(cfg, inst, p, eps)));
    return 0;
}

std::string sweep_csv(const SweepRecord& rec) {
    std::ostringstream os;
    os << csv_schema_header() << "\n";
    os << "eps,eps_prime,k,j,lambda_eff,Lambda,Lambda_plus,Lambda_minus,f_term\n";
    for (const SweepEntry& e : rec.entries) {
        if (!e.ok) continue;
        for (int k = 1; k <= 2; ++k) {
            for (int j : rec.directions) {
                const EffectiveResult& r = e.result;
                os << format_double(e.eps) << ',' << format_double(r.eps_prime) << ',' << k
                   << ',' << j << ',' << format_double(r.lambda_eff(k - 1, j - 1)) << ','
                   << format_double(r.Lambda(k - 1, j - 1)) << ','
                   << format_double(r.Lambda_plus(k - 1, j - 1)) << ','
                   << format_double(r.Lambda_minus(k - 1, j - 1)) << ','
                   << format_double(r.f_term(k - 1, j - 1)) << "\n";
            }
        }
    }
    return os.str();
}

std::string plot_script() {
    std::ostringstream os;
    os << "# gnuplot script generated by percond sweep\n"
          "set datafile separator ','\n"
          "set key outside\n"
          "set terminal pngcairo size 1200,500\n"
          "set output 'lambda_eff.png'\n"
          "set multiplot layout 1,2\n"
          "set title 'effective conductivity vs eps'\n"
          "set xlabel 'eps'\nset ylabel 'lambda_eff'\n"
          "plot 'sweep.csv' using ($3==1&&$4==1?$1:1/0):5 w lp t 'k=j=1', \\\n"
          "     'sweep.csv' using ($3==2&&$4==2?$1:1/0):5 w lp t 'k=j=2'\n"
          "set title 'remainder |lambda_eff - lambda^- - eps^2 Lambda0|'\n"
          "set logscale xy\nset xlabel 'eps'\nset ylabel 'remainder'\n"
          "plot 'remainder.csv' using 1:2 w lp t 'k=j=1'\n"
          "unset multiplot\n";
    return os.str();
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_override) {
    const Instance inst = make_instance(cfg);
    const Vec2 p = cfg.center();
    const std::vector<double> grid = cfg.eps_grid ? *cfg.eps_grid : default_eps_grid();
    if (grid.empty()) throw config_error("sweep: empty eps grid");

    const BoundaryOperators ops = make_boundary_operators(inst.geometry);
    const SweepRecord rec =
        sweep(inst.problem, inst.evaluator, p, grid, cfg.directions, ops, cfg.fingerprint);

    atomic_write_text(out_path(cfg, out_override, "sweep.csv").string(), sweep_csv(rec));

    // Reference limit for fits and order estimates.
    std::array<bool, 2> has{};
    const Eigen::Matrix2d L0 = lambda_limit(inst.problem, cfg.directions, ops, &has);

    json fits = json::object();
    fits["fingerprint"] = rec.fingerprint;
    json fit_entries = json::array();
    for (int j : cfg.directions) {
        for (int k = 1; k <= 2; ++k) {
            json fj;
            fj["k"] = k;
            fj["j"] = j;
            try {
                const SeriesFit fit = fit_series(rec, k, j, cfg.fit_degree);
                fj["degree"] = fit.degree;
                fj["coeffs"] = fit.coeffs;
                fj["residual_rms"] = fit.residual_rms;
                fj["a0_stderr"] = fit.a0_stderr;
                fj["cond"] = fit.cond;
                fj["eps_range"] = {fit.eps_min, fit.eps_max};
                fj["a0"] = fit.a0();
                fj["limit_reference"] = L0(k - 1, j - 1);
                fj["a0_minus_limit"] = fit.a0() - L0(k - 1, j - 1);
            } catch (const std::exception& ex) {
                fj["error"] = ex.what();
            }
            fit_entries.push_back(std::move(fj));
        }
    }
    fits["fits"] = fit_entries;
    atomic_write_text(out_path(cfg, out_override, "fit.json").string(), fits.dump(2) + "\n");

    json orders = json::object();
    json order_entries = json::array();
    std::ostringstream remcsv;
    remcsv << "# remainder table for plot.gp\n";
    for (int j : cfg.directions) {
        for (int k = 1; k <= 2; ++k) {
            const OrderEstimate est =
                order_estimate(rec, inst.problem.lambda_minus, L0(k - 1, j - 1), k, j);
            json oj;
            oj["k"] = k;
            oj["j"] = j;
            oj["slope"] = est.slope;
            oj["saturated"] = est.saturated;
            oj["points_used"] = est.points_used;
            oj["limit_reference"] = L0(k - 1, j - 1);
            order_entries.push_back(std::move(oj));
            if (k == 1 && j == 1) {
                for (std::size_t i = 0; i < est.eps_used.size(); ++i)
                    remcsv << format_double(est.eps_used[i]) << ','
                           << format_double(est.remainders[i]) << "\n";
            }
        }
    }
    orders["orders"] = order_entries;
    json errs = json::array();
    for (const SweepEntry& e : rec.entries) {
        if (e.ok) continue;
        json ej;
        ej["eps"] = e.eps;
        ej["error"] = e.error;
        errs.push_back(std::move(ej));
    }
    orders["errors"] = errs;
    atomic_write_text(out_path(cfg, out_override, "orders.json").string(),
                      orders.dump(2) + "\n");
    atomic_write_text(out_path(cfg, out_override, "remainder.csv").string(), remcsv.str());
    atomic_write_text(out_path(cfg, out_override, "plot.gp").string(), plot_script());
    return 0;
}

int cmd_validate(const RunConfig& cfg, const std::string& out_override) {
    const Instance inst = make_instance(cfg);
    const std::vector<CheckResult> checks = run_validation_suite(cfg, inst);
    json out;
    out["schema"] = "percond-validate v1";
    json arr = json::array();
    bool all_pass = true;
    for (const CheckResult& c : checks) {
        json cj;
        cj["name"] = c.name;
        cj["residual"] = c.residual;
        cj["tolerance"] = c.tolerance;
        cj["pass"] = c.pass;
        if (!c.detail.empty()) cj["detail"] = c.detail;
        arr.push_back(std::move(cj));
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
                  << "  residual=" << format_double(c.residual)
                  << " tol=" << format_double(c.tolerance) << "\n";
        all_pass = all_pass && c.pass;
    }
    out["checks"] = arr;
    out["all_pass"] = all_pass;
    atomic_write_text(out_path(cfg, out_override, "validate.json").string(),
                      out.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"percond: effective conductivity of periodic two-phase composites "
                 "with interfacial resistance"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (overrides PERCOND_JOBS)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_override, "output directory (overrides config)");
        sub->fallthrough(); // lets --jobs appear after the subcommand
    };
    CLI::App* solve = app.add_subcommand("solve", "single-eps solve");
    CLI::App* sweepc = app.add_subcommand("sweep", "eps sweep with series fit");
    CLI::App* validate = app.add_subcommand("validate", "identity suite");
    add_common(solve);
    add_common(sweepc);
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    if (jobs > 0) percond::set_jobs(jobs);
    percond::init_jobs_from_env(); // PERCOND_JOBS takes precedence over --jobs

    try {
        const percond::RunConfig cfg = percond::load_config(config_path);
        if (solve->parsed()) return cmd_solve(cfg, out_override);
        if (sweepc->parsed()) return cmd_sweep(cfg, out_override);
        if (validate->parsed()) return cmd_validate(cfg, out_override);
        return 2;
    } catch (const percond::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const percond::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
