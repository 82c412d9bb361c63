// zgv: scan, sweep, refine and cross-check ZGV points from the command line.
//
// Exit codes: 0 success (possibly zero points), 2 input error, 3 numerical failure.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zgv/io.hpp"
#include "zgv/refine.hpp"
#include "zgv/scanner.hpp"
#include "zgv/waveguide.hpp"

namespace {

using namespace zgv;

struct InputArgs {
    std::string l0, l1, l2, m;
    std::string model;
    std::string material;
    int order = 12;
    int elements = 1;
    std::string polarization = "inplane";
    std::string bc = "free_free";
};

struct RangeArgs {
    std::optional<double> k_min, k_max, dk;
    int k_steps = 201;
};

void add_input_options(CLI::App* cmd, InputArgs& in) {
    cmd->add_option("--l0", in.l0, "MatrixMarket file of L0");
    cmd->add_option("--l1", in.l1, "MatrixMarket file of L1");
    cmd->add_option("--l2", in.l2, "MatrixMarket file of L2");
    cmd->add_option("--m", in.m, "MatrixMarket file of M");
    cmd->add_option("--model", in.model, "built-in model")->check(CLI::IsMember({"example21", "plate"}));
    cmd->add_option("--material", in.material, "material file for --model plate");
    cmd->add_option("--order", in.order, "polynomial order of the plate elements")->check(CLI::Range(1, 64));
    cmd->add_option("--elements", in.elements, "number of plate elements")->check(CLI::Range(1, 1000));
    cmd->add_option("--polarization", in.polarization, "plate displacement components")
        ->check(CLI::IsMember({"inplane", "full"}));
    cmd->add_option("--bc", in.bc, "plate boundary conditions")
        ->check(CLI::IsMember({"free_free", "clamped_free", "clamped_clamped"}));
}

void add_range_options(CLI::App* cmd, RangeArgs& r) {
    cmd->add_option("--k-min", r.k_min, "lower end of the wavenumber interval");
    cmd->add_option("--k-max", r.k_max, "upper end of the wavenumber interval");
}

struct Problem {
    QuadraticPencil pencil;
    nlohmann::json inputs;
    double k_min = 0.0, k_max = 0.0, dk = 0.0; // model defaults
    bool has_defaults = false;
};

Problem load_problem(const InputArgs& in) {
    Problem p;
    const bool files = !in.l0.empty() || !in.l1.empty() || !in.l2.empty() || !in.m.empty();
    if (files == !in.model.empty()) {
        throw InputError("give either --l0/--l1/--l2/--m or --model");
    }
    if (files) {
        if (in.l0.empty() || in.l1.empty() || in.l2.empty() || in.m.empty()) {
            throw InputError("all four of --l0, --l1, --l2, --m are required");
        }
        p.pencil = load_pencil(in.l0, in.l1, in.l2, in.m);
        p.inputs = {{"l0", in.l0}, {"l1", in.l1}, {"l2", in.l2}, {"m", in.m}};
        return p;
    }
    if (in.model == "example21") {
        p.pencil = example21();
        p.inputs = {{"model", "example21"}};
        p.k_min = 0.05;
        p.k_max = 2.0;
        p.dk = 0.1;
        p.has_defaults = true;
        return p;
    }
    if (in.material.empty()) {
        throw InputError("--model plate needs --material");
    }
    const PlateMaterial mat = read_material(in.material);
    Discretization disc;
    disc.order = in.order;
    disc.elements = in.elements;
    disc.polarization = in.polarization == "full" ? Polarization::full : Polarization::in_plane;
    disc.bc = in.bc == "clamped_free"      ? PlateBoundary::clamped_free
              : in.bc == "clamped_clamped" ? PlateBoundary::clamped_clamped
                                           : PlateBoundary::free_free;
    p.pencil = assemble_plate(mat, disc);
    p.inputs = {{"model", "plate"},         {"material", in.material}, {"order", in.order},
                {"elements", in.elements},  {"polarization", in.polarization}, {"bc", in.bc}};
    p.k_min = 0.1 / mat.h;
    p.k_max = 6.0 / mat.h;
    p.dk = 0.1 / mat.h;
    p.has_defaults = true;
    return p;
}

void resolve_range(const Problem& p, RangeArgs& r) {
    if (!r.k_min) {
        if (!p.has_defaults) {
            throw InputError("--k-min is required for pencils read from files");
        }
        r.k_min = p.k_min;
    }
    if (!r.k_max) {
        if (!p.has_defaults) {
            throw InputError("--k-max is required for pencils read from files");
        }
        r.k_max = p.k_max;
    }
    if (!(*r.k_min < *r.k_max)) {
        throw InputError("--k-min must be smaller than --k-max");
    }
    if (!r.dk) {
        r.dk = p.has_defaults ? p.dk : (*r.k_max - *r.k_min) / 20.0;
    }
    if (!(*r.dk > 0.0)) {
        throw InputError("--dk must be positive");
    }
}

RunManifest manifest_for(const std::string& command, const std::vector<std::string>& args,
                         const Problem& p) {
    RunManifest m;
    m.command = command;
    m.arguments = args;
    m.inputs = p.inputs;
    m.timestamp = utc_timestamp();
    return m;
}

void print_points(const std::vector<ZgvPoint>& points) {
    for (const auto& p : points) {
        std::cout << to_string(p.classification) << "  k = " << format_double(p.k)
                  << "  omega = " << format_double(p.omega) << "  residual = " << format_double(p.residual)
                  << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-group-velocity points of quadratic waveguide pencils"};
    app.require_subcommand(1);
    std::vector<std::string> args(argv + 1, argv + argc);

    InputArgs in;
    RangeArgs range;
    std::string out = "zgv";
    int num_eigs = 8;
    double delta = 1e-2;
    int threads = 1;
    double k0 = 0.0, omega0 = 0.0;

    CLI::App* scan_cmd = app.add_subcommand("scan", "scan a wavenumber interval for ZGV points");
    add_input_options(scan_cmd, in);
    add_range_options(scan_cmd, range);
    scan_cmd->add_option("--dk", range.dk, "default target step");
    scan_cmd->add_option("--num-eigs", num_eigs, "eigenvalues per target")->check(CLI::Range(1, 1000));
    scan_cmd->add_option("--delta", delta, "relative distance of the MFRD problem")
        ->check(CLI::PositiveNumber);
    scan_cmd->add_option("--threads", threads, "scan disjoint sub-intervals concurrently")
        ->check(CLI::Range(1, 256));
    scan_cmd->add_option("--out", out, "output prefix");

    CLI::App* disperse_cmd = app.add_subcommand("disperse", "sample the dispersion curves");
    add_input_options(disperse_cmd, in);
    add_range_options(disperse_cmd, range);
    disperse_cmd->add_option("--k-steps", range.k_steps, "number of grid points")->check(CLI::Range(1, 10000000));
    disperse_cmd->add_option("--out", out, "output prefix");

    CLI::App* refine_cmd = app.add_subcommand("refine", "refine a single candidate by Gauss-Newton");
    add_input_options(refine_cmd, in);
    refine_cmd->add_option("--k0", k0, "initial wavenumber")->required();
    refine_cmd->add_option("--omega0", omega0, "initial angular frequency")->required();
    refine_cmd->add_option("--out", out, "output prefix");

    CLI::App* oracle_cmd = app.add_subcommand("oracle", "locate ZGV points on a sampled dispersion grid");
    add_input_options(oracle_cmd, in);
    add_range_options(oracle_cmd, range);
    oracle_cmd->add_option("--k-steps", range.k_steps, "number of grid points")->check(CLI::Range(4, 10000000));
    oracle_cmd->add_option("--out", out, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const Problem problem = load_problem(in);
        const QuadraticPencil& pencil = problem.pencil;

        if (scan_cmd->parsed()) {
            resolve_range(problem, range);
            ScanConfig cfg;
            cfg.k_a = *range.k_min;
            cfg.k_b = *range.k_max;
            cfg.dk = *range.dk;
            cfg.delta = delta;
            cfg.arnoldi.m = num_eigs;
            cfg.threads = threads;
            const ScanResult res = scan(pencil, cfg);

            RunManifest man = manifest_for("scan", args, problem);
            man.seed = cfg.arnoldi.seed;
            man.config = {{"k_min", cfg.k_a},          {"k_max", cfg.k_b},
                          {"dk", cfg.dk},              {"num_eigs", num_eigs},
                          {"delta", cfg.delta},        {"threads", cfg.threads},
                          {"arnoldi_subspace", cfg.arnoldi.subspace()},
                          {"arnoldi_max_restarts", cfg.arnoldi.max_restarts},
                          {"arnoldi_tol", cfg.arnoldi.tol},
                          {"prefilter_real", cfg.prefilter_real},
                          {"prefilter_imag", cfg.prefilter_imag},
                          {"newton_maxit", cfg.newton_maxit},
                          {"newton_restarts", cfg.newton_restarts},
                          {"dedup_tol", cfg.dedup_tol},
                          {"k_zero", cfg.k_zero},
                          {"balance", cfg.balance},
                          {"include_trivial", cfg.include_trivial}};
            emit_results(res.points, std::nullopt, out, man);

            print_points(res.points);
            std::vector<ZgvPoint> crossings;
            for (const auto& rec : res.log) {
                for (const auto& a : rec.attempts) {
                    if (a.converged && a.point.classification == Classification::crossing) {
                        crossings.push_back(a.point);
                    }
                }
            }
            // crossings are diagnostics only; they never enter the CSV
            print_points(deduplicate(std::move(crossings), cfg.dedup_tol, cfg.k_b));
            std::cerr << res.targets.size() << " targets, " << res.log.size() << " candidates, "
                      << res.prefiltered << " filtered, " << res.failures.size() << " target failures\n";
            for (const auto& f : res.failures) {
                std::cerr << "  " << f << '\n';
            }
            return 0;
        }

        if (disperse_cmd->parsed() || oracle_cmd->parsed()) {
            resolve_range(problem, range);
            const auto grid_k = linspace(*range.k_min, *range.k_max, static_cast<std::size_t>(range.k_steps));
            RunManifest man = manifest_for(disperse_cmd->parsed() ? "disperse" : "oracle", args, problem);
            man.config = {{"k_min", *range.k_min}, {"k_max", *range.k_max}, {"k_steps", range.k_steps}};
            if (disperse_cmd->parsed()) {
                emit_results({}, dispersion_sweep(pencil, grid_k), out, man);
                std::cout << "wrote " << out << "_dispersion.csv\n";
                return 0;
            }
            std::vector<ZgvPoint> points;
            for (const auto& o : zgv_oracle(pencil, grid_k)) {
                ZgvPoint p;
                p.k = o.k;
                p.omega = o.omega;
                p.classification = Classification::zgv;
                p.residual = smallest_singular_triplets(evaluate_W(pencil, o.k, o.omega), 1).front().sigma;
                p.omega_gap = omega_gap(pencil, o.k, o.omega);
                points.push_back(std::move(p));
            }
            emit_results(points, std::nullopt, out, man);
            print_points(points);
            return 0;
        }

        // refine
        RefineOptions ropts;
        const cplx lambda0(0.0, k0);
        const cplx mu0(omega0 * omega0, 0.0);
        const auto attempts = refine_candidate(pencil, lambda0, mu0, ropts);
        RunManifest man = manifest_for("refine", args, problem);
        man.seed = ropts.seed;
        man.config = {{"k0", k0}, {"omega0", omega0}, {"maxit", ropts.maxit}, {"restarts", ropts.restarts}};
        std::vector<ZgvPoint> points;
        for (const auto& a : attempts) {
            if (!a.converged) {
                std::cerr << "attempt failed: " << a.message << '\n';
            }
        }
        if (!attempts.empty() && attempts.back().converged) {
            points.push_back(attempts.back().point);
        }
        emit_results(points, std::nullopt, out, man);
        if (points.empty()) {
            std::cerr << "Gauss-Newton did not converge from (" << k0 << ", " << omega0 << ")\n";
            return 3;
        }
        print_points(points);
        return 0;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
}
