// Command-line surface over the dead-core solver library.
//
// Subcommands: solve, theorem2, sweep, classify, certify, export-trajectory.
// All state flows through flags or an optional manifest file (flags win);
// the effective configuration is echoed to <outdir>/manifest.json so any run
// can be replayed exactly with --manifest.  Outputs are deterministic:
// identical configuration produces byte-identical files.
//
// Exit codes: 0 success, 1 invalid regime or arguments, 2 numerical failure
// (bracketing, integration), 3 at least one certificate failed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <deadcore/deadcore.hpp>
#include <deadcore/io.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// One flat bag of options shared by every subcommand, mirroring the
/// manifest schema.  Option handles are kept so manifest values fill only
/// the fields not set on the command line.
struct Config {
    double m = 0, q = 0, N = 0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double event_tol = 1e-10;
    double bracket_tol = 1e-8;
    double richardson_tol = 1e-6;
    double eps = deadcore::seed_eps_default;
    double span = 400.0;
    std::string outdir = "out";
    std::string format = "csv";
    std::string manifest;

    // Command-specific extras (serialized into the manifest when used).
    double beta = 0;      // theorem2
    double k_lo = 0;      // sweep/classify grid
    double k_hi = 0;
    int points = 32;
    std::string orbit;    // export-trajectory
    double K = 0;

};

void add_common_options(CLI::App* cmd, Config& c) {
    cmd->add_option("--m", c.m, "diffusion exponent (> 1)");
    cmd->add_option("--q", c.q, "absorption exponent (in (0,1), with m + q > 2)");
    cmd->add_option("--N", c.N, "spatial dimension (>= 1, real-valued)");
    cmd->add_option("--rtol", c.rtol, "integrator relative tolerance");
    cmd->add_option("--atol", c.atol, "integrator absolute tolerance");
    cmd->add_option("--event-tol", c.event_tol, "event location tolerance");
    cmd->add_option("--bracket-tol", c.bracket_tol,
                    "relative width target of the coupling brackets");
    cmd->add_option("--richardson-tol", c.richardson_tol, "seed-halving agreement tolerance");
    cmd->add_option("--eps", c.eps, "manifold seed offset");
    cmd->add_option("--span", c.span, "trajectory-time budget per shot");
    cmd->add_option("--outdir", c.outdir, "output directory");
    cmd->add_option("--format", c.format, "profile serialization: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--manifest", c.manifest,
                    "manifest file supplying defaults for flags not given here");
}

/// Fill fields the active subcommand did not receive on the command line
/// from the manifest file (explicit flags always win).
void merge_manifest(Config& c, const CLI::App* sub) {
    if (c.manifest.empty()) return;
    std::ifstream in(c.manifest);
    if (!in) throw std::invalid_argument("cannot open manifest " + c.manifest);
    json man = json::parse(in);
    auto pull = [&](const char* key, const char* flag, auto& field) {
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (opt && opt->count() > 0) return;  // given explicitly
        if (man.contains(key)) field = man.at(key).get<std::decay_t<decltype(field)>>();
    };
    pull("m", "--m", c.m);
    pull("q", "--q", c.q);
    pull("N", "--N", c.N);
    pull("rtol", "--rtol", c.rtol);
    pull("atol", "--atol", c.atol);
    pull("event_tol", "--event-tol", c.event_tol);
    pull("bracket_tol", "--bracket-tol", c.bracket_tol);
    pull("richardson_tol", "--richardson-tol", c.richardson_tol);
    pull("eps", "--eps", c.eps);
    pull("span", "--span", c.span);
    pull("format", "--format", c.format);
    pull("beta", "--beta", c.beta);
    pull("k_lo", "--k-lo", c.k_lo);
    pull("k_hi", "--k-hi", c.k_hi);
    pull("points", "--points", c.points);
    pull("orbit", "--orbit", c.orbit);
    pull("K", "--K", c.K);
}

/// Echo the effective configuration (manifest schema, fixed key order,
/// 17 significant digits) so the run can be replayed with --manifest.
void write_manifest(const fs::path& path, const Config& c, const std::string& command) {
    std::ofstream os(path);
    os << "{\n";
    os << "  \"command\": " << deadcore::io::json_str(command) << ",\n";
    os << "  \"m\": " << deadcore::io::json_num(c.m) << ",\n";
    os << "  \"q\": " << deadcore::io::json_num(c.q) << ",\n";
    os << "  \"N\": " << deadcore::io::json_num(c.N) << ",\n";
    os << "  \"rtol\": " << deadcore::io::json_num(c.rtol) << ",\n";
    os << "  \"atol\": " << deadcore::io::json_num(c.atol) << ",\n";
    os << "  \"event_tol\": " << deadcore::io::json_num(c.event_tol) << ",\n";
    os << "  \"bracket_tol\": " << deadcore::io::json_num(c.bracket_tol) << ",\n";
    os << "  \"richardson_tol\": " << deadcore::io::json_num(c.richardson_tol) << ",\n";
    os << "  \"eps\": " << deadcore::io::json_num(c.eps) << ",\n";
    os << "  \"span\": " << deadcore::io::json_num(c.span) << ",\n";
    os << "  \"format\": " << deadcore::io::json_str(c.format);
    if (command == "theorem2") os << ",\n  \"beta\": " << deadcore::io::json_num(c.beta);
    if (command == "sweep" || command == "classify") {
        os << ",\n  \"k_lo\": " << deadcore::io::json_num(c.k_lo);
        os << ",\n  \"k_hi\": " << deadcore::io::json_num(c.k_hi);
        os << ",\n  \"points\": " << c.points;
    }
    if (command == "export-trajectory") {
        os << ",\n  \"orbit\": " << deadcore::io::json_str(c.orbit);
        os << ",\n  \"K\": " << deadcore::io::json_num(c.K);
    }
    os << "\n}\n";
}

deadcore::ShootConfig shoot_config(const Config& c) {
    deadcore::ShootConfig s;
    s.eps = c.eps;
    s.richardson_tol = c.richardson_tol;
    s.span = c.span;
    s.stop.max_span = c.span;
    s.integ.rtol = c.rtol;
    s.integ.atol = c.atol;
    s.integ.event_zeta_tol = c.event_tol;
    return s;
}

deadcore::SolveConfig solve_config(const Config& c) {
    deadcore::SolveConfig s;
    s.bracket_tol = c.bracket_tol;
    s.shoot = shoot_config(c);
    // The physical-variable oracle keeps its own pinned tolerances: it is the
    // anti-circularity check and must not loosen with the main solve.
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    os << text;
}

template <class Writer>
void write_with(const fs::path& path, Writer&& w) {
    std::ofstream os(path);
    w(os);
}

std::string bracket_str(const deadcore::ThresholdBracket& b) {
    return "[" + deadcore::io::num(b.lo, 12) + ", " + deadcore::io::num(b.hi, 12) + "]";
}

struct CertTally {
    int pass = 0, fail = 0, skipped = 0;
};

CertTally tally(const std::vector<deadcore::Certificate>& certs) {
    CertTally t;
    for (const auto& c : certs) {
        if (c.status == deadcore::CertStatus::Pass) ++t.pass;
        else if (c.status == deadcore::CertStatus::Fail) ++t.fail;
        else ++t.skipped;
    }
    return t;
}

void print_tally(const CertTally& t) {
    std::printf("certificates: %d Pass, %d Fail, %d Skipped\n", t.pass, t.fail, t.skipped);
}

void write_profile(const Config& c, const fs::path& dir, const std::string& stem,
                   const deadcore::Parameters& p, const deadcore::Profile& prof,
                   const deadcore::BoundaryReport* rep) {
    if (c.format == "json")
        write_with(dir / (stem + ".json"),
                   [&](std::ostream& os) { deadcore::io::write_profile_json(os, prof, rep); });
    else
        write_with(dir / (stem + ".csv"),
                   [&](std::ostream& os) { deadcore::io::write_profile_csv(os, prof); });
    (void)p;
}

int cmd_solve(Config& c) {
    const deadcore::Parameters p = deadcore::derive(c.m, c.q, c.N);
    const fs::path dir(c.outdir);
    fs::create_directories(dir);
    write_manifest(dir / "manifest.json", c, "solve");

    const deadcore::SolveConfig cfg = solve_config(c);
    const deadcore::RegimeBundle b = deadcore::solve_regime(p, cfg);
    const auto certs = deadcore::certify_regime(p, b, cfg.tol);

    write_profile(c, dir, "profile_deadcore", p, b.dead_core, &b.dead_report);
    write_profile(c, dir, "profile_origin", p, b.origin, &b.origin_report);
    write_with(dir / "sweep.csv",
               [&](std::ostream& os) { deadcore::io::write_sweep_csv(os, b.rows); });
    write_with(dir / "certificates.json",
               [&](std::ostream& os) { deadcore::io::write_certificates_json(os, certs); });

    std::printf("regime: m = %g, q = %g, N = %g  (sigma = %.12g, nu = %.12g)\n", p.m, p.q, p.N,
                p.sigma, p.nu);
    std::printf("K0   = %s\n", bracket_str(b.connection.k0).c_str());
    std::printf("Kinf = %s\n", bracket_str(b.connection.kinf).c_str());
    std::printf("K*   = %s\n", bracket_str(b.connection.bracket).c_str());
    std::printf("beta* = %.12g   alpha* = %.12g\n", b.kstar.beta, b.kstar.alpha);
    std::printf("dead-core profile: xi* = %.12g, xi0/xi* = %.12g, %zu samples\n",
                b.dead_core.xi_star, b.dead_core.xi_0 / b.dead_core.xi_star,
                b.dead_core.samples.size());
    std::printf("interior residual: dead-core %.3g, origin %.3g\n", b.dead_report.ode_residual_max,
                b.origin_report.ode_residual_max);
    std::printf("oracle: contact defect %.3g (tolerance %.1g), xi0 %.12g, start %s\n",
                b.oracle.contact_defect, b.oracle.defect_tolerance, b.oracle.xi0_candidate,
                b.oracle.start_robust ? "robust" : "NOT robust");
    const CertTally t = tally(certs);
    print_tally(t);
    std::printf("wrote %s\n", (dir / "manifest.json").string().c_str());
    return t.fail > 0 ? 3 : 0;
}

int cmd_theorem2(Config& c) {
    const deadcore::Parameters p = deadcore::derive(c.m, c.q, c.N);
    if (!(c.beta > 0)) throw deadcore::RegimeError("theorem2 requires --beta > 0");
    const fs::path dir(c.outdir);
    fs::create_directories(dir);
    write_manifest(dir / "manifest.json", c, "theorem2");

    const deadcore::ShootConfig scfg = shoot_config(c);
    const deadcore::ThresholdBracket k0 = deadcore::find_k0(p, c.bracket_tol, scfg);
    const double beta0 = deadcore::beta_from_k(p, k0.mid()).beta;
    const double K_req = deadcore::k_from_beta(p, c.beta).K;

    // Admissible range is the closed interval beta >= beta0, i.e. K <= K0.
    // K0 is known only as a bracket: above it the request is rejected;
    // inside it the request is indistinguishable from beta0 itself and is
    // served at the bracket's low end, where convergence is certain.
    if (K_req > k0.hi) {
        std::printf("beta = %.12g is below the admissible threshold beta0 = %.12g "
                    "(K = %.12g > K0 bracket %s); no origin-supported profile exists there\n",
                    c.beta, beta0, K_req, bracket_str(k0).c_str());
        return 1;
    }
    const double K_eff = K_req >= k0.lo ? k0.lo : K_req;
    const deadcore::KBeta kb = deadcore::beta_from_k(p, K_eff);

    const auto shot = deadcore::shoot_u0(p, kb.K, scfg);
    deadcore::Profile prof = deadcore::reconstruct_origin(p, kb, shot.trajectory, {});
    const deadcore::BoundaryReport rep = deadcore::ode_residual(p, kb, prof);

    std::vector<deadcore::Certificate> certs;
    {
        deadcore::Certificate cc;
        cc.name = "origin-coefficient";
        cc.measured = rep.origin_coeff.value_or(0.0);
        cc.expected = rep.origin_coeff_expected.value_or(1.0);
        cc.tolerance = 0.01 * std::abs(*cc.expected);
        cc.status = std::abs(*cc.measured - *cc.expected) <= *cc.tolerance
                        ? deadcore::CertStatus::Pass
                        : deadcore::CertStatus::Fail;
        cc.detail = "plateau of f / xi^{2/(m-1)} at the origin vs its closed form";
        certs.push_back(std::move(cc));
    }
    write_with(dir / "certificates.json",
               [&](std::ostream& os) { deadcore::io::write_certificates_json(os, certs); });
    write_profile(c, dir, "profile_origin", p, prof, &rep);

    std::printf("beta0 = %.12g (K0 bracket %s)\n", beta0, bracket_str(k0).c_str());
    std::printf("origin-supported profile at beta = %.12g (K = %.12g): interface at xi = %.12g, "
                "%zu samples\n",
                kb.beta, kb.K, prof.xi_0, prof.samples.size());
    std::printf("origin coefficient %.12g vs expected %.12g; interior residual %.3g\n",
                rep.origin_coeff.value_or(0.0), rep.origin_coeff_expected.value_or(0.0),
                rep.ode_residual_max);
    const CertTally t = tally(certs);
    print_tally(t);
    return t.fail > 0 ? 3 : 0;
}

/// Resolve the sweep/classify grid: explicit bounds if given, otherwise the
/// admissible window between the K0 and KInf brackets with a small inset.
std::vector<double> resolve_grid(const Config& c, const deadcore::Parameters& p,
                                 const deadcore::ShootConfig& scfg) {
    double lo = c.k_lo, hi = c.k_hi;
    if (!(lo > 0) || !(hi > lo)) {
        const auto k0 = deadcore::find_k0(p, c.bracket_tol, scfg);
        const auto kinf = deadcore::find_kinf(p, c.bracket_tol, scfg);
        lo = k0.hi * (1.0 + 1e-3);
        hi = kinf.lo * (1.0 - 1e-3);
    }
    if (c.points < 2) throw std::invalid_argument("--points must be at least 2");
    return deadcore::detail::log_grid(lo, hi, c.points);
}

int cmd_sweep(Config& c) {
    const deadcore::Parameters p = deadcore::derive(c.m, c.q, c.N);
    const fs::path dir(c.outdir);
    fs::create_directories(dir);
    const deadcore::ShootConfig scfg = shoot_config(c);
    const std::vector<double> grid = resolve_grid(c, p, scfg);
    c.k_lo = grid.front();
    c.k_hi = grid.back();
    write_manifest(dir / "manifest.json", c, "sweep");
    const auto rows = deadcore::sweep(p, grid, scfg);
    write_with(dir / "sweep.csv", [&](std::ostream& os) { deadcore::io::write_sweep_csv(os, rows); });
    std::printf("swept %zu couplings in [%.12g, %.12g]; wrote %s\n", rows.size(), grid.front(),
                grid.back(), (dir / "sweep.csv").string().c_str());
    return 0;
}

int cmd_classify(Config& c) {
    const deadcore::Parameters p = deadcore::derive(c.m, c.q, c.N);
    const fs::path dir(c.outdir);
    fs::create_directories(dir);
    const deadcore::ShootConfig scfg = shoot_config(c);
    const std::vector<double> grid = resolve_grid(c, p, scfg);
    c.k_lo = grid.front();
    c.k_hi = grid.back();
    write_manifest(dir / "manifest.json", c, "classify");

    const deadcore::Q2Classification ref = deadcore::classify_q2(p, grid.front());
    std::printf("thresholds: K_u = %.12g, K_f = %.12g, K_s = %.12g\n", ref.K_u, ref.K_f, ref.K_s);
    std::ostringstream csv;
    csv << "K,kind,re_lambda1,im_lambda1,re_lambda2,im_lambda2\n";
    for (double K : grid) {
        const auto cls = deadcore::classify_q2(p, K);
        std::printf("K = %-16.10g %s\n", K, deadcore::to_string(cls.kind));
        csv << deadcore::io::csv_num(K) << ',' << deadcore::to_string(cls.kind) << ','
            << deadcore::io::csv_num(cls.lambda1.real()) << ','
            << deadcore::io::csv_num(cls.lambda1.imag()) << ','
            << deadcore::io::csv_num(cls.lambda2.real()) << ','
            << deadcore::io::csv_num(cls.lambda2.imag()) << '\n';
    }
    write_text(dir / "classify.csv", csv.str());
    return 0;
}

int cmd_certify(Config& c) {
    const deadcore::Parameters p = deadcore::derive(c.m, c.q, c.N);
    const fs::path dir(c.outdir);
    fs::create_directories(dir);
    write_manifest(dir / "manifest.json", c, "certify");
    const deadcore::SolveConfig cfg = solve_config(c);
    const deadcore::RegimeBundle b = deadcore::solve_regime(p, cfg);
    const auto certs = deadcore::certify_regime(p, b, cfg.tol);
    write_with(dir / "certificates.json",
               [&](std::ostream& os) { deadcore::io::write_certificates_json(os, certs); });
    for (const auto& cert : certs)
        std::printf("%-7s %s\n", deadcore::to_string(cert.status), cert.name.c_str());
    const CertTally t = tally(certs);
    print_tally(t);
    return t.fail > 0 ? 3 : 0;
}

int cmd_export_trajectory(Config& c) {
    const deadcore::Parameters p = deadcore::derive(c.m, c.q, c.N);
    if (c.orbit != "l1" && c.orbit != "l0")
        throw std::invalid_argument("--orbit must be l1 or l0");
    if (!(c.K > 0)) throw std::invalid_argument("--K must be positive");
    const fs::path dir(c.outdir);
    fs::create_directories(dir);
    write_manifest(dir / "manifest.json", c, "export-trajectory");
    const deadcore::ShootConfig scfg = shoot_config(c);
    const auto shot = c.orbit == "l1" ? deadcore::shoot_u1(p, c.K, scfg)
                                      : deadcore::shoot_u0(p, c.K, scfg);
    const std::string name = "trajectory_" + c.orbit + "_" + deadcore::io::csv_num(c.K) + ".csv";
    write_with(dir / name,
               [&](std::ostream& os) { deadcore::io::write_trajectory_csv(os, shot.trajectory); });
    std::printf("orbit %s at K = %.12g: outcome %s, %zu samples; wrote %s\n", c.orbit.c_str(), c.K,
                deadcore::to_string(shot.kind), shot.trajectory.samples.size(),
                (dir / name).string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar dead-core profiles of the porous medium equation with strong "
                 "spatially inhomogeneous absorption: phase-plane solver and certificate suite"};
    app.require_subcommand(1);

    Config c;
    CLI::App* solve = app.add_subcommand("solve", "locate the connection coupling, reconstruct "
                                                  "both profiles, run every certificate");
    CLI::App* theorem2 =
        app.add_subcommand("theorem2", "origin-supported profile for a given beta >= beta0");
    CLI::App* sweep = app.add_subcommand("sweep", "tabulate both shooting maps over a coupling grid");
    CLI::App* classify =
        app.add_subcommand("classify", "linearization type of the interior point over a grid");
    CLI::App* certify = app.add_subcommand("certify", "full solve plus the certificate suite; "
                                                      "exit 3 if any certificate fails");
    CLI::App* expo =
        app.add_subcommand("export-trajectory", "trace one orbit at one coupling to CSV");

    for (CLI::App* cmd : {solve, theorem2, sweep, classify, certify, expo}) add_common_options(cmd, c);
    theorem2->add_option("--beta", c.beta, "temporal exponent (>= beta0)");
    for (CLI::App* cmd : {sweep, classify}) {
        cmd->add_option("--k-lo", c.k_lo, "grid lower end (default: above K0)");
        cmd->add_option("--k-hi", c.k_hi, "grid upper end (default: below KInf)");
        cmd->add_option("--points", c.points, "grid size");
    }
    expo->add_option("--orbit", c.orbit, "which orbit: l1 | l0");
    expo->add_option("--K", c.K, "coupling constant");

    CLI11_PARSE(app, argc, argv);

    try {
        const CLI::App* sub = app.get_subcommands().front();
        merge_manifest(c, sub);
        if (solve->parsed()) return cmd_solve(c);
        if (theorem2->parsed()) return cmd_theorem2(c);
        if (sweep->parsed()) return cmd_sweep(c);
        if (classify->parsed()) return cmd_classify(c);
        if (certify->parsed()) return cmd_certify(c);
        if (expo->parsed()) return cmd_export_trajectory(c);
    } catch (const deadcore::RegimeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const deadcore::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
    return 0;
}
