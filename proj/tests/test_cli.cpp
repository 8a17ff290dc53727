// Command-line surface: exit codes, output files, manifest replay and
// precedence, determinism of reruns, and the per-subcommand contracts.
//
// Drives the real binary (path injected by the build) through std::system.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <iomanip>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <deadcore/shoot.hpp>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;  ///< combined stdout + stderr
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "deadcore_cli_suite";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    static int serial = 0;
    const fs::path log = work_dir() / ("log_" + std::to_string(serial++) + ".txt");
    const std::string cmd = std::string(DEADCORE_CLI_PATH) + " " + args + " > " +
                            log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    EXPECT_TRUE(in.good()) << "missing file " << p;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::istringstream is(line);
    for (std::string field; std::getline(is, field, sep);) out.push_back(field);
    return out;
}

constexpr const char* kRef = "--m 2 --q 0.5 --N 3";

/// beta0 of the reference regime at the same coarse tolerance the theorem2
/// tests pass to the binary; bisection is deterministic, so the in-process
/// bracket coincides with the binary's.
double ref_beta0_coarse() {
    static const double b = [] {
        const deadcore::Parameters p = oracles::params_of(oracles::reference);
        return deadcore::beta_from_k(p, deadcore::find_k0(p, 1e-6).mid()).beta;
    }();
    return b;
}

/// The shared full solve (run once, reused by several tests).
const fs::path& solve_dir_a() {
    static const fs::path dir = [] {
        const fs::path d = work_dir() / "solveA";
        const RunResult r = run_cli(std::string("solve ") + kRef + " --outdir " + d.string());
        EXPECT_EQ(r.code, 0) << r.out;
        return d;
    }();
    return dir;
}

}  // namespace

TEST(Cli, RequiresASubcommand) {
    EXPECT_NE(run_cli("").code, 0);
    EXPECT_NE(run_cli("frobnicate").code, 0);
}

TEST(Cli, InvalidRegimeExitsOne) {
    const RunResult r = run_cli("solve --m 1 --q 0.5 --N 3 --outdir " +
                                (work_dir() / "bad").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("error"), std::string::npos);
    const RunResult r2 = run_cli("classify --m 2 --q 1.5 --N 3 --outdir " +
                                 (work_dir() / "bad2").string());
    EXPECT_EQ(r2.code, 1);
}

TEST(Cli, ClassifyTabulatesTheGrid) {
    const fs::path dir = work_dir() / "classify";
    const RunResult r = run_cli(std::string("classify ") + kRef +
                                " --k-lo 0.05 --k-hi 10 --points 7 --outdir " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("thresholds:"), std::string::npos);
    EXPECT_NE(r.out.find("UnstableNode"), std::string::npos);
    EXPECT_NE(r.out.find("StableNode"), std::string::npos);
    const auto rows = lines_of(slurp(dir / "classify.csv"));
    ASSERT_EQ(rows.size(), 8u);  // header + 7 grid points
    EXPECT_EQ(rows[0], "K,kind,re_lambda1,im_lambda1,re_lambda2,im_lambda2");
    EXPECT_EQ(split(rows[1], ',')[1], "UnstableNode");
    EXPECT_EQ(split(rows[7], ',')[1], "StableNode");
}

TEST(Cli, ExportTrajectoryWritesTheOrbit) {
    const fs::path dir = work_dir() / "export";
    const RunResult r = run_cli(std::string("export-trajectory ") + kRef +
                                " --orbit l1 --K 0.3 --outdir " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto rows = lines_of(slurp(dir / "trajectory_l1_0.3.csv"));
    ASSERT_GT(rows.size(), 10u);
    EXPECT_EQ(rows[0], "zeta,u,v");
    // Crossing outcome reported on stdout.
    EXPECT_NE(r.out.find("Crossing"), std::string::npos);
    EXPECT_EQ(run_cli(std::string("export-trajectory ") + kRef +
                      " --orbit l7 --K 0.3 --outdir " + dir.string())
                  .code,
              1);
}

TEST(Cli, SweepHonorsAnExplicitGrid) {
    const fs::path dir = work_dir() / "sweep5";
    const RunResult r = run_cli(std::string("sweep ") + kRef +
                                " --k-lo 0.2 --k-hi 1.2 --points 5 --outdir " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto rows = lines_of(slurp(dir / "sweep.csv"));
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], "K,U0_kind,U0_value,U1_kind,U1_value,Q2_kind");
    EXPECT_EQ(split(rows[1], ',')[0], "0.2");
    EXPECT_EQ(split(rows[5], ',')[0], "1.2");
    double prev_u1 = std::numeric_limits<double>::infinity();
    double prev_u0 = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = split(rows[i], ',');
        ASSERT_EQ(f.size(), 6u);
        ASSERT_EQ(f[1], "Crossing") << rows[i];
        ASSERT_EQ(f[3], "Crossing") << rows[i];
        const double u0 = std::stod(f[2]), u1 = std::stod(f[4]);
        EXPECT_LE(u1, prev_u1 * (1.0 + 1e-9));
        EXPECT_GE(u0, prev_u0 * (1.0 - 1e-9));
        prev_u1 = u1;
        prev_u0 = u0;
    }
}

TEST(Cli, FlagsBeatManifestValues) {
    const fs::path dir5 = work_dir() / "sweep5";  // written by the previous test
    const fs::path dir3 = work_dir() / "sweep3";
    const RunResult r = run_cli("sweep --manifest " + (dir5 / "manifest.json").string() +
                                " --points 3 --outdir " + dir3.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const auto rows = lines_of(slurp(dir3 / "sweep.csv"));
    ASSERT_EQ(rows.size(), 4u);  // --points won over the manifest's 5
    EXPECT_EQ(split(rows[1], ',')[0], "0.2");  // bounds came from the manifest
    EXPECT_EQ(split(rows[3], ',')[0], "1.2");
}

TEST(Cli, Theorem2AcceptsAdmissibleBeta) {
    const fs::path dir = work_dir() / "t2good";
    const double beta = 2.0 * ref_beta0_coarse();
    std::ostringstream cmd;
    cmd << std::setprecision(17) << "theorem2 " << kRef << " --bracket-tol 1e-6 --beta " << beta << " --outdir "
        << dir.string();
    const RunResult r = run_cli(cmd.str());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("origin-supported profile"), std::string::npos);
    EXPECT_NE(r.out.find("origin coefficient"), std::string::npos);
    const auto rows = lines_of(slurp(dir / "profile_origin.csv"));
    EXPECT_GT(rows.size(), 1000u);
    EXPECT_EQ(rows[0], "xi,f,dfm1");
    EXPECT_EQ(split(rows[1], ',')[0], "0");  // support closed at the origin
    // Certificate file present with the origin-law check passed.
    const nlohmann::json certs = nlohmann::json::parse(slurp(dir / "certificates.json"));
    ASSERT_EQ(certs.size(), 1u);
    EXPECT_EQ(certs[0].at("name"), "origin-coefficient");
    EXPECT_EQ(certs[0].at("status"), "Pass");
}

TEST(Cli, Theorem2RejectsBetaBelowThreshold) {
    const fs::path dir = work_dir() / "t2bad";
    const double beta = 0.5 * ref_beta0_coarse();
    std::ostringstream cmd;
    cmd << std::setprecision(17) << "theorem2 " << kRef << " --bracket-tol 1e-6 --beta " << beta << " --outdir "
        << dir.string();
    const RunResult r = run_cli(cmd.str());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("beta0"), std::string::npos);  // threshold reported
    EXPECT_NE(r.out.find("no origin-supported profile"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "profile_origin.csv"));
}

TEST(Cli, Theorem2ServesRequestsInsideTheBracket) {
    // beta0 itself maps to a coupling inside the K0 bracket; the run must be
    // served (at the provably-connecting end), not rejected.
    const fs::path dir = work_dir() / "t2edge";
    std::ostringstream cmd;
    cmd << std::setprecision(17) << "theorem2 " << kRef << " --bracket-tol 1e-6 --beta " << ref_beta0_coarse()
        << " --outdir " << dir.string();
    const RunResult r = run_cli(cmd.str());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(dir / "profile_origin.csv"));
}

TEST(Cli, SolveWritesTheFullArtifactSet) {
    const fs::path& dir = solve_dir_a();
    for (const char* name : {"manifest.json", "profile_deadcore.csv", "profile_origin.csv",
                             "sweep.csv", "certificates.json"})
        EXPECT_TRUE(fs::exists(dir / name)) << name;
    const nlohmann::json certs = nlohmann::json::parse(slurp(dir / "certificates.json"));
    EXPECT_EQ(certs.size(), 19u);
    for (const auto& c : certs) EXPECT_NE(c.at("status"), "Fail") << c.at("name");
    const nlohmann::json man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(man.at("command"), "solve");
    EXPECT_EQ(man.at("m").get<double>(), 2.0);
    EXPECT_EQ(man.at("bracket_tol").get<double>(), 1e-8);
}

TEST(Cli, RerunsAreByteIdentical) {
    const fs::path dirB = work_dir() / "solveB";
    const RunResult r = run_cli(std::string("solve ") + kRef + " --outdir " + dirB.string());
    ASSERT_EQ(r.code, 0) << r.out;
    for (const char* name : {"manifest.json", "profile_deadcore.csv", "profile_origin.csv",
                             "sweep.csv", "certificates.json"})
        EXPECT_EQ(slurp(solve_dir_a() / name), slurp(dirB / name)) << name;
}

TEST(Cli, ManifestReplaysARunExactly) {
    const fs::path dirC = work_dir() / "solveC";
    const RunResult r = run_cli("solve --manifest " +
                                (solve_dir_a() / "manifest.json").string() + " --outdir " +
                                dirC.string());
    ASSERT_EQ(r.code, 0) << r.out;
    for (const char* name : {"manifest.json", "profile_deadcore.csv", "profile_origin.csv",
                             "sweep.csv", "certificates.json"})
        EXPECT_EQ(slurp(solve_dir_a() / name), slurp(dirC / name)) << name;
}

TEST(Cli, JsonFormatSwitchesProfileSerialization) {
    const fs::path dir = work_dir() / "t2json";
    std::ostringstream cmd;
    cmd << std::setprecision(17) << "theorem2 " << kRef << " --bracket-tol 1e-6 --format json --beta "
        << 2.0 * ref_beta0_coarse() << " --outdir " << dir.string();
    const RunResult r = run_cli(cmd.str());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_FALSE(fs::exists(dir / "profile_origin.csv"));
    const nlohmann::json prof = nlohmann::json::parse(slurp(dir / "profile_origin.json"));
    EXPECT_EQ(prof.at("kind"), "OriginSupported");
    EXPECT_EQ(prof.at("normalization"), "InterfaceAtOne");
    EXPECT_GT(prof.at("samples").size(), 1000u);
    EXPECT_TRUE(prof.at("boundary_report").contains("origin_coeff"));
}

TEST(Cli, CertifyPrintsOneLinePerCertificate) {
    const fs::path dir = work_dir() / "certify";
    const RunResult r = run_cli(std::string("certify ") + kRef + " --outdir " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    int lines_with_status = 0;
    for (const std::string& line : lines_of(r.out))
        if (line.rfind("Pass", 0) == 0 || line.rfind("Skipped", 0) == 0 ||
            line.rfind("Fail", 0) == 0)
            ++lines_with_status;
    EXPECT_EQ(lines_with_status, 19);
    EXPECT_NE(r.out.find("certificates: 17 Pass, 0 Fail, 2 Skipped"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "certificates.json"));
}
