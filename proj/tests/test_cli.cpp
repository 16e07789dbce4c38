#include "commands.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace kerrpb;
using namespace kerrpb::cli;

namespace {

std::string render(const Table& t, Format f) {
    std::ostringstream os;
    write_table(os, t, f);
    return os.str();
}

struct RunOutput {
    int exit_code = -1;
    std::string out;
};

/// Runs the CLI binary with `args`, capturing stdout.
RunOutput run_cli(const std::string& args) {
    const std::string cmd = std::string(KERRPB_CLI_PATH) + " " + args + " 2>/dev/null";
    RunOutput r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("kerrpb_test_" + name);
}

}  // namespace

TEST(ParseRange, ValidAndInvalid) {
    const Range r = parse_range("0.5:4.5:0.02");
    EXPECT_DOUBLE_EQ(r.lo, 0.5);
    EXPECT_DOUBLE_EQ(r.hi, 4.5);
    EXPECT_DOUBLE_EQ(r.step, 0.02);
    for (const char* bad : {"1:2", "1:2:0", "2:1:0.1", "a:2:0.1", "1:2:3:4", "1:2:-1", ""}) {
        EXPECT_THROW(parse_range(bad), InvalidArgument) << bad;
    }
    EXPECT_EQ(parse_pair("2-3"), (std::pair<int, int>{2, 3}));
    EXPECT_THROW(parse_pair("23"), InvalidArgument);
    EXPECT_THROW(parse_pair("1.5-2"), InvalidArgument);
}

TEST(FormatNumber, TwelveSignificantDigits) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(123456789.123456789), "123456789.123");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(TableOutput, CsvAndJson) {
    Table t;
    t.columns = {"x", "label", "y"};
    t.add_row({1.5, std::string("a,b"), kNaN});
    t.add_row({-2.0, std::string("plain"), 0.25});
    EXPECT_EQ(render(t, Format::csv), "x,label,y\n1.5,\"a,b\",nan\n-2,plain,0.25\n");
    const auto doc = nlohmann::json::parse(render(t, Format::json));
    ASSERT_EQ(doc.size(), 2u);
    EXPECT_EQ(doc[0]["label"], "a,b");
    EXPECT_EQ(doc[0]["y"], "nan");
    EXPECT_DOUBLE_EQ(doc[1]["y"].get<double>(), 0.25);
    EXPECT_THROW(t.add_row({1.0}), std::logic_error);
}

TEST(ScanK, SinglePointEqualsLibraryComposition) {
    RunConfig cfg;
    cfg.k = 1.0;
    const CommandResult res = scan_k(cfg);
    ASSERT_EQ(res.exit_code, kOk);
    ASSERT_EQ(res.table.rows.size(), 1u);
    const auto& cols = res.table.columns;
    const auto& row = res.table.rows[0];
    auto cell = [&](const std::string& name) {
        const auto it = std::find(cols.begin(), cols.end(), name);
        return std::get<double>(row[static_cast<std::size_t>(it - cols.begin())]);
    };
    const SystemParams p;
    const SteadyStateResult ss =
        steady_state(build_liouvillian(hamiltonian_rot(p, resonant(1.0)), p.gamma, p.n_th));
    EXPECT_EQ(cell("P1"), photon_probs(ss.rho_ss)(1));
    EXPECT_EQ(cell("F1"), truncation_fidelity(ss.rho_ss, 1));
    EXPECT_EQ(cell("fano"), *fano(ss.rho_ss));
    EXPECT_EQ(cell("purity"), purity(ss.rho_ss));
    EXPECT_EQ(cell("coherence"), coherence_param(ss.rho_ss));
    EXPECT_EQ(cell("abs_rho_0_1"), std::abs(ss.rho_ss(0, 1)));

    cfg.normalize_coherence = true;
    const CommandResult norm = scan_k(cfg);
    const auto ci = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), "coherence") - cols.begin());
    EXPECT_EQ(std::get<double>(norm.table.rows[0][ci]), coherence_normalized(ss.rho_ss));
}

TEST(ScanK, DeterministicAcrossJobCounts) {
    RunConfig cfg;
    cfg.k_range = Range{0.8, 2.2, 0.2};
    cfg.nth_values = {0.0, 0.05};
    cfg.jobs = 1;
    const std::string serial = render(scan_k(cfg).table, Format::csv);
    cfg.jobs = 4;
    const std::string parallel = render(scan_k(cfg).table, Format::csv);
    EXPECT_EQ(serial, parallel);
    EXPECT_EQ(std::count(serial.begin(), serial.end(), '\n'), 1 + 2 * 8);
}

TEST(ScanEps, VanishingDriveIsZeroBlockade) {
    RunConfig cfg;
    cfg.k = 2.0;
    cfg.eps_range = Range{0.01, 0.03, 0.01};
    const CommandResult res = scan_eps(cfg);
    ASSERT_EQ(res.exit_code, kOk);
    const auto p0 = static_cast<std::size_t>(
        std::find(res.table.columns.begin(), res.table.columns.end(), "P0") - res.table.columns.begin());
    for (const auto& row : res.table.rows) {
        EXPECT_GE(std::get<double>(row[p0]), 0.99);
    }
}

TEST(Evolve, FirstRowIsVacuum) {
    RunConfig cfg;
    cfg.params.gamma = 0.0;
    cfg.params.dim = 20;
    cfg.k = 2.0;
    cfg.t_range = Range{0.0, 0.1, 0.05};
    cfg.analytic = true;
    const CommandResult res = evolve(cfg);
    ASSERT_EQ(res.table.rows.size(), 3u);
    EXPECT_NEAR(std::get<double>(res.table.rows[0][1]), 1.0, 1e-12);
    cfg.k = 3.0;
    EXPECT_THROW(evolve(cfg), InvalidArgument);
}

TEST(Compare, SelfCheckIsExact) {
    RunConfig cfg;
    cfg.self_check = true;
    const CommandResult res = compare(cfg);
    EXPECT_EQ(res.exit_code, kOk);
    for (const auto& row : res.table.rows) {
        EXPECT_EQ(std::get<double>(row[1]), 0.0);
    }
}

TEST(Panels, PairingRules) {
    RunConfig cfg;
    cfg.k_values = {1.0, 2.0, 3.0};
    cfg.eps_values = {5.0, 5.0, 11.56};
    const auto p = panels(cfg);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_DOUBLE_EQ(p[2].second, 11.56);
    cfg.eps_values = {7.0};
    EXPECT_DOUBLE_EQ(panels(cfg)[1].second, 7.0);
    cfg.eps_values = {1.0, 2.0};
    EXPECT_THROW(panels(cfg), InvalidArgument);
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(run_cli("scan-k --k 1 --dim 8").exit_code, kOk);
    EXPECT_EQ(run_cli("scan-k --k-range 2:1:0.1").exit_code, kUsage);
    EXPECT_EQ(run_cli("scan-k --format xml").exit_code, kUsage);
    EXPECT_EQ(run_cli("no-such-command").exit_code, kUsage);
    EXPECT_EQ(run_cli("scan-k --chi -1").exit_code, kUsage);
    EXPECT_EQ(run_cli("compare --self-check").exit_code, kOk);
    EXPECT_EQ(run_cli("compare --delta 0.3 --d 1 --unitary-dim 20").exit_code, kOracleMismatch);
    EXPECT_EQ(run_cli("--help").exit_code, kOk);
}

TEST(Binary, ConfigFileAndFlagPrecedence) {
    const auto conf = temp_file("precedence.conf");
    {
        std::ofstream os(conf);
        os << "# test config\nk = 2\neps = 7\ndim = 8\n";
    }
    const RunOutput from_file = run_cli("scan-k --config " + conf.string() + " --format json");
    ASSERT_EQ(from_file.exit_code, kOk);
    const auto a = nlohmann::json::parse(from_file.out);
    EXPECT_DOUBLE_EQ(a[0]["eps"].get<double>(), 7.0);
    EXPECT_DOUBLE_EQ(a[0]["k"].get<double>(), 2.0);

    const RunOutput overridden = run_cli("scan-k --config " + conf.string() + " --eps 9 --format json");
    ASSERT_EQ(overridden.exit_code, kOk);
    const auto b = nlohmann::json::parse(overridden.out);
    EXPECT_DOUBLE_EQ(b[0]["eps"].get<double>(), 9.0);
    EXPECT_DOUBLE_EQ(b[0]["k"].get<double>(), 2.0);
    std::filesystem::remove(conf);
}

TEST(Binary, OutputFileIsByteIdenticalAcrossRuns) {
    const auto out1 = temp_file("run1.csv");
    const auto out2 = temp_file("run2.csv");
    const std::string args = "scan-k --k-range 0.9:1.1:0.1 --dim 10 --jobs 2 --out ";
    ASSERT_EQ(run_cli(args + out1.string()).exit_code, kOk);
    ASSERT_EQ(run_cli(args + out2.string()).exit_code, kOk);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };
    const std::string s1 = slurp(out1);
    EXPECT_FALSE(s1.empty());
    EXPECT_EQ(s1, slurp(out2));
    std::filesystem::remove(out1);
    std::filesystem::remove(out2);
}
