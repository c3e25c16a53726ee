#include <doctest.h>

#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "embedcap/models.hpp"
#include "embedcap/rng.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const std::string err_path =
        (std::filesystem::temp_directory_path() /
         ("embedcap_cli_err_" + std::to_string(::getpid()) + "_" + std::to_string(counter++)))
            .string();
    const std::string cmd =
        env_prefix + " " + std::string(EMBEDCAP_CLI_PATH) + " " + args + " 2>" + err_path;
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        res.out.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream err_in(err_path);
    std::stringstream ss;
    ss << err_in.rdbuf();
    res.err = ss.str();
    std::remove(err_path.c_str());
    return res;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("capacity subcommand prints exact CSV rows") {
    const auto res = run_cli("capacity --model exponential --delta 1 --method zero");
    CHECK(res.exit_code == 0);
    CHECK(res.out == "1.0,zero,0.5\n");

    const auto erl = run_cli("capacity --model erlang:xi=2 --delta 2 --method zero");
    CHECK(erl.out.rfind("2.0,zero,0.78049419", 0) == 0);

    const auto pair = run_cli("capacity --model exponential --lambda 2 --Delta 0.5 --method zero");
    CHECK(pair.out == "1.0,zero,0.5\n");
}

TEST_CASE("usage and refusal errors exit nonzero, stdout stays clean") {
    const auto heavy = run_cli("capacity --model pareto:b=1.5 --delta 1 --method linear:1");
    CHECK(heavy.exit_code != 0);
    CHECK(heavy.out.empty());
    CHECK(heavy.err.find("infinite second moment") != std::string::npos);

    const auto both = run_cli(
        "capacity --model exponential --delta 1 --lambda 1 --Delta 1 --method zero");
    CHECK(both.exit_code != 0);

    const auto badmodel = run_cli("capacity --model pareto:q=3 --delta 1 --method zero");
    CHECK(badmodel.exit_code != 0);
    CHECK(badmodel.err.find("b=") != std::string::npos);

    const auto nosub = run_cli("");
    CHECK(nosub.exit_code != 0);
}

TEST_CASE("sweep emits one row per delta and method") {
    const auto res =
        run_cli("sweep --model exponential --delta-min 0.5 --delta-max 2 --points 4 "
                "--methods zero,linear:1");
    CHECK(res.exit_code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 8);
    for (const auto& row : rows) {
        std::stringstream ss(row);
        std::string delta_s, method, value_s;
        std::getline(ss, delta_s, ',');
        std::getline(ss, method, ',');
        std::getline(ss, value_s, ',');
        const double d = std::stod(delta_s);
        const double v = std::stod(value_s);
        CHECK(v == doctest::Approx(d / (1.0 + d)).epsilon(1e-8));
    }
}

TEST_CASE("sweep formula and chain simulation stay within 0.02") {
    const auto res =
        run_cli("sweep --model erlang:xi=2 --delta-min 0.5 --delta-max 4 --points 3 "
                "--methods zero,mc-chain:400000 --seed 31");
    REQUIRE(res.exit_code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < rows.size(); i += 2) {
        auto value_of = [](const std::string& row) {
            std::stringstream ss(row);
            std::string tok;
            std::getline(ss, tok, ',');
            std::getline(ss, tok, ',');
            std::getline(ss, tok, ',');
            return std::stod(tok);
        };
        CHECK(std::abs(value_of(rows[i]) - value_of(rows[i + 1])) <= 0.02);
    }
}

TEST_CASE("output flag writes the same CSV to a file") {
    const std::string out_path =
        (std::filesystem::temp_directory_path() /
         ("embedcap_out_" + std::to_string(::getpid()) + ".csv")).string();
    const auto to_stdout = run_cli("capacity --model uniform --delta 1 --method zero");
    const auto to_file =
        run_cli("capacity --model uniform --delta 1 --method zero --output " + out_path);
    CHECK(to_file.exit_code == 0);
    CHECK(to_file.out.empty());
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == to_stdout.out);
    std::remove(out_path.c_str());
}

TEST_CASE("monte carlo rows are byte-identical across reruns") {
    const std::string cmd =
        "sweep --model erlang:xi=2 --delta-min 0.5 --delta-max 2 --points 2 "
        "--methods mc-chain:100000,mc-bgm:50000 --seed 77";
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
    // stderr column present on mc rows
    for (const auto& row : lines_of(a.out)) {
        CHECK(std::count(row.begin(), row.end(), ',') == 3);
    }
}

TEST_CASE("seed environment variable sets the default") {
    const std::string cmd = "capacity --model exponential --delta 1 --method mc-chain:20000";
    const auto env_a = run_cli(cmd, "EMBEDCAP_SEED=555");
    const auto env_b = run_cli(cmd, "EMBEDCAP_SEED=555");
    const auto env_c = run_cli(cmd, "EMBEDCAP_SEED=556");
    CHECK(env_a.out == env_b.out);
    CHECK(env_a.out != env_c.out);
    // explicit flag wins over the environment
    const auto flag = run_cli(cmd + " --seed 556", "EMBEDCAP_SEED=555");
    CHECK(flag.out == env_c.out);
}

TEST_CASE("order subcommand verdicts") {
    CHECK(run_cli("order --model1 erlang:xi=2 --model2 exponential").out ==
          "less_variable,C1>=C2\n");
    CHECK(run_cli("order --model1 exponential --model2 exponential").out == "equal,C1=C2\n");
    CHECK(run_cli("order --model1 weibull:b=0.6 --model2 weibull:b=3").out ==
          "more_variable,C1<=C2\n");
}

TEST_CASE("matrix subcommand dumps (2N+1)^2 entries") {
    const auto res = run_cli("matrix --model shifted-exponential:a=0.8 --delta 0.5 --order 1");
    CHECK(res.exit_code == 0);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 9);
    CHECK(rows[4] == "0,0,0.75");
    // cross terms vanish below the offset
    for (const auto& row : {rows[1], rows[3], rows[5], rows[7]}) {
        CHECK(row.substr(row.rfind(',') + 1) == "0.0");
    }
}

TEST_CASE("trace subcommand end to end") {
    using namespace embedcap;
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    const std::string src_path =
        (dir / ("embedcap_src_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter) + ".txt")).string();
    const std::string rel_path =
        (dir / ("embedcap_rel_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++) + ".txt")).string();
    const auto model = InterarrivalModel::weibull(0.6);
    auto write_trace = [&](const std::string& path, std::uint64_t seed) {
        RngState rng(seed);
        std::ofstream out(path);
        out.precision(17);
        double acc = 0.0;
        for (int i = 0; i < 4000; ++i) {
            acc += model.sample(rng);
            out << acc << "\n";
        }
    };
    write_trace(src_path, 811);
    write_trace(rel_path, 812);

    const std::string cmd = "trace --source " + src_path + " --relay " + rel_path +
                            " --n 3000 --deltas 0.5,1 --scramble --seed 4 "
                            "--observation-limit 2700";
    const auto res = run_cli(cmd);
    CHECK(res.exit_code == 0);
    CHECK(res.err.find("fitted weibull shape") != std::string::npos);
    const auto rows = lines_of(res.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "delta,empirical_capacity,theoretical_capacity,abs_error");
    CHECK(rows[1].rfind("0.5,", 0) == 0);
    CHECK(rows[2].rfind("1.0,", 0) == 0);

    // byte-identical on rerun
    CHECK(run_cli(cmd).out == res.out);

    const auto missing = run_cli("trace --source /no/such/file --relay " + rel_path);
    CHECK(missing.exit_code != 0);
    CHECK(missing.err.find("/no/such/file") != std::string::npos);

    const auto toobig = run_cli("trace --source " + src_path + " --relay " + rel_path +
                                " --n 100000 --deltas 0.5");
    CHECK(toobig.exit_code != 0);
    CHECK(toobig.err.find("shorter") != std::string::npos);

    std::remove(src_path.c_str());
    std::remove(rel_path.c_str());
}
