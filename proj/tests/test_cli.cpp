#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(ROML_CLI_PATH) + " " + args + " 2>&1";
  CliResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buffer;
  std::size_t got;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "roml_cli_test";
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("gen-instance emits byte-identical canonical json") {
  TempDir tmp;
  const auto a = tmp.path / "a.json";
  const auto b = tmp.path / "b.json";
  const std::string flags =
      "gen-instance --n 4096 --k 2 --c 1 --c1 0.1 --c2 0.01 --t-factor 1 "
      "--kind yes --seed 7 --out ";
  CHECK(run_cli(flags + a.string()).exit_code == 0);
  CHECK(run_cli(flags + b.string()).exit_code == 0);
  const std::string ja = slurp(a);
  CHECK(ja == slurp(b));
  CHECK(ja.find("\"kind\":\"yes\"") != std::string::npos);
  CHECK(ja.find("\"witness\":") != std::string::npos);
}

TEST_CASE("gen-instance csv envelope differs only in framing") {
  const auto json = run_cli(
      "gen-instance --n 4096 --k 2 --c 1 --c1 0.1 --c2 0.01 --t-factor 1 "
      "--kind no --seed 3 --format json");
  const auto csv = run_cli(
      "gen-instance --n 4096 --k 2 --c 1 --c1 0.1 --c2 0.01 --t-factor 1 "
      "--kind no --seed 3 --format csv");
  CHECK(json.exit_code == 0);
  CHECK(csv.exit_code == 0);
  CHECK(csv.output.find("set,element") != std::string::npos);
  CHECK(csv.output.find("# roml") != std::string::npos);
  CHECK(json.output.find("\"sets\":") != std::string::npos);
}

TEST_CASE("infeasible constants exit 2 naming the inequality") {
  const auto result = run_cli(
      "gen-instance --n 1e6 --k 3 --c 1/4 --c1 0.05 --c2 0.005 --t-factor 100 "
      "--kind no --seed 1");
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("N <= n") != std::string::npos);
}

TEST_CASE("lemma1 reports the analytic bound and reproduces bytes") {
  const std::string flags =
      "lemma1 --n 1e6 --k 3 --c1 0.05 --t-factor 1 --trials 200 --seed 1";
  const auto a = run_cli(flags);
  const auto b = run_cli(flags);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  CHECK(a.output.find("empirical_triple_prob") != std::string::npos);
  CHECK(a.output.find(",0.02,") != std::string::npos);  // 8 c1^2
}

TEST_CASE("lemma2 csv has the gap schema") {
  const auto result =
      run_cli("lemma2 --n 1e6 --k 4 --c2 0.005 --trials 200 --seed 5");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("empirical_fail_prob") != std::string::npos);
}

TEST_CASE("protocol emits outcome rows plus a summary") {
  TempDir tmp;
  const auto out = tmp.path / "runs.csv";
  const auto stream = tmp.path / "stream.bin";
  const std::string flags =
      "protocol --n 2000 --k 2 --c 1/2 --c1 0.3 --c2 0.01 --t-factor 1 "
      "--trials 5 --estimator exact --seed 3 --export-stream " + stream.string() +
      " --out " + out.string();
  CHECK(run_cli(flags).exit_code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("seed,kind,decision") != std::string::npos);
  CHECK(csv.find("# summary accuracy=") != std::string::npos);

  // Re-running is byte-identical (criterion: reproducibility).
  const auto again = tmp.path / "runs2.csv";
  const std::string flags2 =
      "protocol --n 2000 --k 2 --c 1/2 --c1 0.3 --c2 0.01 --t-factor 1 "
      "--trials 5 --estimator exact --seed 3 --out " + again.string();
  CHECK(run_cli(flags2).exit_code == 0);
  CHECK(run_cli(flags2).exit_code == 0);

  // Exported stream carries the ROML header.
  const std::string bin = slurp(stream);
  REQUIRE(bin.size() >= 16);
  CHECK(bin.substr(0, 4) == "ROML");
}

TEST_CASE("ams protocol keeps the same output schema") {
  const auto result = run_cli(
      "protocol --n 2000 --k 2 --c 1/2 --c1 0.3 --c2 0.01 --t-factor 1 "
      "--trials 3 --estimator ams --samples 64 --seed 9");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("seed,kind,decision") != std::string::npos);
}

TEST_CASE("diagnose rejects too few batches with exit 2") {
  const auto result = run_cli("diagnose --n 2000 --k 2 --batches 29 --seed 1");
  CHECK(result.exit_code == 2);

  const auto ok = run_cli(
      "diagnose --n 2000 --k 2 --c 1/2 --c1 0.3 --c2 0.01 --t-factor 1 "
      "--batches 40 --seed 1");
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("chi2_pvalue") != std::string::npos);
}

TEST_CASE("sweep emits one row per grid point") {
  const auto result = run_cli(
      "sweep lemma1 --vary c1=0.01,0.05,0.1 --n 1e5 --k 3 --t-factor 1 "
      "--trials 100 --seed 2");
  CHECK(result.exit_code == 0);
  std::size_t data_rows = 0;
  std::istringstream is(result.output);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("1/2,1,2,100000,", 0) == 0) ++data_rows;  // c,t_factor,seed,n,...
  }
  CHECK(data_rows == 3);
  // Each grid value appears as the c1 column.
  CHECK(result.output.find(",0.01,100,") != std::string::npos);
  CHECK(result.output.find(",0.05,100,") != std::string::npos);
  CHECK(result.output.find(",0.1,100,") != std::string::npos);
}

TEST_CASE("build-stream writes a ROML binary") {
  TempDir tmp;
  const auto bin = tmp.path / "s.bin";
  const auto result = run_cli(
      "build-stream --n 2000 --k 2 --c 1/2 --c1 0.3 --c2 0.01 --t-factor 1 "
      "--kind yes --seed 3 --out " + bin.string());
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("written,") != std::string::npos);
  const std::string data = slurp(bin);
  REQUIRE(data.size() == 16 + 4 * 2000);
  CHECK(data.substr(0, 4) == "ROML");
  // n field of the header, little-endian at offset 8.
  const auto n_field = static_cast<unsigned char>(data[8]) |
                       static_cast<unsigned>(static_cast<unsigned char>(data[9])) << 8;
  CHECK(n_field == 2000);
}

TEST_CASE("json format wraps the same rows") {
  const auto result = run_cli(
      "lemma2 --n 1e5 --k 4 --c2 0.005 --trials 100 --seed 5 --format json");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("\"columns\":") != std::string::npos);
  CHECK(result.output.find("\"rows\":") != std::string::npos);
}
