#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TRACECHECK_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tracecheck_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("verify-constants passes by default") {
  const Run r = run("verify-constants");
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("schema") == 1);
  CHECK(j.at("all_pass") == true);
  int limit_zeros = 0;
  for (const auto& c : j.at("checks"))
    if (c.at("name").get<std::string>().rfind("limit_form(", 0) == 0 && c.at("actual") == "0") ++limit_zeros;
  CHECK(limit_zeros == 4);
}

TEST_CASE("corrupted constant fails with exit 1") {
  const Run r = run("verify-constants --test-corrupt 'eps_integral(2,-1)'");
  CHECK(r.code == 1);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("all_pass") == false);
  CHECK(run("verify-constants --test-corrupt 'series_factor(3)'").code == 1);
  CHECK(run("verify-constants --test-corrupt no_such_check").code == 2);
}

TEST_CASE("parse and configuration errors exit 2") {
  CHECK(run("--set bogus=1 verify-constants").code == 2);
  CHECK(run("--set s_primes=3,5 verify-constants").code == 2);
  CHECK(run("--set x_grid=100,50 sweep").code == 2);
  CHECK(run("--set profile=gaussian verify-constants").code == 2);
  CHECK(run("--config /nonexistent/cfg.txt verify-constants").code == 2);
  CHECK(run("verify-constants --primes 2,9").code == 2);
  CHECK(run("no-such-command").code == 2);
  CHECK(run("orbital --p 5 --m 0 --a 1").code == 2);
  CHECK(run("orbital --p 5 --m 0 --a 1/x --b 2").code == 2);
  CHECK(run("limit-form --p 4").code == 2);
}

TEST_CASE("orbital output") {
  const Run r = run("orbital --p 5 --m 0 --a 1 --b 6");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("orb 5\n", 0) == 0);
  CHECK(r.out.find("worb_hat 2*log(5)") != std::string::npos);
  const Run k0 = run("orbital --p 5 --m 0 --a 1 --b 2");
  CHECK(k0.out.find("worb_hat 0") != std::string::npos);
  CHECK(run("orbital --p 5 --m 0 --a 3 --b 3").code == 2);
  const auto j = nlohmann::json::parse(run("orbital --p 2 --m 0 --a 1 --b 5 --json").out);
  CHECK(j.at("schema") == 1);
  CHECK(j.at("worb") == "-10*log(2)");
  CHECK(j.at("worb_hat") == "6*log(2)");
}

TEST_CASE("limit-form") {
  for (const char* p : {"2", "3", "5", "7"}) {
    const Run r = run(std::string("limit-form --p ") + p);
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("schema") == 1);
    CHECK(j.at("pass") == true);
    CHECK(j.at("total_str") == "0");
  }
}

TEST_CASE("sweep writes CSV and JSON, independent of thread count") {
  const auto d1 = scratch("sweep1"), d2 = scratch("sweep2");
  const auto cfg = scratch("cfg.txt");
  {
    std::ofstream c(cfg);
    c << "# small grid\ns_primes = 2\nhecke_m.2 = 0\nprofile = plateau\nx_grid = 1000, 4000\n";
  }
  const Run a = run("--config " + cfg.string() + " --set out_dir=" + d1.string() + " --threads 1 sweep");
  const Run b = run("--config " + cfg.string() + " --set out_dir=" + d2.string() + " --threads 3 sweep");
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j.at("schema") == 1);
  CHECK(j.at("ledger").at("F") == 0.0);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string csv1 = slurp(d1 / "sweep.csv");
  CHECK(csv1.rfind("family,X,partial,main,residual,scaled,alpha\n", 0) == 0);
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 1 + 7 * 2);
  CHECK(csv1 == slurp(d2 / "sweep.csv"));
  CHECK(slurp(d1 / "hyperbolic.csv").rfind("n,i_hyp_deg1,j_hyp_hat_S,j_tilde_hyp_S\n", 0) == 0);
  CHECK(std::filesystem::exists(d1 / "ledger.json"));

  const auto d3 = scratch("sweep0");
  CHECK(run("--set profile=zero --set x_grid=1000 --set out_dir=" + d3.string() + " sweep").code == 0);
  std::ifstream in(d3 / "sweep.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line))
    if (line.rfind("hyp_deg1,", 0) == 0 || line.rfind("jhat,", 0) == 0) CHECK(line.find(",0,0,0,0,") != std::string::npos);
}
