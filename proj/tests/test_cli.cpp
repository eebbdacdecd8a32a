#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rfcca/cli.hpp"

namespace fs = std::filesystem;
using rfcca::run_cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::vector<std::string> kSmall = {"--source.synthetic.n", "50", "--m_grid", "6", "--repetitions", "2",
                                         "--algorithms", "RFF,ORCCA2", "--pool_factor", "3", "--no-timing"};

std::vector<std::string> small(const std::string& command, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{command};
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / ("rfcca_cli_" + name);
  std::ofstream(p) << contents;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("bench output") {
  const Run r = cli(small("bench"));
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("algorithm,M,repetition,seed,total_cc,top10_cc,largest_cc,select_time_ms,cca_time_ms\n", 0) == 0);
  CHECK(lines(r.out) == 1 + 2 * 1 * 2);
  CHECK(r.out.find(",0,0\n") != std::string::npos);
  CHECK(cli(small("bench")).out == r.out);
  CHECK(cli(small("bench", {"--seed", "5"})).out != r.out);
}

TEST_CASE("config file and overrides") {
  const fs::path conf = temp_file("a.conf", "seed = 5\nm_grid = 6,8\nrepetitions = 2\n");
  const std::vector<std::string> base{"bench", "--source.synthetic.n", "50", "--algorithms", "RFF,ORCCA2",
                                      "--pool_factor", "3", "--no-timing"};
  const auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return cli(args);
  };
  const Run from_file = with({"--config", conf.string()});
  REQUIRE(from_file.code == 0);
  CHECK(lines(from_file.out) == 1 + 2 * 2 * 2);
  CHECK(from_file.out == with({"--seed", "5", "--m_grid", "6,8", "--repetitions", "2"}).out);

  const Run overridden = with({"--config", conf.string(), "--seed", "9", "--m_grid", "6"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out == with({"--seed", "9", "--m_grid", "6", "--repetitions", "2"}).out);
  CHECK(lines(overridden.out) == 1 + 2 * 2);
  fs::remove(conf);
}

TEST_CASE("out file") {
  const fs::path dst = fs::temp_directory_path() / "rfcca_cli_out.csv";
  const Run r = cli(small("bench", {"--out", dst.string()}));
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(dst) == cli(small("bench")).out);
  fs::remove(dst);
  CHECK(cli(small("bench", {"--out", "/nonexistent/dir/x.csv"})).code == 2);
}

TEST_CASE("kcca, spectral and select subcommands") {
  const Run k = cli({"kcca", "--source.synthetic.n", "40", "--no-timing"});
  REQUIRE(k.code == 0);
  CHECK(lines(k.out) == 2);
  CHECK(k.out.find("\nKCCA,40,0,0,") != std::string::npos);

  const Run s = cli({"spectral", "--source.synthetic.n", "40", "--spectral.trials", "3", "--spectral.M", "8"});
  REQUIRE(s.code == 0);
  CHECK(lines(s.out) == 4);
  CHECK(s.out.rfind("record=trial trial=0 ", 0) == 0);
  CHECK(s.out.find("record=summary mode=ls n=40 ") != std::string::npos);

  const Run sel = cli({"select", "--source.synthetic.n", "40", "--select.M", "4", "--pool_factor", "2"});
  REQUIRE(sel.code == 0);
  CHECK(sel.out.rfind("view,index,score,chosen,weight_ratio\n", 0) == 0);
  CHECK(lines(sel.out) == 1 + 2 * 8);
}

TEST_CASE("exit codes") {
  CHECK(cli({"bench", "--help"}).code == 0);
  CHECK(cli({}).code == 2);
  CHECK(cli({"bench", "--bogus"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli(small("bench", {"--mu", "-1"})).code == 2);
  CHECK(cli(small("bench", {"--pool_size", "3"})).code == 2);
  CHECK(cli(small("bench", {"--config", "/nonexistent/rfcca.conf"})).code == 2);
  const fs::path bad = temp_file("bad.conf", "this line has no separator\n");
  CHECK(cli(small("bench", {"--config", bad.string()})).code == 2);
  fs::remove(bad);

  CHECK(cli({"bench", "--source.csv.path", "/nonexistent/data.csv", "--source.csv.x_columns", "0",
             "--source.csv.y_columns", "1"})
            .code == 3);
  const fs::path csv = temp_file("d.csv", "a,b\n1,2\n3,4\n5,6\n");
  CHECK(cli({"bench", "--source.csv.path", csv.string(), "--source.csv.x_columns", "a", "--source.csv.y_columns",
             "zzz"})
            .code == 3);
  fs::remove(csv);

  const Run numerical = cli(small("bench", {"--sigma", "1e308"}));
  CHECK(numerical.code == 4);
  CHECK_FALSE(numerical.err.empty());
}

TEST_CASE("dropped row warning") {
  const fs::path csv = temp_file("w.csv", [] {
    std::ostringstream s;
    s << "x1,x2,y\n";
    for (int i = 0; i < 30; ++i) s << i * 0.37 << ',' << (i * 7 % 11) << ',' << (i * i % 13) << '\n';
    s << "1,,2\n";
    return s.str();
  }());
  const std::vector<std::string> args{"kcca", "--source.csv.path", csv.string(), "--source.csv.x_columns", "x1,x2",
                                      "--source.csv.y_columns", "y", "--no-timing"};
  const Run r = cli(args);
  REQUIRE(r.code == 0);
  CHECK(r.err.find("dropped 1 rows") != std::string::npos);
  CHECK(r.out.find("\nKCCA,30,") != std::string::npos);
  auto quiet = args;
  quiet.push_back("--quiet");
  CHECK(cli(quiet).err.empty());
  fs::remove(csv);
}

TEST_CASE("installed binary") {
  const auto status = [](const std::string& args) {
    const int s = std::system((std::string(RFCCA_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status("--help") == 0);
  CHECK(status("bench --bogus") == 2);
  CHECK(status("bench --source.csv.path /nonexistent.csv --source.csv.x_columns 0 --source.csv.y_columns 1") == 3);
  CHECK(status("bench --source.synthetic.n 30 --m_grid 4 --repetitions 1 --algorithms RFF --sigma 1e308") == 4);

  const fs::path dst = fs::temp_directory_path() / "rfcca_cli_bin.csv";
  REQUIRE(status("bench --source.synthetic.n 50 --m_grid 6 --repetitions 2 --algorithms RFF,ORCCA2 "
                 "--pool_factor 3 --no-timing --out " + dst.string()) == 0);
  CHECK(slurp(dst) == cli(small("bench")).out);
  fs::remove(dst);
}
