#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
};

Outcome run(const std::string& args) {
  std::string cmd = std::string(CLAUSEKIT_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / "clausekit_cli_test";
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const std::string kFixtures = std::string(CLAUSEKIT_TEST_DATA) + "/circus_fixtures.tsv";

}  // namespace

TEST(Cli, Version) {
  Outcome r = run("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("checkpoint_schema=1"), std::string::npos);
  EXPECT_NE(r.out.find("csv_schema=1"), std::string::npos);
}

TEST(Cli, ConvertEnglishWithStub) {
  fs::path d = scratch();
  std::ofstream(d / "in.txt") << "The circus has a Ferris wheel or a rollercoaster.";
  Outcome r = run("convert " + (d / "in.txt").string() + " --mode english --translator stub:" + kFixtures + " --out " +
              (d / "out.cnf").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(d / "out.cnf"), "p cnf 2 1\n1 2 0\n");
  EXPECT_EQ(slurp(d / "out.cnf.sym"), "P\t1\tThe circus has a ferris wheel\nQ\t2\tThe circus has a rollercoaster\n");
}

TEST(Cli, ConvertExpressions) {
  fs::path d = scratch();
  std::ofstream(d / "e.txt") << "Implies(P, Q)\nP\n";
  Outcome r = run("convert " + (d / "e.txt").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "p cnf 2 2\n-1 2 0\n1 0\n");
}

TEST(Cli, InputErrorsExitTwo) {
  fs::path d = scratch();
  std::ofstream(d / "empty.txt") << "   \n";
  EXPECT_EQ(run("convert " + (d / "empty.txt").string() + " --mode english --translator stub:" + kFixtures).code, 2);
  std::ofstream(d / "broken.txt") << "This reply is broken.";
  EXPECT_EQ(run("convert " + (d / "broken.txt").string() + " --mode english --translator stub:" + kFixtures).code, 2);
  std::ofstream(d / "bad.cnf") << "p cnf 2 1\n1 3 0\n";
  EXPECT_EQ(run("solve " + (d / "bad.cnf").string()).code, 2);
  EXPECT_EQ(run("solve " + (d / "missing.cnf").string()).code, 2);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("solve").code, 1);
  EXPECT_EQ(run("solve x.cnf --heuristic nope").code, 1);
}

TEST(Cli, SolveExitCodes) {
  fs::path d = scratch();
  std::ofstream(d / "sat.cnf") << "p cnf 2 2\n1 2 0\n-1 0\n";
  std::ofstream(d / "unsat.cnf") << "p cnf 1 2\n1 0\n-1 0\n";
  Outcome sat = run("solve " + (d / "sat.cnf").string());
  EXPECT_EQ(sat.code, 10);
  EXPECT_NE(sat.out.find("s SATISFIABLE\nv -1 2 0\n"), std::string::npos);
  EXPECT_EQ(run("solve " + (d / "unsat.cnf").string()).code, 20);
  EXPECT_EQ(run("solve " + (d / "unsat.cnf").string() + " --heuristic random").code, 20);
}

TEST(Cli, GenerateFeaturesTrainSolveBench) {
  fs::path d = scratch();
  ASSERT_EQ(run("generate --out " + (d / "set").string() + " --count 5 --seed 8").code, 0);
  const std::string inst = (d / "set" / "uf20-0001.cnf").string();
  Outcome f = run("features " + inst);
  EXPECT_EQ(f.code, 0);
  EXPECT_EQ(std::count(f.out.begin(), f.out.end(), '\n'), 48);
  EXPECT_EQ(f.out.rfind("num_vars=20\n", 0), 0u) << f.out.substr(0, 40);

  const std::string ckpt = (d / "p.ckpt").string();
  ASSERT_EQ(run("train --dataset " + (d / "set").string() + " --steps 200 --window 64 --hidden 16 --out " + ckpt).code, 0);
  EXPECT_EQ(slurp(ckpt + ".log.csv").substr(0, 39), "window,steps,mean_reward,mean_decisions");
  EXPECT_EQ(run("solve " + inst + " --heuristic rl --policy " + ckpt).code, 10);

  const std::string csv = (d / "b.csv").string();
  Outcome b = run("bench --all --reps 1 --dataset " + (d / "set").string() + " --policy " + ckpt + " --out " + csv);
  ASSERT_EQ(b.code, 0);
  std::string text = slurp(csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 11);
  EXPECT_NE(slurp(csv + ".summary").find("fraction_rl_faster="), std::string::npos);

  std::ofstream(d / "small.cnf") << "p cnf 3 1\n1 2 3 0\n";
  EXPECT_EQ(run("solve " + (d / "small.cnf").string() + " --heuristic rl --policy " + ckpt).code, 2);
}
