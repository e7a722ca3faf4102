#include <bohrrec.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string &args, bool merge_stderr = false)
{
  std::string cmd = std::string("\"") + BOHRREC_CLI + "\" " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE *f = popen(cmd.c_str(), "r");
  if (!f) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch()
{
  static fs::path p = [] {
    auto d = fs::temp_directory_path() / ("bohrrec_cli_" + std::to_string(getpid()));
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string read_file(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path &p, const std::string &s) { std::ofstream(p, std::ios::binary) << s; }

} // namespace

TEST(Cli, WitnessExample)
{
  auto r = run("witness --set 1,2 --n 9");
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["kind"], "witness");
  EXPECT_EQ(j["payload"]["A"], (json{0, 3, 6}));
  EXPECT_EQ(j["payload"]["density"], (json{{"num", "1"}, {"den", "3"}}));
}

TEST(Cli, CyclicAndUnion)
{
  auto c = run("witness --set 1 --cyclic --mod 6");
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(json::parse(c.out)["payload"]["A"], (json{0, 2, 4}));
  auto u = run("witness --union 1:2 --union 3:9");
  ASSERT_EQ(u.code, 0);
  EXPECT_EQ(json::parse(u.out)["payload"]["combined"]["N"], 18);
  EXPECT_EQ(run("witness --union 1:2 --union 3:4").code, 1);
  auto d = run("witness --set 1 --delta 0.45 --n-range 10:50");
  ASSERT_EQ(d.code, 0);
  EXPECT_EQ(json::parse(d.out)["payload"]["N"], 10);
  EXPECT_EQ(run("witness --set 1 --delta 0.5 --n-range 1:40").code, 1);
}

TEST(Cli, MarginExample)
{
  auto r = run("margin --set 1 --dim 1 --tol 1e-9");
  ASSERT_EQ(r.code, 0);
  auto p = json::parse(r.out)["payload"];
  EXPECT_EQ(p["lower"], (json{{"num", "1"}, {"den", "2"}}));
  EXPECT_EQ(p["upper"], (json{{"num", "1"}, {"den", "2"}}));
}

TEST(Cli, TileAndCount)
{
  auto t = run("tile --p 2 --k 1 --eps 0.95");
  ASSERT_EQ(t.code, 0);
  EXPECT_EQ(json::parse(t.out)["d"], 5);
  auto c = run("count --p 2 --k 1 --d 1:4 --csv");
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(c.out.rfind("p,k,d,family,count,total,fraction\n", 0), 0u);
  EXPECT_EQ(std::count(c.out.begin(), c.out.end(), '\n'), 5);
  EXPECT_NE(c.out.find("2,1,3,E,2,8,0.25"), std::string::npos);
}

TEST(Cli, ExitCodes)
{
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("witness --set 1 --n 9 --bogus").code, 2);
  EXPECT_EQ(run("witness --set 1,x --n 9").code, 2);
  EXPECT_EQ(run("margin --set 1 --dim 1 --tol zero").code, 2);
  EXPECT_EQ(run("verify").code, 2);
  EXPECT_EQ(run("verify " + (scratch() / "missing.json").string()).code, 2);
  EXPECT_EQ(run("tower --p 4 --k 1 --eps 1/2").code, 1);
  auto h = run("--help", true);
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("pipeline"), std::string::npos);
}

TEST(Cli, Determinism)
{
  auto a = run("tower --p 2 --k 1 --eps 0.95 --seed 5");
  auto b = run("tower --p 2 --k 1 --eps 0.95 --seed 5");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto f = scratch() / "tower.json";
  ASSERT_EQ(run("tower --p 2 --k 1 --eps 0.95 --seed 5 -o " + f.string()).code, 0);
  EXPECT_EQ(read_file(f), a.out);
  auto m1 = run("margin --set 1,2,3 --dim 2 --tol 1e-4"), m2 = run("--threads 4 margin --set 1,2,3 --dim 2 --tol 1e-4");
  EXPECT_EQ(m1.out, m2.out);
}

TEST(Cli, VerifyRoundTripAndTamper)
{
  auto f = scratch() / "t.json";
  ASSERT_EQ(run("tower --p 2 --k 1 --eps 0.95 --out " + f.string()).code, 0);
  auto ok = run("verify " + f.string());
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(json::parse(ok.out)["ok"].get<bool>());

  // byte flip inside the payload
  std::string text = read_file(f);
  auto pos = text.find("\"separation_min\"");
  ASSERT_NE(pos, std::string::npos);
  text[pos + 30] = static_cast<char>(text[pos + 30] ^ 0x01);
  auto g = scratch() / "flip.json";
  write_file(g, text);
  EXPECT_EQ(run("verify " + g.string()).code, 1);

  // semantic tamper with a fresh digest names the fact
  auto env = json::parse(read_file(f));
  auto rho = bohrrec::rational_of(env["payload"]["spec"]["rho"]) * 4;
  env["payload"]["spec"]["rho"] = bohrrec::to_json(bohrrec::Rational(rho));
  env["digest"] = bohrrec::payload_digest(env["payload"]);
  auto h = scratch() / "sem.json";
  write_file(h, env.dump(2));
  auto bad = run("verify " + h.string(), true);
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("failed: translates_separated"), std::string::npos);

  write_file(scratch() / "junk.json", "{\"kind\":");
  EXPECT_EQ(run("verify " + (scratch() / "junk.json").string()).code, 1);
}

TEST(Cli, Svg)
{
  auto t = scratch() / "t5.json";
  ASSERT_EQ(run("tower --p 2 --k 1 --eps 0.95 -o " + t.string()).code, 0);
  EXPECT_EQ(run("export-svg --in " + t.string()).code, 1);
  auto three = scratch() / "u3.json";
  write_file(three, bohrrec::to_json(bohrrec::approx_hamming(3, 1, bohrrec::make_rational(1, 8))).dump());
  EXPECT_EQ(run("export-svg --in " + three.string()).code, 1);

  auto a = run("export-svg --hamming 1,0,1/8 --levels 2 --alpha 1/2");
  auto b = run("export-svg --hamming 1,0,1/8 --levels 2 --alpha 1/2");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("<svg", 0), 0u);
  EXPECT_NE(a.out.find("id=\"level1\""), std::string::npos);
  EXPECT_EQ(a.out.find("id=\"level2\""), std::string::npos);

  auto two = scratch() / "u2.json";
  write_file(two, bohrrec::to_json(bohrrec::approx_hamming(2, 1, bohrrec::make_rational(1, 8))).dump());
  auto s = run("export-svg --in " + two.string());
  ASSERT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("</svg>"), std::string::npos);
}

TEST(Cli, Oracle)
{
  auto c = run("oracle cells --p 2 --d 3 --k 1");
  ASSERT_EQ(c.code, 0);
  EXPECT_TRUE(json::parse(c.out).contains("cells"));
  auto a = run("oracle avoid --set 1,2 --n 9");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(json::parse(a.out)["max_size"], 3);
  EXPECT_EQ(run("oracle").code, 2);
}

TEST(Cli, PipelineSmall)
{
  auto f = scratch() / "run.json";
  auto r = run("pipeline --delta 0.30 --delta-prime 0.35 --stages 1 --seed 7 --table -o " + f.string(), true);
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("|S_k|"), std::string::npos);
  auto env = json::parse(read_file(f));
  EXPECT_EQ(env["kind"], "pipeline");
  EXPECT_EQ(env["payload"]["stages"][0]["S"], (json{1}));
  EXPECT_EQ(run("verify " + f.string()).code, 0);
  EXPECT_EQ(run("--threads 3 pipeline --stages 1").out, run("pipeline --stages 1").out);
  EXPECT_EQ(run("pipeline --delta 0.4 --delta-prime 0.35").code, 2);
  EXPECT_EQ(run("pipeline --ambient 2Z --stages 1").code, 1);
}
