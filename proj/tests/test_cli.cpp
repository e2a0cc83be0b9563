#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "watermark/bits.hpp"

// End-to-end checks of the wmkit binary. WMKIT_BIN is injected by CMake.

namespace {

struct TempDir {
  std::string path;
  TempDir() {
    char tmpl[] = "/tmp/wmkit_test_XXXXXX";
    path = mkdtemp(tmpl);
  }
  std::string file(const std::string& name) const { return path + "/" + name; }
};

int run(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

const std::string kBin = WMKIT_BIN;

} // namespace

TEST_CASE("cli pipeline: keygen, embed, detect, verify") {
  TempDir dir;
  const std::string key = dir.file("key.txt");
  const std::string model = dir.file("model.cfg");
  const std::string payload = dir.file("payload.bits");
  const std::string report = dir.file("report.txt");

  spit(model, "kind=band\nband_low=0.35\nband_high=0.65\nmax_steps=4000\n");

  REQUIRE(run(kBin + " keygen --lambda 16 --seed 1 --out " + key) == 0);
  REQUIRE(run(kBin + " embed --key " + key + " --model-config " + model +
              " --prompt \"what is a watermark?\" --seed 5 --out " +
              payload) == 0);
  REQUIRE(run(kBin + " detect --key " + key + " --in " + payload + " --out " +
              report) == 0);
  CHECK(run(kBin + " verify --in " + report + " --payload " + payload +
            " --prompt \"what is a watermark?\"") == 0);

  // swapped prompt: tampered, exit 2
  CHECK(run(kBin + " verify --in " + report + " --payload " + payload +
            " --prompt \"something else entirely\"") == 2);

  // repeated runs are byte-identical
  const std::string payload2 = dir.file("payload2.bits");
  REQUIRE(run(kBin + " embed --key " + key + " --model-config " + model +
              " --prompt \"what is a watermark?\" --seed 5 --out " +
              payload2) == 0);
  CHECK(slurp(payload) == slurp(payload2));
}

TEST_CASE("cli detect on random bits exits 3") {
  TempDir dir;
  const std::string key = dir.file("key.txt");
  const std::string payload = dir.file("random.bits");
  const std::string report = dir.file("report.txt");

  REQUIRE(run(kBin + " keygen --lambda 16 --seed 2 --out " + key) == 0);
  std::string bits;
  unsigned long long x = 88172645463325252ull;
  for (int i = 0; i < 4096; ++i) {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    bits.push_back((x >> 60) & 1 ? '1' : '0');
  }
  spit(payload, bits + "\n");
  CHECK(run(kBin + " detect --key " + key + " --in " + payload + " --out " +
            report) == 3);
}

TEST_CASE("cli attack flips the requested budget") {
  TempDir dir;
  const std::string key = dir.file("key.txt");
  const std::string model = dir.file("model.cfg");
  const std::string payload = dir.file("payload.bits");
  const std::string attacked = dir.file("attacked.bits");
  const std::string report = dir.file("report.txt");

  spit(model, "kind=band\nband_low=0.35\nband_high=0.65\nmax_steps=3000\n");
  REQUIRE(run(kBin + " keygen --lambda 16 --seed 3 --out " + key) == 0);
  REQUIRE(run(kBin + " embed --key " + key + " --model-config " + model +
              " --prompt-file /dev/null --seed 6 --out " + payload) !=
          0); // empty prompt rejected
  REQUIRE(run(kBin + " embed --key " + key + " --model-config " + model +
              " --prompt hello --seed 6 --out " + payload) == 0);

  REQUIRE(run(kBin + " attack --in " + payload +
              " --attack-spec random_flip:gamma=25 --seed 9 --out " +
              attacked) == 0);
  const auto before = watermark::BitString::from_string(
      slurp(payload).substr(0, slurp(payload).find('\n')));
  const auto after = watermark::BitString::from_string(
      slurp(attacked).substr(0, slurp(attacked).find('\n')));
  CHECK(watermark::hamming_distance(before, after) == 25);

  // a flipped payload never verifies clean against the true prompt
  REQUIRE(run(kBin + " detect --key " + key + " --in " + attacked +
              " --out " + report) == 0);
  CHECK(run(kBin + " verify --in " + report + " --payload " + attacked +
            " --prompt hello") == 2);
}

TEST_CASE("cli embeds over a token vocabulary model") {
  TempDir dir;
  const std::string key = dir.file("key.txt");
  const std::string vocab = dir.file("vocab.txt");
  const std::string model = dir.file("model.cfg");
  const std::string payload = dir.file("payload.bits");
  const std::string report = dir.file("report.txt");

  // near-uniform 8-token vocabulary: plenty of entropy per bit
  spit(vocab, "000 0.14\n001 0.12\n010 0.13\n011 0.11\n"
              "100 0.15\n101 0.12\n110 0.13\n111 0.10\n");
  spit(model, "kind=vocab\nvocab_file=" + vocab + "\nmax_steps=4000\n");

  REQUIRE(run(kBin + " keygen --lambda 16 --seed 11 --out " + key) == 0);
  REQUIRE(run(kBin + " embed --key " + key + " --model-config " + model +
              " --prompt \"token walk\" --seed 12 --out " + payload) == 0);
  REQUIRE(run(kBin + " detect --key " + key + " --in " + payload + " --out " +
              report) == 0);
  CHECK(run(kBin + " verify --in " + report + " --payload " + payload +
            " --prompt \"token walk\"") == 0);

  // the same prompt given as a bit file verifies identically
  const std::string prompt_bits = dir.file("prompt.bits");
  spit(prompt_bits,
       watermark::bits_from_bytes("token walk").to_string() + "\n");
  CHECK(run(kBin + " verify --in " + report + " --payload " + payload +
            " --prompt-file " + prompt_bits) == 0);
}

TEST_CASE("cli analyze sweep and battery") {
  TempDir dir;
  const std::string key = dir.file("key.txt");
  const std::string model = dir.file("model.cfg");
  const std::string table = dir.file("sweep.txt");
  const std::string battery = dir.file("battery.txt");

  spit(model, "kind=band\nband_low=0.35\nband_high=0.65\nmax_steps=100000\n");
  REQUIRE(run(kBin + " keygen --lambda 16 --seed 21 --out " + key) == 0);
  REQUIRE(run(kBin + " analyze --mode sweep --key " + key +
              " --model-config " + model +
              " --seed 22 --trials 10 --gammas 0,1 --out " + table) == 0);
  const std::string sweep = slurp(table);
  CHECK(sweep.find("0 1 10") != std::string::npos);   // gamma 0, eps 1
  CHECK(sweep.find("0 0.25 10") != std::string::npos); // gamma 0, eps 1/4

  REQUIRE(run(kBin + " analyze --mode battery --key " + key +
              " --model-config " + model +
              " --seed 23 --samples 20000 --out " + battery) == 0);
  CHECK(slurp(battery).find("pass True") != std::string::npos);
}

TEST_CASE("cli rejects malformed inputs with diagnostics") {
  TempDir dir;
  const std::string key = dir.file("key.txt");
  spit(key, "nothex\n16\n");
  CHECK(run(kBin + " detect --key " + key + " --in /dev/null --out " +
            dir.file("r.txt")) == 1);
  CHECK(run(kBin + " keygen --lambda 16 --out " + dir.file("k.txt")) == 1);
  CHECK(run(kBin + " verify --in /dev/null --payload /dev/null") == 1);
}
