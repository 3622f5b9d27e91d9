// Wire-level tests: drive the installed binary exactly as a user would and
// assert on files and exit codes.
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccmn/dataio.hpp"
#include "ccmn/metrics.hpp"
#include "ccmn/model.hpp"

using namespace ccmn;
namespace fs = std::filesystem;

namespace {

const std::string kBin = CCMN_BINARY_PATH;

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd = kBin + " " + args + " > " + stdout_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::current_path() / "cli_scratch") {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("inject-noise is deterministic and honors explicit rates") {
  Scratch tmp;
  auto synth = generate_synthetic(60, 3, 2, 0.05, 5);
  write_multilabel_svm(synth.data, tmp / "clean.svm");

  SUBCASE("explicit all-zero rates copy the dataset byte for byte") {
    write_noise_spec(NoiseSpec::zero(2), tmp / "zero.rho");
    REQUIRE(run("inject-noise --input " + (tmp / "clean.svm") + " --output " +
                (tmp / "out.svm") + " --mode explicit --rho-file " + (tmp / "zero.rho") +
                " --seed 3") == 0);
    CHECK(slurp(tmp / "out.svm") == slurp(tmp / "clean.svm"));
  }

  SUBCASE("pml mode writes a sidecar with rho_pos identically zero") {
    REQUIRE(run("inject-noise --input " + (tmp / "clean.svm") + " --output " +
                (tmp / "pml.svm") + " --mode pml --seed 4") == 0);
    auto spec = read_noise_spec(tmp / "pml.svm.noise");
    for (double r : spec.rho_pos) CHECK(r == 0.0);
    for (double r : spec.rho_neg) CHECK(r >= 0.1);
  }

  SUBCASE("same flags and seed give identical bytes") {
    const std::string flags = "inject-noise --input " + (tmp / "clean.svm") + " --mode ccmn" +
                              " --seed 11 --output ";
    REQUIRE(run(flags + (tmp / "a.svm")) == 0);
    REQUIRE(run(flags + (tmp / "b.svm")) == 0);
    CHECK(slurp(tmp / "a.svm") == slurp(tmp / "b.svm"));
    CHECK(slurp(tmp / "a.svm.noise") == slurp(tmp / "b.svm.noise"));
  }
}

TEST_CASE("train writes checkpoint, log and a replayable manifest") {
  Scratch tmp;
  auto synth = generate_synthetic(120, 3, 2, 0.1, 9);
  auto split = split_dataset(synth.data, {0.5, 0.3, 0.2, 9});
  write_multilabel_svm(split.train, tmp / "train.svm");
  write_multilabel_svm(split.validation, tmp / "val.svm");

  const std::string base = "train --train " + (tmp / "train.svm") + " --val " +
                           (tmp / "val.svm") + " --rho-zero --objective hamming-corrected" +
                           " --loss square --model linear --epochs 8 --lr-grid 5e-2,5e-3" +
                           " --batch 16 --seed 2";

  SUBCASE("defaults echo the protocol hyperparameters in the manifest") {
    REQUIRE(run("train --train " + (tmp / "train.svm") + " --val " + (tmp / "val.svm") +
                " --rho-zero --epochs 2 --out " + (tmp / "d.ckpt")) == 0);
    auto manifest = nlohmann::json::parse(slurp(tmp / "d.ckpt.manifest.json"));
    CHECK(manifest["l2"].get<double>() == 1e-4);
    CHECK(manifest["lr_grid"].get<std::vector<double>>() ==
          std::vector<double>{5e-2, 5e-3, 5e-4});
    CHECK(manifest["objective"] == "hamming-corrected");
    // epochs was overridden for speed; the compiled-in default is 200.
  }

  SUBCASE("corrected with zero rates equals plain, bitwise") {
    REQUIRE(run(base + " --out " + (tmp / "corr.ckpt")) == 0);
    const std::string plain_cmd = "train --train " + (tmp / "train.svm") + " --val " +
                                  (tmp / "val.svm") +
                                  " --rho-zero --objective hamming-plain --loss square" +
                                  " --model linear --epochs 8 --lr-grid 5e-2,5e-3" +
                                  " --batch 16 --seed 2 --out " + (tmp / "plain.ckpt");
    REQUIRE(run(plain_cmd) == 0);
    CHECK(slurp(tmp / "corr.ckpt") == slurp(tmp / "plain.ckpt"));
    CHECK(slurp(tmp / "corr.ckpt.log") == slurp(tmp / "plain.ckpt.log"));
  }

  SUBCASE("the manifest alone replays the run identically") {
    REQUIRE(run(base + " --out " + (tmp / "m.ckpt")) == 0);
    auto manifest = nlohmann::json::parse(slurp(tmp / "m.ckpt.manifest.json"));
    std::ostringstream cmd;
    cmd << "train --train " << manifest["train"].get<std::string>() << " --val "
        << manifest["val"].get<std::string>();
    if (manifest["rho_zero"].get<bool>()) cmd << " --rho-zero";
    if (!manifest["noise"].get<std::string>().empty())
      cmd << " --noise " << manifest["noise"].get<std::string>();
    cmd << " --objective " << manifest["objective"].get<std::string>();
    cmd << " --loss " << manifest["loss"].get<std::string>();
    cmd << " --model " << manifest["model"].get<std::string>();
    if (manifest["dummy_threshold"].get<bool>()) cmd << " --dummy-threshold";
    cmd << " --epochs " << manifest["epochs"].get<int>();
    cmd << " --lr-grid ";
    const auto grid = manifest["lr_grid"].get<std::vector<double>>();
    for (std::size_t i = 0; i < grid.size(); ++i) cmd << (i ? "," : "") << grid[i];
    cmd << " --l2 " << manifest["l2"].get<double>();
    cmd << " --batch " << manifest["batch"].get<std::size_t>();
    cmd << " --hidden " << manifest["hidden"].get<std::size_t>();
    cmd << " --clamp " << manifest["clamp"].get<double>();
    cmd << " --selection " << manifest["selection"].get<std::string>();
    cmd << " --seed " << manifest["seed"].get<uint64_t>();
    cmd << " --out " << (tmp / "replay.ckpt");
    REQUIRE(run(cmd.str()) == 0);
    CHECK(slurp(tmp / "replay.ckpt") == slurp(tmp / "m.ckpt"));
    CHECK(slurp(tmp / "replay.ckpt.log") == slurp(tmp / "m.ckpt.log"));
  }

  SUBCASE("usage errors") {
    CHECK(run("train --train " + (tmp / "train.svm") + " --val " + (tmp / "val.svm") +
              " --out " + (tmp / "x.ckpt")) != 0);  // neither --noise nor --rho-zero
    CHECK(run(base + " --dummy-threshold --out " + (tmp / "x.ckpt")) != 0);
  }
}

TEST_CASE("evaluate reports the library metrics") {
  Scratch tmp;
  auto synth = generate_synthetic(80, 4, 3, 0.1, 21);
  write_multilabel_svm(synth.data, tmp / "test.svm");

  // A checkpoint whose rows are the generating hyperplanes is a perfect
  // sign predictor for this data.
  ModelConfig cfg{Architecture::Linear, 4, 3, false, 128};
  DecisionModel model(cfg);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t t = 0; t < 4; ++t)
      model.params()[static_cast<Eigen::Index>(t * 3 + j)] = synth.hyperplanes[j][t];
  save_checkpoint({model, NoiseSpec::zero(3)}, tmp / "perfect.ckpt");

  REQUIRE(run("evaluate --model " + (tmp / "perfect.ckpt") + " --test " + (tmp / "test.svm") +
              " --report " + (tmp / "report.json"),
              tmp / "stdout.txt") == 0);

  const std::string out = slurp(tmp / "stdout.txt");
  CHECK(out.find("hamming_loss 0.000000") != std::string::npos);
  CHECK(out.find("ranking_loss 0.000000") != std::string::npos);
  CHECK(out.find("average_precision 1.000000") != std::string::npos);

  auto report = nlohmann::json::parse(slurp(tmp / "report.json"));
  CHECK(report["dataset"]["n"].get<std::size_t>() == 80);
  CHECK(report["metrics"]["hamming_loss"].get<double>() == 0.0);
  CHECK(report["diagnostics"]["mu_independent"].get<double>() == 1.0);

  // CLI output equals the library composition of predict_sign and forward.
  std::vector<LabelVector> preds;
  for (std::size_t i = 0; i < synth.data.size(); ++i) {
    auto f = model.forward(synth.data.rows[i]);
    preds.push_back(predict_sign(f));
  }
  CHECK(hamming_loss(preds, synth.data.labels) == 0.0);

  // Repeated evaluation is byte-identical.
  REQUIRE(run("evaluate --model " + (tmp / "perfect.ckpt") + " --test " + (tmp / "test.svm") +
              " --report " + (tmp / "report2.json")) == 0);
  CHECK(slurp(tmp / "report2.json") == slurp(tmp / "report.json"));

  // Shape mismatch is rejected.
  auto other = generate_synthetic(10, 5, 3, 0.1, 22);
  write_multilabel_svm(other.data, tmp / "wide.svm");
  CHECK(run("evaluate --model " + (tmp / "perfect.ckpt") + " --test " + (tmp / "wide.svm") +
            " --report " + (tmp / "bad.json")) != 0);
}

TEST_CASE("verify runs the oracle suite") {
  Scratch tmp;
  CHECK(run("verify --trials 40 --pair-trials 60 --seed 1", tmp / "verify.txt") == 0);
  const std::string out = slurp(tmp / "verify.txt");
  CHECK(out.find("unbiasedness-independent") != std::string::npos);
  CHECK(out.find("unbiasedness-dependent") != std::string::npos);
  CHECK(out.find("pairwise-closed-form-vs-linsolve") != std::string::npos);
  CHECK(out.find("zero-noise-identity") != std::string::npos);
  CHECK(out.find("FAIL") == std::string::npos);

  CHECK(run("verify --trials 10 --pair-trials 10 --inject-error") == 1);
}

TEST_CASE("experiment aggregates repeats") {
  Scratch tmp;
  auto synth = generate_synthetic(150, 3, 2, 0.1, 33);
  write_multilabel_svm(synth.data, tmp / "data.svm");
  REQUIRE(run("experiment --data " + (tmp / "data.svm") +
              " --mode pml --objective upml-hamming --loss square --model linear" +
              " --repeats 2 --epochs 5 --lr-grid 5e-2 --batch 16 --out " +
              (tmp / "exp.json")) == 0);
  auto report = nlohmann::json::parse(slurp(tmp / "exp.json"));
  CHECK(report["repeats"].size() == 2);
  CHECK(report["aggregate"]["hamming_loss"].contains("mean"));
  CHECK(report["aggregate"]["hamming_loss"].contains("std"));
}
