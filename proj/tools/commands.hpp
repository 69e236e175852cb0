#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ebl/elastic_loss.hpp"
#include "ebl/phantom.hpp"
#include "ebl/toy_net.hpp"

namespace ebl::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsageOrIo = 2 };

struct PilOptions {
    double alpha = 0.35;
    double beta = 0.25;
    std::string kind = "hardtanh";
    double prefactor = 1.0 / (8.0 * 3.14159265358979323846);
    bool same_orientation = false;
    double gt_sigma = 0.0;

    PilParams params() const;
};

struct PhantomArgs {
    std::string out;
    int n = 32;
    int size = 64;
    std::uint64_t seed = 7;
    double contrast = 0.6;
    double noise = 0.1;
    int branches = PhantomSpec{}.n_branches;
    double min_width = PhantomSpec{}.min_width;
    double max_width = PhantomSpec{}.max_width;
};

struct EnergyArgs {
    std::string gt;
    std::string pred;
    PilOptions pil;
    bool oracle = false;
    int pad = 1;
};

struct GradcheckArgs {
    int size = 12;
    int seeds = 10;
    std::string loss = "pil";
    bool net = false;
    PilOptions pil;
    int params = 20;
};

struct EvolveArgs {
    std::string gt;
    bool demo = false;
    std::string init = "shifted";
    int shift = 6;
    double margin = 0.2;
    PilOptions pil{1.0};
    double eta = 0.5;
    int steps = 500;
    double tol = 1e-8;
    int snapshot_every = 0;
    std::string out;
};

struct TrainArgs {
    std::string data;
    std::string split = "train";
    std::string loss = "pil";
    double bce_weight = 1.0;
    PilOptions pil;
    int epochs = 200;
    double lr = 1e-3;
    int batch_size = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string log;
};

struct EvalArgs {
    std::string model;
    std::string data;
    std::string split = "test";
    std::string out;
    std::string method = "toynet";
    std::string loss = "unspecified";
    bool oracle = false;
    double threshold = 0.5;
};

struct BenchArgs {
    std::vector<int> sizes{16, 32, 64, 128};
    int repeats = 5;
    std::string out;
};

int run_phantom(const PhantomArgs& args);
int run_energy(const EnergyArgs& args);
int run_gradcheck(const GradcheckArgs& args);
int run_evolve(const EvolveArgs& args);
int run_train(const TrainArgs& args);
int run_eval(const EvalArgs& args);
int run_bench(const BenchArgs& args);

/// Samples listed in DIR/manifest.csv; split is "train" (even rows), "test" (odd) or "all".
std::vector<std::pair<std::string, Sample>> load_dataset(const std::string& dir,
                                                         const std::string& split);

}  // namespace ebl::cli
