// ebl: phantoms, elastic boundary energies, gradient checks, level-set
// evolution, toy training/evaluation and the FFT-vs-direct benchmark.

#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "commands.hpp"

namespace {

using namespace ebl::cli;

void add_pil_options(CLI::App* cmd, PilOptions& pil) {
    cmd->add_option("--alpha", pil.alpha, "Interaction strength")->capture_default_str();
    cmd->add_option("--beta", pil.beta, "Heaviside half-width")->capture_default_str();
    cmd->add_option("--kind", pil.kind, "Heaviside form")
        ->check(CLI::IsMember({"hardtanh", "sinusoidal"}))
        ->capture_default_str();
    cmd->add_option("--prefactor", pil.prefactor, "Overall energy scale (default 1/(8*pi))");
    cmd->add_flag("--same-orientation", pil.same_orientation,
                  "Use D = G + alpha*H(phi) instead of G - alpha*H(phi) (ablation)");
    cmd->add_option("--gt-sigma", pil.gt_sigma, "Gaussian smoothing of the ground truth, pixels")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Elastic-interaction boundary loss toolkit"};
    app.require_subcommand(1);

    PhantomArgs phantom;
    auto* cmd_phantom = app.add_subcommand("phantom", "Write synthetic vessel phantoms as PGM pairs");
    cmd_phantom->add_option("--out", phantom.out, "Output directory")->required();
    cmd_phantom->add_option("--n", phantom.n, "Number of phantoms")->capture_default_str();
    cmd_phantom->add_option("--size", phantom.size, "Image side length")->capture_default_str();
    cmd_phantom->add_option("--seed", phantom.seed, "Base seed (image i uses seed+i)")->capture_default_str();
    cmd_phantom->add_option("--contrast", phantom.contrast, "Vessel-to-background gap")->capture_default_str();
    cmd_phantom->add_option("--noise", phantom.noise, "Gaussian noise sigma")->capture_default_str();
    cmd_phantom->add_option("--branches", phantom.branches, "Vessel segments per tree")->capture_default_str();
    cmd_phantom->add_option("--min-width", phantom.min_width, "Minimum vessel half-width")->capture_default_str();
    cmd_phantom->add_option("--max-width", phantom.max_width, "Maximum vessel half-width")->capture_default_str();

    EnergyArgs energy;
    auto* cmd_energy = app.add_subcommand("energy", "Evaluate the boundary energy of a prediction");
    cmd_energy->add_option("--gt", energy.gt, "Ground-truth mask (PGM/PNG)")->required();
    cmd_energy->add_option("--pred", energy.pred, "Probability map (PGM/PNG)")->required();
    add_pil_options(cmd_energy, energy.pil);
    cmd_energy->add_flag("--oracle", energy.oracle, "Also run the O(N^2) direct sum (<= 64x64)");
    cmd_energy->add_option("--pad", energy.pad, "Also report the zero-padded energy with this factor");

    GradcheckArgs gradcheck;
    auto* cmd_grad = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
    cmd_grad->add_option("--size", gradcheck.size, "Grid side length")->capture_default_str();
    cmd_grad->add_option("--seeds", gradcheck.seeds, "Number of random instances")->capture_default_str();
    cmd_grad->add_option("--loss", gradcheck.loss, "Loss to check")
        ->check(CLI::IsMember({"pil", "bce", "dice", "surface", "pil+bce"}))
        ->capture_default_str();
    cmd_grad->add_flag("--net", gradcheck.net, "Check through the ToyNet parameters (tolerance 1e-4)");
    cmd_grad->add_option("--params", gradcheck.params, "Parameters sampled with --net")->capture_default_str();
    add_pil_options(cmd_grad, gradcheck.pil);

    EvolveArgs evolve;
    auto* cmd_evolve = app.add_subcommand("evolve", "Gradient flow of a prediction towards a mask");
    cmd_evolve->add_option("--gt", evolve.gt, "Ground-truth mask (PGM/PNG)");
    cmd_evolve->add_flag("--demo", evolve.demo, "Use a radius-6 disc centred on a 64x64 grid");
    cmd_evolve->add_option("--init", evolve.init, "Initial prediction")
        ->check(CLI::IsMember({"shifted", "uniform"}))
        ->capture_default_str();
    cmd_evolve->add_option("--shift", evolve.shift, "Horizontal shift for --init shifted")->capture_default_str();
    cmd_evolve->add_option("--margin", evolve.margin, "Soft start: P = 0.5 +- margin")->capture_default_str();
    add_pil_options(cmd_evolve, evolve.pil);
    cmd_evolve->add_option("--eta", evolve.eta, "Step size")->capture_default_str();
    cmd_evolve->add_option("--steps", evolve.steps, "Maximum steps")->capture_default_str();
    cmd_evolve->add_option("--tol", evolve.tol, "Relative energy change stopping tolerance")->capture_default_str();
    cmd_evolve->add_option("--snapshot-every", evolve.snapshot_every, "Write every n-th iterate")->capture_default_str();
    cmd_evolve->add_option("--out", evolve.out, "Output directory for energy.csv and snapshots");

    TrainArgs train;
    auto* cmd_train = app.add_subcommand(
        "train", "Train ToyNet on a phantom directory (200 epochs by default; pass --epochs 500 for a full-length run)");
    cmd_train->add_option("--data", train.data, "Directory written by 'phantom'")->required();
    cmd_train->add_option("--split", train.split, "train (even ids), test (odd ids) or all")
        ->check(CLI::IsMember({"train", "test", "all"}))
        ->capture_default_str();
    cmd_train->add_option("--loss", train.loss, "Training loss")
        ->check(CLI::IsMember({"pil", "bce", "dice", "surface", "pil+bce"}))
        ->capture_default_str();
    cmd_train->add_option("--bce-weight", train.bce_weight, "BCE weight for pil+bce")->capture_default_str();
    add_pil_options(cmd_train, train.pil);
    cmd_train->add_option("--epochs", train.epochs, "Epochs")->capture_default_str();
    cmd_train->add_option("--lr", train.lr, "Adam learning rate")->capture_default_str();
    cmd_train->add_option("--batch-size", train.batch_size, "Images per Adam step")->capture_default_str();
    cmd_train->add_option("--seed", train.seed, "Init and shuffle seed")->capture_default_str();
    cmd_train->add_option("--out", train.out, "Checkpoint path")->required();
    cmd_train->add_option("--log", train.log, "Per-epoch loss CSV (epoch,loss)");

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "Score a checkpoint on a phantom directory");
    cmd_eval->add_option("--model", eval.model, "Checkpoint written by 'train'");
    cmd_eval->add_option("--data", eval.data, "Directory written by 'phantom'")->required();
    cmd_eval->add_option("--split", eval.split, "train, test or all")
        ->check(CLI::IsMember({"train", "test", "all"}))
        ->capture_default_str();
    cmd_eval->add_option("--out", eval.out, "Metrics CSV (default stdout)");
    cmd_eval->add_option("--method", eval.method, "Value of the method column")->capture_default_str();
    cmd_eval->add_option("--loss", eval.loss, "Value of the loss column")->capture_default_str();
    cmd_eval->add_flag("--oracle", eval.oracle, "Score the ground truth itself (pipeline sanity check)");
    cmd_eval->add_option("--threshold", eval.threshold, "Foreground threshold (P >= t)")->capture_default_str();

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "Time FFT vs direct energy evaluation");
    cmd_bench->add_option("--sizes", bench.sizes, "Grid sizes (<= 128)")->delimiter(',')->capture_default_str();
    cmd_bench->add_option("--repeats", bench.repeats, "Timing repeats (median reported)")->capture_default_str();
    cmd_bench->add_option("--out", bench.out, "Also write the CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageOrIo;
    }

    try {
        if (*cmd_phantom) return run_phantom(phantom);
        if (*cmd_energy) return run_energy(energy);
        if (*cmd_grad) return run_gradcheck(gradcheck);
        if (*cmd_evolve) return run_evolve(evolve);
        if (*cmd_train) return run_train(train);
        if (*cmd_eval) return run_eval(eval);
        if (*cmd_bench) return run_bench(bench);
    } catch (const std::exception& e) {
        std::cerr << "ebl: " << e.what() << '\n';
        return kUsageOrIo;
    }
    return kUsageOrIo;
}
