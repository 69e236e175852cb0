#include "commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "ebl/evolve.hpp"
#include "ebl/gradcheck.hpp"
#include "ebl/image_io.hpp"
#include "ebl/metrics.hpp"

namespace fs = std::filesystem;

namespace ebl::cli {

namespace {

std::string numbered(const std::string& prefix, int id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04d.pgm", prefix.c_str(), id);
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory '" + dir + "'");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

HeavisideKind parse_kind(const std::string& kind) {
    if (kind == "hardtanh") return HeavisideKind::HardTanh;
    if (kind == "sinusoidal") return HeavisideKind::Sinusoidal;
    throw std::invalid_argument("unknown heaviside kind '" + kind + "'");
}

}  // namespace

PilParams PilOptions::params() const {
    PilParams p;
    p.alpha = alpha;
    p.heaviside = {beta, parse_kind(kind)};
    p.prefactor = prefactor;
    p.orientation = same_orientation ? Orientation::Same : Orientation::Opposite;
    p.gt_sigma = gt_sigma;
    p.validate();
    return p;
}

int run_phantom(const PhantomArgs& args) {
    ensure_dir(args.out);
    PhantomSpec spec;
    spec.width = args.size;
    spec.height = args.size;
    spec.n_branches = args.branches;
    spec.min_width = args.min_width;
    spec.max_width = args.max_width;
    spec.contrast = args.contrast;
    spec.noise_sigma = args.noise;
    const std::vector<Phantom> phantoms = dataset(spec, args.n, args.seed);

    const fs::path dir(args.out);
    std::ofstream manifest = open_out((dir / "manifest.csv").string());
    manifest << "id,seed,foreground_frac\n";
    for (std::size_t i = 0; i < phantoms.size(); ++i) {
        const Phantom& p = phantoms[i];
        write_pgm((dir / numbered("img", int(i))).string(), p.image);
        write_pgm((dir / numbered("msk", int(i))).string(), p.mask);
        manifest << i << ',' << p.seed << ','
                 << fmt(double(p.mask.count()) / double(p.mask.size())) << '\n';
    }
    if (!manifest) throw std::runtime_error("failed writing manifest.csv");
    std::cout << "wrote " << phantoms.size() << " phantoms to " << args.out << '\n';
    return kOk;
}

int run_energy(const EnergyArgs& args) {
    const BinaryMask gt = read_image_mask(args.gt);
    const ScalarField2D pred = read_image_field(args.pred);
    if (gt.width() != pred.width() || gt.height() != pred.height()) {
        throw std::invalid_argument("dimension mismatch: gt is " + std::to_string(gt.width()) + "x" +
                                    std::to_string(gt.height()) + ", pred is " +
                                    std::to_string(pred.width()) + "x" + std::to_string(pred.height()));
    }
    const PilParams params = args.pil.params();
    const SpectralPlan plan(gt.width(), gt.height());
    const EnergyGrad eg = loss_and_grad(gt, pred, params, plan);
    std::cout << "E_spectral=" << fmt(eg.energy) << '\n';

    if (args.pad > 1) {
        const ScalarField2D h = apply_heaviside(prob_to_levelset(pred), params.heaviside);
        const ScalarField2D d =
            combined_field(gaussian_smooth(gt, params.gt_sigma), h, params.alpha, params.orientation);
        std::cout << "E_padded=" << fmt(energy_spectral_padded(d, params.prefactor, args.pad)) << '\n';
    }
    if (args.oracle) {
        const ScalarField2D h = apply_heaviside(prob_to_levelset(pred), params.heaviside);
        const ScalarField2D d =
            combined_field(gaussian_smooth(gt, params.gt_sigma), h, params.alpha, params.orientation);
        const double spectral = energy_spectral(d, plan, params.prefactor);
        const double direct = energy_direct(d, plan, params.prefactor);
        const double rel = std::abs(direct - spectral) / std::max(std::abs(spectral), 1e-300);
        std::cout << "E_direct=" << fmt(direct) << '\n';
        std::cout << "rel_diff=" << fmt(spectral == direct ? 0.0 : rel) << '\n';
        if (rel > 1e-10 && std::abs(direct - spectral) > 1e-12) return kCheckFailed;
    }
    return kOk;
}

int run_gradcheck(const GradcheckArgs& args) {
    TrainConfig cfg;
    cfg.loss = parse_loss_kind(args.loss);
    cfg.pil = args.pil.params();
    const double tolerance = args.net ? 1e-4 : 1e-5;
    double worst = 0.0;
    for (int s = 0; s < args.seeds; ++s) {
        const std::uint64_t seed = static_cast<std::uint64_t>(s) + 1;
        const GradcheckResult r = args.net ? gradcheck_network(cfg, args.size, seed, args.params)
                                           : gradcheck_prediction(cfg, args.size, seed);
        std::cout << "seed " << seed << ": max_rel_error=" << fmt(r.max_rel_error) << " over "
                  << r.checked << (args.net ? " parameters" : " pixels");
        if (r.skipped > 0) std::cout << " (" << r.skipped << " kink-crossing probes redrawn)";
        std::cout << '\n';
        worst = std::max(worst, r.max_rel_error);
    }
    const bool pass = worst <= tolerance;
    std::cout << "max_rel_error=" << fmt(worst) << " tolerance=" << fmt(tolerance) << ' '
              << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kOk : kCheckFailed;
}

int run_evolve(const EvolveArgs& args) {
    BinaryMask gt;
    if (args.demo) {
        gt = disc_mask(64, 64, 32.0, 32.0, 6.0);
    } else if (!args.gt.empty()) {
        gt = read_image_mask(args.gt);
    } else {
        throw std::invalid_argument("evolve needs --gt or --demo");
    }

    ScalarField2D p0;
    if (args.init == "shifted") {
        p0 = soft_init(cyclic_shift(gt, args.shift, 0), args.margin);
    } else if (args.init == "uniform") {
        p0 = ScalarField2D(gt.width(), gt.height(), 0.5);
    } else {
        throw std::invalid_argument("--init must be 'shifted' or 'uniform'");
    }

    EvolveConfig cfg;
    cfg.pil = args.pil.params();
    cfg.eta = args.eta;
    cfg.max_steps = args.steps;
    cfg.tol = args.tol;
    cfg.snapshot_every = args.snapshot_every;

    const SpectralPlan plan(gt.width(), gt.height());
    EvolveTrace trace;
    try {
        trace = gradient_flow(p0, gt, cfg, plan);
    } catch (const DivergenceError& e) {
        std::cerr << "ebl evolve: " << e.what() << '\n';
        return kCheckFailed;
    }

    if (!args.out.empty()) {
        ensure_dir(args.out);
        const fs::path dir(args.out);
        std::ofstream csv = open_out((dir / "energy.csv").string());
        csv << "step,energy\n";
        for (std::size_t k = 0; k < trace.energies.size(); ++k) {
            csv << k << ',' << fmt(trace.energies[k]) << '\n';
        }
        for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
            write_pgm((dir / numbered("snap", int((k + 1) * cfg.snapshot_every))).string(),
                      trace.snapshots[k]);
        }
        write_pgm((dir / "final.pgm").string(), trace.final_p);
    }
    std::cout << "steps=" << trace.steps << '\n';
    std::cout << "final_energy=" << fmt(trace.energies.back()) << '\n';
    std::cout << "iou=" << fmt(trace.iou_final) << '\n';
    return kOk;
}

std::vector<std::pair<std::string, Sample>> load_dataset(const std::string& dir,
                                                         const std::string& split) {
    if (split != "train" && split != "test" && split != "all") {
        throw std::invalid_argument("--split must be train, test or all");
    }
    const fs::path root(dir);
    std::ifstream manifest(root / "manifest.csv");
    if (!manifest) throw std::runtime_error("cannot open '" + (root / "manifest.csv").string() + "'");
    std::string line;
    std::getline(manifest, line);
    if (line.rfind("id,", 0) != 0) throw std::runtime_error("manifest.csv has an unexpected header");

    std::vector<std::pair<std::string, Sample>> out;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        const int id = std::stoi(line.substr(0, line.find(',')));
        if (split == "train" && id % 2 != 0) continue;
        if (split == "test" && id % 2 == 0) continue;
        Sample s{read_pgm_field((root / numbered("img", id)).string()),
                 read_pgm_mask((root / numbered("msk", id)).string())};
        out.emplace_back(std::to_string(id), std::move(s));
    }
    if (out.empty()) throw std::runtime_error("no samples in '" + dir + "' for split " + split);
    return out;
}

int run_train(const TrainArgs& args) {
    const auto named = load_dataset(args.data, args.split);
    std::vector<Sample> data;
    for (const auto& [id, s] : named) data.push_back(s);

    TrainConfig cfg;
    cfg.loss = parse_loss_kind(args.loss);
    cfg.bce_weight = args.bce_weight;
    cfg.pil = args.pil.params();
    cfg.epochs = args.epochs;
    cfg.lr = args.lr;
    cfg.batch_size = args.batch_size;
    cfg.seed = args.seed;

    const SpectralPlan plan(data.front().image.width(), data.front().image.height());
    ToyNet net = ToyNet::random(args.seed);
    const TrainLog log = train(net, data, cfg, plan);
    save_checkpoint(args.out, net);

    std::ostringstream csv;
    csv << "epoch,loss\n";
    for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
        csv << e + 1 << ',' << fmt(log.epoch_loss[e]) << '\n';
    }
    if (!args.log.empty()) {
        std::ofstream out = open_out(args.log);
        out << csv.str();
    }
    std::cout << "trained " << data.size() << " images for " << cfg.epochs << " epochs, final loss "
              << fmt(log.epoch_loss.back()) << ", checkpoint " << args.out << '\n';
    return kOk;
}

int run_eval(const EvalArgs& args) {
    const auto named = load_dataset(args.data, args.split);
    std::optional<ToyNet> net;
    if (!args.oracle) {
        if (args.model.empty()) throw std::invalid_argument("eval needs --model or --oracle");
        net = load_checkpoint(args.model);
    }
    std::vector<MetricsRow> rows;
    std::vector<MetricsReport> reports;
    for (const auto& [id, s] : named) {
        const ScalarField2D prob = args.oracle ? s.mask.to_field() : forward(*net, s.image);
        MetricsReport r = evaluate(prob, s.mask, args.threshold);
        reports.push_back(r);
        rows.push_back({args.oracle ? "oracle" : args.method, args.loss, id, r});
    }
    const AggregateReport agg = aggregate(reports);
    if (!args.out.empty()) {
        std::ofstream out = open_out(args.out);
        write_metrics_csv(out, rows);
    } else {
        write_metrics_csv(std::cout, rows);
    }
    auto summary = [](const char* name, const MetricsReport& r) {
        std::cout << name << ": sens=" << fmt(r.sensitivity) << " spec=" << fmt(r.specificity)
                  << " f1=" << fmt(r.f1) << " auc=" << fmt(r.auc) << '\n';
    };
    summary("macro", agg.macro);
    summary("micro", agg.micro);
    return kOk;
}

int run_bench(const BenchArgs& args) {
    const std::vector<BenchRow> rows = bench_paths(args.sizes, args.repeats);
    if (!args.out.empty()) {
        std::ofstream out = open_out(args.out);
        write_bench_csv(out, rows);
    }
    write_bench_csv(std::cout, rows);
    return kOk;
}

}  // namespace ebl::cli
