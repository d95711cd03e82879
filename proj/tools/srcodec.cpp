// srcodec: encode/decode PGM images with sign retrieval, run quality sweeps,
// and inspect stream headers.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "signret/signret.hpp"

namespace {

using namespace signret;

struct SolverFlags {
    double lambda = SolverConfig{}.lambda;
    double mu = SolverConfig{}.mu;
    int theta = SolverConfig{}.theta_max;
    int gamma = SolverConfig{}.gamma_max;
    int levels = SolverConfig{}.levels;
    std::uint64_t seed = SolverConfig{}.seed;

    SolverConfig config() const {
        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.mu = mu;
        cfg.theta_max = theta;
        cfg.gamma_max = gamma;
        cfg.levels = levels;
        cfg.seed = seed;
        return cfg;
    }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool with_gamma) {
    cmd->add_option("--lambda", f.lambda, "l1 weight")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd->add_option("--mu", f.mu, "anchor step size")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--theta", f.theta, "iterations per cascade")->check(CLI::Range(1, 65535))->capture_default_str();
    cmd->add_option("--levels", f.levels, "wavelet frame levels")->check(CLI::Range(1, 255))->capture_default_str();
    cmd->add_option("--seed", f.seed, "anchor seed")->capture_default_str();
    if (with_gamma) {
        cmd->add_option("--gamma", f.gamma, "number of cascades")->check(CLI::Range(1, 255))->capture_default_str();
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void print_kv(const std::string& key, const std::string& value) { std::cout << key << "=" << value << "\n"; }

int cmd_encode(const std::string& in, const std::string& out, int quality, const SolverConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const PixelGrid image = load_image(in);
    const EncodeResult r = encode(image, quality, cfg);
    const std::vector<std::uint8_t> bytes = compose(r.stream);
    write_file_bytes(out, bytes);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double n = static_cast<double>(image.size());
    print_kv("width", std::to_string(image.cols()));
    print_kv("height", std::to_string(image.rows()));
    print_kv("quality", std::to_string(quality));
    print_kv("gamma", std::to_string(cfg.gamma_max));
    print_kv("sign_count", std::to_string(r.report.sign_count));
    print_kv("residual_ones", std::to_string(r.report.residual.ones()));
    print_kv("entropy_bpp", fmt(residual_entropy_bpp(r.report.residual, image.size())));
    print_kv("coded_bpp", fmt(8.0 * static_cast<double>(r.stream.residual_payload.size()) / n));
    print_kv("raw_bpp", fmt(static_cast<double>(r.report.sign_count) / n));
    print_kv("accuracy", fmt(sign_accuracy(r.report.true_signs, r.report.retrieved_signs)));
    for (std::size_t k = 0; k < r.report.cascade_alpha.size(); ++k) {
        print_kv("alpha_" + std::to_string(k + 1), fmt(r.report.cascade_alpha[k]));
    }
    print_kv("stream_bytes", std::to_string(bytes.size()));
    print_kv("seconds", fmt(seconds));
    return 0;
}

int cmd_decode(const std::string& in, const std::string& out, const std::string& verify) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(in);
    const DecodeResult d = decode(bytes);
    save_image(out, d.display);
    print_kv("width", std::to_string(d.header.width));
    print_kv("height", std::to_string(d.header.height));
    print_kv("quality", std::to_string(d.header.quality));
    if (verify.empty()) return 0;

    const PixelGrid original = load_image(verify);
    if (original.rows() != d.coefficients.rows() || original.cols() != d.coefficients.cols()) {
        print_kv("verify", "shape-mismatch");
        return 3;
    }
    const CoefficientGrid expected = quantize_dequantize(dct2_forward(original), build_quantizer(d.header.quality));
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) mismatches += expected[i] != d.coefficients[i];
    print_kv("verify", mismatches == 0 ? "ok" : "mismatch");
    print_kv("mismatched_coefficients", std::to_string(mismatches));
    return mismatches == 0 ? 0 : 3;
}

int cmd_analyze(const std::string& in) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(in);
    const Bitstream s = parse(bytes);
    const auto& h = s.header;
    print_kv("version", std::to_string(h.version));
    print_kv("width", std::to_string(h.width));
    print_kv("height", std::to_string(h.height));
    print_kv("quality", std::to_string(h.quality));
    print_kv("gamma", std::to_string(h.gamma));
    print_kv("theta", std::to_string(h.theta));
    print_kv("lambda", fmt(h.lambda));
    print_kv("mu", fmt(h.mu));
    print_kv("levels", std::to_string(h.levels));
    print_kv("seed", std::to_string(h.seed));
    print_kv("magnitude_bytes", std::to_string(s.magnitude_payload.size()));
    print_kv("residual_bits", std::to_string(s.residual_bit_count));
    print_kv("residual_bytes", std::to_string(s.residual_payload.size()));
    print_kv("stream_bytes", std::to_string(bytes.size()));
    return 0;
}

int cmd_sweep(SweepPlan plan, const std::string& csv_path) {
    plan.threads = worker_count_from_env();
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!csv_path.empty()) {
        file.open(csv_path, std::ios::binary);
        if (!file) throw Error("cannot open " + csv_path + " for writing");
        out = &file;
    }
    const std::size_t failures =
        run_sweep(plan, *out, [](const std::string& msg) { std::cerr << "srcodec sweep: " << msg << "\n"; });
    if (failures > 0) {
        std::cerr << "srcodec sweep: " << failures << " item(s) failed\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sign-retrieval image codec"};
    app.require_subcommand(1);

    std::string in, out, verify, csv, dump;
    int quality = 50;
    SolverFlags enc_flags, sweep_flags;
    SweepPlan plan;
    std::vector<std::string> sweep_inputs;

    auto* enc = app.add_subcommand("encode", "Encode a PGM image into a bitstream");
    enc->add_option("input", in, "input PGM")->required();
    enc->add_option("output", out, "output bitstream")->required();
    enc->add_option("--quality", quality, "JPEG quality factor")->check(CLI::Range(1, 100))->capture_default_str();
    add_solver_flags(enc, enc_flags, true);

    auto* dec = app.add_subcommand("decode", "Decode a bitstream into a PGM image");
    dec->add_option("input", in, "input bitstream")->required();
    dec->add_option("output", out, "output PGM")->required();
    dec->add_option("--verify", verify, "original PGM; compare coefficients against the conventional codec");

    auto* sweep = app.add_subcommand("sweep", "Evaluate images over quality factors and cascade counts");
    sweep->add_option("inputs", sweep_inputs, "input PGM images")->required();
    sweep->add_option("--quality", plan.qualities, "quality factors (comma separated)")
        ->delimiter(',')
        ->expected(1, -1)
        ->check(CLI::Range(1, 100));
    sweep->add_option("--gamma", plan.gammas, "cascade counts to report (comma separated)")
        ->delimiter(',')
        ->expected(1, -1)
        ->check(CLI::Range(1, 255));
    sweep->add_option("--csv", csv, "output CSV (default: stdout)");
    sweep->add_option("--dump-images", dump, "directory for baseline/random/retrieved PGMs");
    add_solver_flags(sweep, sweep_flags, false);

    auto* ana = app.add_subcommand("analyze", "Print a bitstream header");
    ana->add_option("input", in, "input bitstream")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*enc) return cmd_encode(in, out, quality, enc_flags.config());
        if (*dec) return cmd_decode(in, out, verify);
        if (*ana) return cmd_analyze(in);
        if (*sweep) {
            if (plan.qualities.empty() || plan.gammas.empty()) {
                std::cerr << "srcodec sweep: quality and gamma lists must not be empty\n";
                return 2;
            }
            plan.solver = sweep_flags.config();
            for (const auto& p : sweep_inputs) plan.inputs.emplace_back(p);
            plan.dump_dir = dump;
            return cmd_sweep(plan, csv);
        }
    } catch (const std::exception& e) {
        std::cerr << "srcodec: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
