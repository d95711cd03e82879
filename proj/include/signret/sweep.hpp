#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "signret/codec.hpp"
#include "signret/evaluate.hpp"
#include "signret/image.hpp"
#include "signret/metrics.hpp"

namespace signret {

struct SweepPlan {
    std::vector<std::filesystem::path> inputs;
    std::vector<int> qualities = {20, 30, 40, 50, 60, 70, 80};
    std::vector<int> gammas = {1, 2, 3};
    SolverConfig solver;  ///< gamma_max is replaced by max(gammas)
    std::filesystem::path dump_dir;  ///< empty: no image dumps
    unsigned threads = 1;

    void validate() const {
        if (inputs.empty()) throw DomainError("sweep: no input images");
        if (qualities.empty()) throw DomainError("sweep: empty quality list");
        if (gammas.empty()) throw DomainError("sweep: empty gamma list");
        for (int q : qualities)
            if (q < 1 || q > 100) throw DomainError("sweep: quality " + std::to_string(q) + " outside [1, 100]");
        for (int g : gammas)
            if (g < 1) throw DomainError("sweep: gamma " + std::to_string(g) + " must be >= 1");
        SolverConfig cfg = solver;
        cfg.gamma_max = *std::max_element(gammas.begin(), gammas.end());
        cfg.validate();
    }
};

/// Seed of the random-sign ablation, derived from the solver seed.
inline std::uint64_t random_sign_seed(std::uint64_t solver_seed) { return solver_seed ^ 0x9E3779B97F4A7C15ULL; }

/// Worker count: hardware concurrency, capped by SR_THREADS when set.
inline unsigned worker_count_from_env() {
    unsigned n = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SR_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Rows for one (image, quality): one "sr" row per gamma, then the "raw" row.
/// Every gamma comes from a single solver run with gamma_max = max(gammas);
/// cascade k of that run is exactly the output of a run with gamma_max = k.
inline std::vector<EvalRecord> evaluate_item(const std::filesystem::path& input, int quality, const SweepPlan& plan) {
    const PixelGrid image = load_image(input);
    SolverConfig cfg = plan.solver;
    cfg.gamma_max = *std::max_element(plan.gammas.begin(), plan.gammas.end());

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> cascade_seconds;
    const QuantizerSpec q = build_quantizer(quality);
    const CoefficientGrid baseline = quantize_dequantize(dct2_forward(image), q);
    const SignPlane truth = signs_of(baseline);
    const MagnitudePlane mags = magnitudes_of(baseline);
    const DcPlane dc = dc_of(baseline);
    const PixelGrid baseline_ac = ac_component(dct2_inverse(baseline));
    std::vector<SignPlane> cascade_signs;
    std::vector<double> alphas;
    FienupSolver solver(image.rows(), image.cols(), cfg);
    solver.solve(mags, dc, [&](int, const PixelGrid& phi, const PixelGrid& z) {
        alphas.push_back(anchor_alpha(baseline_ac, phi));
        cascade_signs.push_back(extract_signs(z, mags));
        cascade_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    });

    const std::string id = input.stem().string();
    const std::size_t n_pixels = image.size();
    std::vector<EvalRecord> rows;
    for (int gamma : plan.gammas) {
        const SignEvaluation ev = evaluate_signs(baseline, truth, cascade_signs[gamma - 1]);
        EvalRecord rec;
        rec.image = id;
        rec.method = "sr";
        rec.quality = quality;
        rec.gamma = gamma;
        rec.sign_count = ev.sign_count;
        rec.one_fraction = ev.one_fraction;
        rec.entropy_bpp = ev.entropy_bpp;
        rec.coded_bpp = ev.coded_bpp;
        rec.accuracy = ev.accuracy;
        rec.psnr_db = ev.psnr_db;
        rec.alphas.assign(alphas.begin(), alphas.begin() + gamma);
        rec.seconds = cascade_seconds[gamma - 1];
        rows.push_back(rec);
    }

    const SignPlane random = random_signs(truth, random_sign_seed(cfg.seed));
    const PixelGrid baseline_display = reconstruct_with_signs(baseline, truth);
    const PixelGrid random_display = reconstruct_with_signs(baseline, random);
    EvalRecord raw;
    raw.image = id;
    raw.method = "raw";
    raw.quality = quality;
    raw.gamma = 0;
    raw.sign_count = count_nonzero_ac(mags);
    raw.one_fraction = 0.5;
    raw.entropy_bpp = static_cast<double>(raw.sign_count) / static_cast<double>(n_pixels);
    raw.coded_bpp = raw.entropy_bpp;
    raw.accuracy = 0.5;
    raw.psnr_db = psnr(random_display, baseline_display);
    rows.push_back(raw);

    if (!plan.dump_dir.empty()) {
        std::filesystem::create_directories(plan.dump_dir);
        const std::string stem = id + "_q" + std::to_string(quality);
        save_image(plan.dump_dir / (stem + "_baseline.pgm"), baseline_display);
        save_image(plan.dump_dir / (stem + "_random.pgm"), random_display);
        for (int gamma : plan.gammas) {
            save_image(plan.dump_dir / (stem + "_g" + std::to_string(gamma) + "_retrieved.pgm"),
                       reconstruct_with_signs(baseline, cascade_signs[gamma - 1]));
        }
    }
    return rows;
}

/// Runs every (image, quality) item on a worker pool and writes rows to `csv`
/// in plan order. Failed items are reported through `on_error` and skipped.
/// Returns the number of failed items.
inline std::size_t run_sweep(const SweepPlan& plan, std::ostream& csv,
                             const std::function<void(const std::string&)>& on_error = {}) {
    plan.validate();
    struct Item {
        std::filesystem::path input;
        int quality;
        std::vector<EvalRecord> rows;
        std::string error;
        bool done = false;
    };
    std::vector<Item> items;
    for (const auto& in : plan.inputs)
        for (int q : plan.qualities) items.push_back({in, q, {}, {}, false});

    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            std::vector<EvalRecord> rows;
            std::string error;
            try {
                rows = evaluate_item(items[i].input, items[i].quality, plan);
            } catch (const std::exception& e) {
                error = items[i].input.string() + " @ quality " + std::to_string(items[i].quality) + ": " + e.what();
            }
            {
                std::lock_guard lock(mu);
                items[i].rows = std::move(rows);
                items[i].error = std::move(error);
                items[i].done = true;
            }
            cv.notify_all();
        }
    };
    const unsigned n_workers = std::max(1U, std::min<unsigned>(plan.threads, static_cast<unsigned>(items.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);

    csv << EvalRecord::csv_header() << "\n";
    std::size_t failures = 0;
    for (auto& item : items) {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return item.done; });
        if (!item.error.empty()) {
            ++failures;
            if (on_error) on_error(item.error);
            continue;
        }
        for (const auto& row : item.rows) csv << row.csv_row() << "\n";
        csv.flush();
    }
    for (auto& t : pool) t.join();
    return failures;
}

}  // namespace signret
