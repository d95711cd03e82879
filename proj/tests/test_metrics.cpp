#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace signret;
using testing_support::corpus_path;
using testing_support::crop;
using testing_support::synthetic_scene;

namespace {

ResidualPlane residual_with(std::size_t size, std::size_t ones) {
    ResidualPlane e;
    e.bits.assign(size, 0);
    for (std::size_t i = 0; i < ones; ++i) e.bits[i * size / std::max<std::size_t>(ones, 1)] = 1;
    return e;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string drop_last_field(const std::string& line) { return line.substr(0, line.rfind(',')); }

}  // namespace

TEST(Entropy, Examples) {
    EXPECT_EQ(residual_entropy_bpp(residual_with(100, 0), 1000), 0.0);
    EXPECT_NEAR(residual_entropy_bpp(residual_with(4096, 2048), 4096), 1.0, 1e-12);
    // H2(0.11) = 0.49992..., times 1e4 / 65536 = 0.07628; reference figure is truncated to 4 places
    EXPECT_NEAR(residual_entropy_bpp(residual_with(10000, 1100), 65536), 0.0762, 1e-4);
    EXPECT_NEAR(binary_entropy(0.11), 0.499916, 1e-6);
}

TEST(Entropy, NeverExceedsOneBitPerSign) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const std::size_t s = 1 + rng() % 5000;
        const ResidualPlane e = residual_with(s, rng() % (s + 1));
        const std::size_t n = s + rng() % 10000;
        EXPECT_LE(residual_entropy_bpp(e, n), static_cast<double>(s) / n + 1e-15);
    }
}

TEST(Entropy, CoderStaysInsideNearOptimalityBand) {
    std::mt19937_64 rng(2);
    for (double p : {0.05, 0.2, 0.35, 0.5}) {
        ResidualPlane e;
        std::bernoulli_distribution d(p);
        e.bits.resize(100000);
        for (auto& b : e.bits) b = d(rng);
        const std::size_t n = 1u << 18;
        const double h = residual_entropy_bpp(e, n);
        const double coded = 8.0 * arith_encode_bits(e.bits).size() / n;
        EXPECT_GE(coded, h - 0.001);
        EXPECT_LE(coded, h * 1.02 + 16.0 * 8.0 / n);
    }
}

TEST(Accuracy, Examples) {
    SignPlane t(8, 8), r(8, 8);
    const std::size_t pos[4][2] = {{0, 1}, {1, 0}, {2, 3}, {7, 7}};
    for (auto [a, b] : pos) t(a, b) = r(a, b) = 1;
    EXPECT_EQ(sign_accuracy(t, r), 1.0);
    r(7, 7) = -1;
    EXPECT_EQ(sign_accuracy(t, r), 0.75);
    for (auto [a, b] : pos) r(a, b) = -1;
    EXPECT_EQ(sign_accuracy(t, r), 0.0);
}

TEST(Accuracy, EqualsOneMinusResidualOnesFraction) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        SignPlane t(16, 16), r(16, 16);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (is_dc(i / 16, i % 16) || rng() % 4 == 0) continue;
            t[i] = rng() % 2 ? 1 : -1;
            r[i] = rng() % 2 ? 1 : -1;
        }
        const ResidualPlane e = compute_residual(t, r);
        EXPECT_DOUBLE_EQ(sign_accuracy(t, r), 1.0 - static_cast<double>(e.ones()) / e.size());
    }
}

TEST(Psnr, Examples) {
    const PixelGrid a(8, 8, 10.0);
    EXPECT_TRUE(std::isinf(psnr(a, a)));
    EXPECT_NEAR(psnr(a, PixelGrid(8, 8, 11.0)), 48.1308, 1e-4);
    EXPECT_NEAR(psnr(PixelGrid(8, 8, 0.0), PixelGrid(8, 8, 255.0)), 0.0, 1e-12);
    EXPECT_THROW(psnr(a, PixelGrid(8, 16)), ShapeError);
}

TEST(EvalRecord, CsvFormat) {
    EvalRecord r;
    r.image = "cam";
    r.method = "sr";
    r.quality = 50;
    r.gamma = 2;
    r.sign_count = 100;
    r.one_fraction = 0.25;
    r.entropy_bpp = 0.5;
    r.coded_bpp = 0.51;
    r.accuracy = 0.75;
    r.psnr_db = std::numeric_limits<double>::infinity();
    r.alphas = {0.001, 0.5};
    r.seconds = 1.5;
    EXPECT_EQ(EvalRecord::csv_header(),
              "image,method,quality,gamma,sign_count,one_fraction,entropy_bpp,coded_bpp,accuracy,psnr_db,alpha,seconds");
    EXPECT_EQ(r.csv_row(), "cam,sr,50,2,100,0.250000,0.500000,0.510000,0.750000,inf,0.001000;0.500000,1.500");
}

TEST(Evaluate, TrueSignsGiveInfinitePsnrAndZeroRate) {
    const CoefficientGrid y = quantize_dequantize(dct2_forward(synthetic_scene(32, 32, 1)), build_quantizer(50));
    const SignPlane t = signs_of(y);
    const SignEvaluation ev = evaluate_signs(y, t, t);
    EXPECT_TRUE(std::isinf(ev.psnr_db));
    EXPECT_EQ(ev.accuracy, 1.0);
    EXPECT_EQ(ev.entropy_bpp, 0.0);
    EXPECT_EQ(ev.sign_count, count_nonzero_ac(magnitudes_of(y)));
}

TEST(Evaluate, RandomSignsKeepZeroPatternAndAreBalanced) {
    SignPlane t(64, 64);
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!is_dc(i / 64, i % 64) && i % 3 != 0) t[i] = 1;
    const SignPlane r = random_signs(t, 9);
    std::size_t neg = 0, nz = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(r[i] == 0, t[i] == 0);
        nz += r[i] != 0;
        neg += r[i] < 0;
    }
    EXPECT_NEAR(static_cast<double>(neg) / nz, 0.5, 0.05);
    EXPECT_EQ(random_signs(t, 9), r);
}

class SweepTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() / "signret_sweep_test";
        std::filesystem::create_directories(dir_);
        image_ = dir_ / "scene.pgm";
        save_image(image_, synthetic_scene(32, 32, 4));
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    SweepPlan plan() const {
        SweepPlan p;
        p.inputs = {image_};
        p.solver.theta_max = 10;
        p.solver.levels = 2;
        return p;
    }

    std::filesystem::path dir_;
    std::filesystem::path image_;
};

TEST_F(SweepTest, RowCountsFollowThePlan) {
    std::ostringstream csv;
    EXPECT_EQ(run_sweep(plan(), csv), 0u);
    const auto lines = lines_of(csv.str());
    ASSERT_EQ(lines.size(), 1u + 21u + 7u);
    EXPECT_EQ(lines[0], EvalRecord::csv_header());
    std::size_t raw = 0;
    for (const auto& l : lines) raw += l.find(",raw,") != std::string::npos;
    EXPECT_EQ(raw, 7u);
}

TEST_F(SweepTest, IsDeterministicApartFromTiming) {
    SweepPlan p = plan();
    p.inputs = {image_, image_};
    std::ostringstream a, b;
    run_sweep(p, a);
    p.threads = 3;
    run_sweep(p, b);
    const auto la = lines_of(a.str()), lb = lines_of(b.str());
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) EXPECT_EQ(drop_last_field(la[i]), drop_last_field(lb[i]));
}

TEST_F(SweepTest, GammaRowsMatchSeparateRuns) {
    SweepPlan p = plan();
    p.qualities = {50};
    p.gammas = {1, 3};
    std::ostringstream csv;
    run_sweep(p, csv);
    const auto lines = lines_of(csv.str());
    for (int g : {1, 3}) {
        SolverConfig cfg = p.solver;
        cfg.gamma_max = g;
        const EncodeResult r = encode(load_image(image_), 50, cfg);
        const std::string acc = std::to_string(sign_accuracy(r.report.true_signs, r.report.retrieved_signs));
        const std::string& row = lines[g == 1 ? 1 : 2];
        EXPECT_NE(row.find(",sr,50," + std::to_string(g) + ","), std::string::npos);
        EXPECT_NE(row.find("," + acc + ","), std::string::npos) << row << " vs " << acc;
    }
}

TEST_F(SweepTest, FailedItemsAreReportedAndSkipped) {
    SweepPlan p = plan();
    p.inputs = {image_, dir_ / "missing.pgm"};
    p.qualities = {50};
    std::ostringstream csv;
    std::vector<std::string> errors;
    EXPECT_EQ(run_sweep(p, csv, [&](const std::string& m) { errors.push_back(m); }), 1u);
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_NE(errors[0].find("missing.pgm"), std::string::npos);
    EXPECT_EQ(lines_of(csv.str()).size(), 1u + 3u + 1u);
}

TEST_F(SweepTest, EmptyListsAreRejected) {
    SweepPlan p = plan();
    p.qualities.clear();
    std::ostringstream csv;
    EXPECT_THROW(run_sweep(p, csv), DomainError);
    p = plan();
    p.gammas = {0};
    EXPECT_THROW(run_sweep(p, csv), DomainError);
}

TEST_F(SweepTest, DumpedRandomSignImageIsWorseThanRetrieved) {
    const auto natural = dir_ / "camera_crop.pgm";
    save_image(natural, crop(load_image(corpus_path("camera")), 192, 192, 128, 128));
    SweepPlan p;
    p.inputs = {natural};
    p.qualities = {50};
    p.gammas = {1};
    p.dump_dir = dir_ / "dump";
    std::ostringstream csv;
    ASSERT_EQ(run_sweep(p, csv), 0u);
    const PixelGrid base = load_image(p.dump_dir / "camera_crop_q50_baseline.pgm");
    const PixelGrid rnd = load_image(p.dump_dir / "camera_crop_q50_random.pgm");
    const PixelGrid ret = load_image(p.dump_dir / "camera_crop_q50_g1_retrieved.pgm");
    EXPECT_GT(psnr(ret, base), psnr(rnd, base));
}
