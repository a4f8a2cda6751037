#include <doctest.h>

#include <cmath>

#include "patchbench/errors.hpp"
#include "patchbench/synthesis.hpp"

using namespace patchbench;

namespace {

SequenceSpec viewpoint_spec(std::uint64_t seed)
{
    SequenceSpec spec;
    spec.seed = seed;
    spec.kind = SequenceKind::Viewpoint;
    spec.width = 192;
    spec.height = 192;
    return spec;
}

double mean_corner_displacement(const Homography& h, int w, int ht)
{
    const double corners[4][2] = {
        {0, 0}, {static_cast<double>(w - 1), 0}, {0, static_cast<double>(ht - 1)},
        {static_cast<double>(w - 1), static_cast<double>(ht - 1)}};
    double sum = 0.0;
    for (const auto& c : corners) {
        const Eigen::Vector3d q = h * Eigen::Vector3d(c[0], c[1], 1.0);
        sum += std::hypot(q.x() / q.z() - c[0], q.y() / q.z() - c[1]);
    }
    return sum / 4.0;
}

} // namespace

TEST_CASE("gen_texture is deterministic and well conditioned")
{
    const Image a = gen_texture(1, 256, 256);
    const Image b = gen_texture(1, 256, 256);
    CHECK((a == b).all());

    CHECK(a.minCoeff() >= 0.0f);
    CHECK(a.maxCoeff() <= 1.0f);

    const double mean = a.cast<double>().mean();
    CHECK(mean > 0.3);
    CHECK(mean < 0.7);

    const double sd = std::sqrt((a.cast<double>() - mean).square().mean());
    CHECK(sd > 0.05);
}

TEST_CASE("different texture seeds decorrelate")
{
    const Image a = gen_texture(1, 256, 256);
    const Image b = gen_texture(2, 256, 256);
    const double ma = a.cast<double>().mean();
    const double mb = b.cast<double>().mean();
    const double cov = ((a.cast<double>() - ma) * (b.cast<double>() - mb)).mean();
    const double sa = std::sqrt((a.cast<double>() - ma).square().mean());
    const double sb = std::sqrt((b.cast<double>() - mb).square().mean());
    CHECK(std::abs(cov / (sa * sb)) < 0.2);
}

TEST_CASE("gen_texture rejects tiny dimensions")
{
    CHECK_THROWS_AS((void)gen_texture(1, 0, 128), std::invalid_argument);
    CHECK_THROWS_AS((void)gen_texture(1, 128, 32), std::invalid_argument);
}

TEST_CASE("warp consistency: reference points land on the warped texture")
{
    // Smooth analytic image, so the residual is interpolation-only.
    Image smooth(128, 128);
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x)
            smooth(y, x) = 0.5f + 0.3f * std::sin(x / 17.0f) * std::cos(y / 23.0f);

    Eigen::Matrix3d m;
    m << 0.95, 0.08, 6.0,
         -0.06, 1.05, -3.0,
         1e-4, -8e-5, 1.0;
    const Homography h = make_homography(m);
    const Image warped = warp_image(smooth, h);

    double max_residual = 0.0;
    for (int y = 20; y < 108; y += 4)
        for (int x = 20; x < 108; x += 4) {
            const Eigen::Vector3d q = h * Eigen::Vector3d(x, y, 1.0);
            const double tx = q.x() / q.z();
            const double ty = q.y() / q.z();
            if (tx < 2 || tx > 125 || ty < 2 || ty > 125)
                continue;
            const double r = std::abs(sample_bilinear(warped, tx, ty) - smooth(y, x));
            max_residual = std::max(max_residual, r);
        }
    CHECK(max_residual < 0.5 / 255.0);
}

TEST_CASE("viewpoint sequence basics")
{
    SUBCASE("zero severity gives identity homographies and identical targets")
    {
        SequenceSpec spec = viewpoint_spec(77);
        spec.severity = {0, 0, 0, 0, 0};
        const Sequence seq = gen_viewpoint_sequence(spec);
        for (int k = 0; k < 5; ++k) {
            CHECK((seq.homographies[k] - Homography::Identity()).cwiseAbs().maxCoeff() ==
                  0.0);
            CHECK((seq.targets[k] == seq.ref).all());
        }
    }
    SUBCASE("severity schedule produces strictly increasing corner displacement")
    {
        SequenceSpec spec = viewpoint_spec(78);
        spec.severity = {0.1, 0.3, 0.5, 0.7, 0.9};
        const Sequence seq = gen_viewpoint_sequence(spec);
        double prev = -1.0;
        for (int k = 0; k < 5; ++k) {
            const double d =
                mean_corner_displacement(seq.homographies[k], spec.width, spec.height);
            CHECK(d > prev);
            prev = d;
        }
    }
    SUBCASE("spec validation")
    {
        SequenceSpec spec = viewpoint_spec(79);
        spec.kind = SequenceKind::Illumination;
        CHECK_THROWS_AS((void)gen_viewpoint_sequence(spec), std::invalid_argument);
        spec = viewpoint_spec(79);
        spec.severity = {0.5, 0.4, 0.6, 0.8, 1.0};
        CHECK_THROWS_AS((void)gen_viewpoint_sequence(spec), std::invalid_argument);
    }
}

TEST_CASE("illumination sequence basics")
{
    SUBCASE("zero severity reproduces the reference exactly")
    {
        SequenceSpec spec = viewpoint_spec(80);
        spec.kind = SequenceKind::Illumination;
        spec.severity = {0, 0, 0, 0, 0};
        const Sequence seq = gen_illum_sequence(spec);
        for (int k = 0; k < 5; ++k) {
            CHECK((seq.targets[k] == seq.ref).all());
            CHECK((seq.homographies[k] - Homography::Identity()).cwiseAbs().maxCoeff() ==
                  0.0);
        }
    }
    SUBCASE("gain and bias act as the affine map")
    {
        Image img(64, 64);
        img.setConstant(0.5f);
        const Image out = apply_photometric(img, {1.2, 0.1, 1.0, 0.0});
        CHECK(out(32, 32) == doctest::Approx(0.7).epsilon(1e-6));

        const Image clipped = apply_photometric(img, {3.0, 0.0, 1.0, 0.0});
        CHECK(clipped(10, 10) == doctest::Approx(1.0));
    }
    SUBCASE("strong severity changes intensities substantially")
    {
        double total = 0.0;
        int count = 0;
        for (std::uint64_t seed : {81u, 82u, 83u, 84u}) {
            SequenceSpec spec = viewpoint_spec(seed);
            spec.kind = SequenceKind::Illumination;
            spec.severity = {0.1, 0.3, 0.5, 0.7, 0.9};
            const Sequence seq = gen_illum_sequence(spec);
            total += (seq.targets[4].cast<double>() - seq.ref.cast<double>()).abs().mean();
            ++count;
        }
        CHECK(total / count >= 0.1);
    }
    SUBCASE("targets reproduce pointwise from the exposed parameters")
    {
        SequenceSpec spec = viewpoint_spec(85);
        spec.kind = SequenceKind::Illumination;
        const Sequence seq = gen_illum_sequence(spec);
        const Image expected =
            quantize_unit(apply_photometric(seq.ref, illum_params(spec, 3)));
        CHECK((seq.targets[3] == expected).all());
    }
}

TEST_CASE("detect_regions")
{
    const Image img = gen_texture(1, 256, 256);

    SUBCASE("seeded runs are identical and satisfy the contracts")
    {
        Rng rng1(5), rng2(5);
        const auto a = detect_regions(img, rng1, 200);
        const auto b = detect_regions(img, rng2, 200);
        REQUIRE(a.size() == b.size());
        CHECK(a.size() >= 8);
        CHECK(a.size() <= 200);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].cx == b[i].cx);
            CHECK(a[i].cy == b[i].cy);
            CHECK(a[i].m == b[i].m);
            CHECK(a[i].m >= 1.6);
        }
    }
    SUBCASE("no two retained regions overlap above 0.5 IoU")
    {
        Rng rng(6);
        const auto regions = detect_regions(img, rng, 120);
        for (std::size_t i = 0; i < regions.size(); ++i)
            for (std::size_t j = i + 1; j < regions.size(); ++j)
                CHECK(region_iou(regions[i], regions[j], 1.0) <= 0.5);
    }
    SUBCASE("constant image is degenerate")
    {
        Image flat(128, 128);
        flat.setConstant(0.5f);
        Rng rng(7);
        CHECK_THROWS_AS((void)detect_regions(flat, rng, 100), GenerationError);
    }
    SUBCASE("max_regions caps the output")
    {
        Rng rng(8);
        const auto regions = detect_regions(img, rng, 20);
        CHECK(regions.size() <= 20);
        CHECK(regions.size() >= 8);
    }
}
