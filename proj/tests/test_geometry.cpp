#include <doctest.h>

#include <cmath>

#include "patchbench/geometry.hpp"
#include "oracles.hpp"

using namespace patchbench;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("noise profile presets carry the published bounds")
{
    const NoiseProfile easy = noise_profile(NoiseLevel::Easy);
    CHECK(easy.theta_max_deg == 10.0);
    CHECK(easy.t_max == 0.15);
    CHECK(easy.s_max == 0.15);
    CHECK(easy.a_max == 0.2);

    const NoiseProfile hard = noise_profile(NoiseLevel::Hard);
    CHECK(hard.theta_max_deg == 20.0);
    CHECK(hard.t_max == 0.3);
    CHECK(hard.s_max == 0.3);
    CHECK(hard.a_max == 0.4);

    const NoiseProfile tough = noise_profile(NoiseLevel::Tough);
    CHECK(tough.theta_max_deg == 30.0);
    CHECK(tough.t_max == 0.45);
    CHECK(tough.s_max == 0.5);
    CHECK(tough.a_max == 0.45);
}

TEST_CASE("sampled noise respects the profile bounds")
{
    for (NoiseLevel level : {NoiseLevel::Easy, NoiseLevel::Hard, NoiseLevel::Tough}) {
        const NoiseProfile p = noise_profile(level);
        Rng rng(101 + static_cast<int>(level));
        for (int i = 0; i < 20000; ++i) {
            const NoiseTransform t = sample_noise(p, rng);
            CHECK(std::abs(t.theta) <= p.theta_max_deg * kPi / 180.0);
            CHECK(std::abs(t.tx) <= p.t_max);
            CHECK(std::abs(t.ty) <= p.t_max);
            CHECK(std::abs(std::log2(t.s)) <= p.s_max + 1e-12);
            CHECK(std::abs(std::log2(t.a)) <= p.a_max + 1e-12);
        }
    }
}

TEST_CASE("zero-bound profile yields the exact identity transform")
{
    Rng rng(5);
    const NoiseTransform t = sample_noise(noise_profile(NoiseLevel::None), rng);
    CHECK(t.theta == 0.0);
    CHECK(t.tx == 0.0);
    CHECK(t.ty == 0.0);
    CHECK(t.s == 1.0);
    CHECK(t.a == 1.0);
}

TEST_CASE("mean rotation of Easy draws is near zero")
{
    Rng rng(7);
    const NoiseProfile easy = noise_profile(NoiseLevel::Easy);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        sum += sample_noise(easy, rng).theta;
    const double mean_deg = (sum / n) * 180.0 / kPi;
    CHECK(std::abs(mean_deg) < 0.2);
}

TEST_CASE("noise_to_matrix assembles scale, rotation and translation")
{
    SUBCASE("identity transform gives the exact identity matrix")
    {
        const Eigen::Matrix3d m = noise_to_matrix(NoiseTransform{}, 3.0);
        CHECK((m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("pure quarter rotation maps (1,0) to (0,1)")
    {
        NoiseTransform t;
        t.theta = kPi / 2.0;
        const Eigen::Matrix3d m = noise_to_matrix(t, 1.0);
        const Eigen::Vector3d p = m * Eigen::Vector3d(1, 0, 1);
        CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(p.y() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("scale and scale-proportional translation")
    {
        NoiseTransform t;
        t.s = 2.0;
        t.tx = 0.15;
        const Eigen::Matrix3d m = noise_to_matrix(t, 10.0);
        CHECK(m(0, 0) == doctest::Approx(2.0));
        CHECK(m(1, 1) == doctest::Approx(2.0));
        CHECK(m(0, 1) == doctest::Approx(0.0));
        CHECK(m(0, 2) == doctest::Approx(1.5));
        CHECK(m(1, 2) == doctest::Approx(0.0));
        // Composed point mapping agrees with the assembled matrix.
        const Eigen::Vector3d p = m * Eigen::Vector3d(3.0, -2.0, 1.0);
        CHECK(p.x() == doctest::Approx(2.0 * 3.0 + 1.5));
        CHECK(p.y() == doctest::Approx(2.0 * -2.0));
    }
    SUBCASE("anisotropy is area-preserving: linear determinant equals s^2")
    {
        Rng rng(13);
        const NoiseProfile tough = noise_profile(NoiseLevel::Tough);
        for (int i = 0; i < 200; ++i) {
            const NoiseTransform t = sample_noise(tough, rng);
            const Eigen::Matrix3d m = noise_to_matrix(t, 2.0);
            const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
            CHECK(det == doctest::Approx(t.s * t.s).epsilon(1e-12));
        }
    }
    SUBCASE("non-positive parameters are rejected")
    {
        NoiseTransform t;
        t.s = 0.0;
        CHECK_THROWS_AS((void)noise_to_matrix(t, 1.0), std::invalid_argument);
        t.s = 1.0;
        t.a = -1.0;
        CHECK_THROWS_AS((void)noise_to_matrix(t, 1.0), std::invalid_argument);
        t.a = 1.0;
        CHECK_THROWS_AS((void)noise_to_matrix(t, 0.0), std::invalid_argument);
    }
}

TEST_CASE("project_region")
{
    const RegionDetection r{10.0, 10.0, 2.0, 0.3};

    SUBCASE("identity homography leaves the region unchanged")
    {
        const RegionDetection p = project_region(r, Homography::Identity());
        CHECK(p.cx == doctest::Approx(10.0));
        CHECK(p.cy == doctest::Approx(10.0));
        CHECK(p.m == doctest::Approx(2.0));
        CHECK(p.theta == doctest::Approx(0.3));
    }
    SUBCASE("uniform scaling doubles center and scale")
    {
        Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
        s(0, 0) = s(1, 1) = 2.0;
        const RegionDetection p = project_region({10, 10, 2, 0}, make_homography(s));
        CHECK(p.cx == doctest::Approx(20.0));
        CHECK(p.cy == doctest::Approx(20.0));
        CHECK(p.m == doctest::Approx(4.0));
        CHECK(p.theta == doctest::Approx(0.0));
    }
    SUBCASE("perspective scale matches the finite-difference oracle")
    {
        Eigen::Matrix3d m;
        m << 1.1, 0.05, 3.0,
             -0.04, 0.95, -2.0,
             4e-4, -3e-4, 1.0;
        const Homography h = make_homography(m);
        Rng rng(19);
        for (int i = 0; i < 50; ++i) {
            const RegionDetection q{rng.uniform(-50, 50), rng.uniform(-50, 50),
                                    rng.uniform(1.6, 8.0), rng.uniform(-3.0, 3.0)};
            const RegionDetection p = project_region(q, h);
            const double expected = q.m * oracles::fd_jacobian_scale(h, q.cx, q.cy);
            CHECK(p.m == doctest::Approx(expected).epsilon(1e-4));
        }
    }
    SUBCASE("projecting through H then H^-1 returns the region")
    {
        Eigen::Matrix3d m;
        m << 0.9, -0.2, 12.0,
             0.15, 1.2, -7.0,
             2e-4, 1e-4, 1.0;
        const Homography h = make_homography(m);
        const Homography hinv = make_homography(h.inverse());
        Rng rng(23);
        for (int i = 0; i < 100; ++i) {
            const RegionDetection q{rng.uniform(-80, 80), rng.uniform(-80, 80),
                                    rng.uniform(1.6, 6.0), rng.uniform(-3.0, 3.0)};
            const RegionDetection round = project_region(project_region(q, h), hinv);
            CHECK(std::abs(round.cx - q.cx) < 1e-9);
            CHECK(std::abs(round.cy - q.cy) < 1e-9);
            CHECK(std::abs(round.m - q.m) < 1e-6);
            CHECK(std::abs(wrap_angle(round.theta - q.theta)) < 1e-6);
        }
    }
    SUBCASE("center on the line at infinity is rejected")
    {
        Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
        m(2, 0) = -0.1; // w = 1 - 0.1 * cx vanishes at cx = 10
        CHECK_THROWS_AS((void)project_region({10.0, 0.0, 2.0, 0.0}, m),
                        std::domain_error);
    }
}

TEST_CASE("region_iou")
{
    const RegionDetection a{0, 0, 1, 0};

    SUBCASE("identical regions give exactly 1")
    {
        CHECK(region_iou(a, a, 5.0) == 1.0);
        CHECK(region_iou(a, a, 1.0) == 1.0);
    }
    SUBCASE("disjoint discs give 0")
    {
        const RegionDetection b{10, 0, 1, 0};
        CHECK(region_iou(a, b, 1.0) == 0.0);
    }
    SUBCASE("unit discs one apart match the closed-form lens value")
    {
        const RegionDetection b{1, 0, 1, 0};
        const double lens = 2.0 * std::acos(0.5) - std::sqrt(3.0) / 2.0;
        const double expected = lens / (2.0 * kPi - lens);
        CHECK(region_iou(a, b, 1.0) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(region_iou(a, b, 1.0) == doctest::Approx(0.2430).epsilon(2e-3));

        Rng rng(31);
        CHECK(region_iou(a, b, 1.0) ==
              doctest::Approx(oracles::mc_disc_iou(a, b, 1.0, rng)).epsilon(0.02));
    }
    SUBCASE("symmetric, in range, and 1 only at coincidence")
    {
        Rng rng(37);
        for (int i = 0; i < 300; ++i) {
            const RegionDetection p{rng.uniform(-5, 5), rng.uniform(-5, 5),
                                    rng.uniform(0.5, 4.0), 0};
            const RegionDetection q{rng.uniform(-5, 5), rng.uniform(-5, 5),
                                    rng.uniform(0.5, 4.0), 0};
            const double ij = region_iou(p, q, 2.0);
            CHECK(ij == region_iou(q, p, 2.0));
            CHECK(ij >= 0.0);
            CHECK(ij <= 1.0);
            const bool coincide = p.cx == q.cx && p.cy == q.cy && p.m == q.m;
            if (!coincide)
                CHECK(ij < 1.0);
        }
    }
    SUBCASE("rho must be positive")
    {
        CHECK_THROWS_AS((void)region_iou(a, a, 0.0), std::invalid_argument);
    }
}

TEST_CASE("region_frame")
{
    SUBCASE("unit region at the origin gives the identity scaling frame")
    {
        const Eigen::Matrix3d f = region_frame({0, 0, 1, 0}, 1.0);
        CHECK((f - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("corner (1,1) of the example region maps to (116, 66)")
    {
        const Eigen::Matrix3d f = region_frame({100, 50, 3.2, 0}, 5.0);
        const Eigen::Vector3d corner = f * Eigen::Vector3d(1, 1, 1);
        CHECK(corner.x() == doctest::Approx(116.0));
        CHECK(corner.y() == doctest::Approx(66.0));
    }
    SUBCASE("frame composed with its inverse is the identity")
    {
        Rng rng(41);
        for (int i = 0; i < 100; ++i) {
            const RegionDetection r{rng.uniform(-100, 100), rng.uniform(-100, 100),
                                    rng.uniform(0.5, 9.0), rng.uniform(-3.0, 3.0)};
            const Eigen::Matrix3d f = region_frame(r, rng.uniform(0.5, 8.0));
            CHECK((f * f.inverse() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
                  1e-12);
        }
    }
}

TEST_CASE("make_homography validates and normalizes")
{
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity() * 4.0;
    const Homography h = make_homography(m);
    CHECK(h(2, 2) == 1.0);
    CHECK(h(0, 0) == doctest::Approx(1.0));

    Eigen::Matrix3d singular = Eigen::Matrix3d::Zero();
    singular(2, 2) = 1.0;
    CHECK_THROWS_AS((void)make_homography(singular), std::invalid_argument);
}
