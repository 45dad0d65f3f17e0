#include <bg2/texture.hpp>

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bg2;

namespace {

TextureParams undistorted(double fu, double fv)
{
    TextureParams p;
    p.freq_u = fu;
    p.freq_v = fv;
    p.distort_amp = 0.0;
    return p;
}

// Dyadic sample points keep u + 1/freq exact for power-of-two frequencies.
double dyadic(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 44) * 0x1.0p-20;
}

} // namespace

TEST_CASE("height: sine peaks give 1")
{
    CHECK(height(0.25, 0.25, undistorted(1, 1)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(height(0.75, 0.25, undistorted(1, 1)) == doctest::Approx(0.0));
}

TEST_CASE("height: exact periodicity without distortion")
{
    std::mt19937_64 rng(1);
    for (const double f : {1.0, 4.0, 64.0, 128.0, 256.0}) {
        const TextureParams p = undistorted(f, f);
        for (int k = 0; k < 2000; ++k) {
            const double u = dyadic(rng), v = dyadic(rng);
            const double h = height(u, v, p);
            CHECK(height(u + 1.0 / f, v, p) == h);
            CHECK(height(u, v + 1.0 / f, p) == h);
            CHECK(height(u + 1.0, v - 1.0, p) == h);
        }
    }
}

TEST_CASE("height: deterministic, bounded, and seed-dependent when distorted")
{
    std::mt19937_64 rng(2);
    TextureParams a;
    a.seed = 11;
    TextureParams b = a;
    b.seed = 12;
    int differ = 0;
    for (int k = 0; k < 1000; ++k) {
        const Vector2d uv = test::random_vec(rng, 0.0, 1.0).head<2>();
        const double h = height(uv.x(), uv.y(), a);
        CHECK(h == height(uv.x(), uv.y(), a));
        CHECK(h >= 0.0);
        CHECK(h <= 1.0);
        differ += h != height(uv.x(), uv.y(), b);
    }
    CHECK(differ > 900);
}

TEST_CASE("value noise: range and lattice periodicity")
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 2000; ++k) {
        const double u = dyadic(rng), v = dyadic(rng);
        const double n = value_noise(u, v, 8.0, 5);
        CHECK(n >= -1.0);
        CHECK(n <= 1.0);
        CHECK(value_noise(u + 1.0, v, 8.0, 5) == n);
        CHECK(value_noise(u, v + 2.0, 8.0, 5) == n);
    }
}

TEST_CASE("albedo: checker parity and the height scale")
{
    TextureParams p = undistorted(4, 4);
    p.checker_cells = 2.0;
    p.color_a = Vector3d(0.5, 0.4, 0.3);
    p.color_b = Vector3d(0.05, 0.1, 0.15);
    // Parity oracle: (floor(2u) + floor(2v)) mod 2.
    auto expectedBase = [&](double u, double v) {
        const int cell = (static_cast<int>(std::floor(2 * u)) + static_cast<int>(std::floor(2 * v))) % 2;
        return cell == 0 ? p.color_a : p.color_b;
    };
    const Vector3d a = albedo(0.1, 0.1, p);
    const Vector3d b = albedo(0.6, 0.1, p);
    CHECK((a.array() / p.color_a.array()).maxCoeff() <= 1.0 + 1e-15);
    CHECK((a.array() / p.color_a.array() - (a.x() / p.color_a.x())).abs().maxCoeff() < 1e-12);
    CHECK((b.array() / p.color_b.array() - (b.x() / p.color_b.x())).abs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(4);
    for (int k = 0; k < 1000; ++k) {
        const double u = dyadic(rng), v = dyadic(rng);
        const Vector3d base = expectedBase(u, v);
        const Vector3d c = albedo(u, v, p);
        CHECK((c - base * (0.7 + 0.3 * height(u, v, p))).norm() < 1e-15);
        CHECK(((c.array() >= 0.7 * base.array() - 1e-15) && (c.array() <= base.array() + 1e-15)).all());
    }
}

TEST_CASE("albedo: equal colours make parity irrelevant")
{
    TextureParams p;
    p.color_b = p.color_a;
    std::mt19937_64 rng(5);
    for (int k = 0; k < 500; ++k) {
        const double u = dyadic(rng), v = dyadic(rng);
        CHECK((albedo(u, v, p) - p.color_a * (0.7 + 0.3 * height(u, v, p))).norm() == 0.0);
    }
}

TEST_CASE("bump normal: identity cases")
{
    const Vector3d n(0, 0, 1), t(1, 0, 0), b(0, 1, 0);
    TextureParams p;
    p.bump_strength = 0.0;
    CHECK(bump_normal(0.3, 0.7, n, t, b, p) == n);

    // Both sines at a crest: the central difference is symmetric, so the gradient vanishes.
    TextureParams flat = undistorted(1, 1);
    flat.bump_strength = 1.0;
    CHECK((bump_normal(0.25, 0.25, n, t, b, flat) - n).norm() < 1e-6);
}

TEST_CASE("bump normal: unit length and front-facing over random frames and parameters")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> strength(0.0, 1.0);
    for (int k = 0; k < 20000; ++k) {
        const Matrix3d R = test::random_rotation(rng);
        TextureParams p = sample_params(rng(), TextureRanges{});
        p.bump_strength = strength(rng);
        const Vector2d uv = test::random_vec(rng, -2.0, 2.0).head<2>();
        const Vector3d n = bump_normal(uv.x(), uv.y(), R.col(2), R.col(0), R.col(1), p);
        CHECK(std::abs(n.norm() - 1.0) <= 1e-6);
        CHECK(n.dot(R.col(2)) > 0.0);
    }
}

TEST_CASE("sample_params: fixed ranges, determinism, statistics, errors")
{
    TextureParams want;
    want.freq_u = 33;
    want.color_a = Vector3d(0.2, 0.3, 0.4);
    want.seed = 99;
    CHECK(sample_params(99, TextureRanges::fixed(want)) == want);

    const TextureParams a = sample_params(1234, TextureRanges{});
    CHECK(a == sample_params(1234, TextureRanges{}));
    CHECK_FALSE(a == sample_params(1235, TextureRanges{}));
    CHECK_NOTHROW(a.validate());

    TextureRanges r;
    r.freq_u = {20.0, 40.0};
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const double f = sample_params(s, r).freq_u;
        CHECK(f >= 20.0);
        CHECK(f <= 40.0);
        sum += f;
    }
    CHECK(sum / 1000.0 >= 28.0);
    CHECK(sum / 1000.0 <= 32.0);

    r.distort_amp = {1.0, 0.5};
    try {
        sample_params(1, r);
        FAIL("expected BadRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadRange);
    }
}

TEST_CASE("texture params survive JSON")
{
    const TextureParams p = sample_params(77, TextureRanges{});
    const nlohmann::json j = p;
    CHECK(j.get<TextureParams>() == p);
    const nlohmann::json jr = TextureRanges{};
    const TextureRanges back = jr.get<TextureRanges>();
    CHECK(back.freq_u.lo == 120.0);
    CHECK(back.color_b.hi == Vector3d::Constant(0.12));
}
