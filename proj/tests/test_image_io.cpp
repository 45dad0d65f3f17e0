#include <bg2/image_io.hpp>

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

using namespace bg2;

namespace {

Image8 random_image(std::mt19937_64& rng, int w, int h, int channels)
{
    Image8 img;
    img.width = w;
    img.height = h;
    img.channels = channels;
    img.data.resize(static_cast<std::size_t>(w) * h * channels);
    for (auto& b : img.data)
        b = static_cast<std::uint8_t>(rng() & 0xff);
    return img;
}

} // namespace

TEST_CASE("sRGB transfer: byte round trip and reference points")
{
    for (int b = 0; b < 256; ++b)
        CHECK(srgb_encode(srgb_decode(static_cast<std::uint8_t>(b))) == b);
    CHECK(srgb_encode(0.0) == 0);
    CHECK(srgb_encode(1.0) == 255);
    CHECK(srgb_encode(-3.0) == 0);
    CHECK(srgb_encode(7.0) == 255);
    // Standard curve: linear 0.5 encodes to 0.7354 * 255 = 187.5 -> 188.
    CHECK(srgb_encode(0.5) == 188);
    CHECK(srgb_decode(255) == 1.0);
}

TEST_CASE("PNG round trip for RGB and RGBA")
{
    std::mt19937_64 rng(41);
    for (const int channels : {3, 4}) {
        const Image8 img = random_image(rng, 23, 17, channels);
        const Image8 back = decode_png(encode_png(img));
        CHECK(back.width == 23);
        CHECK(back.height == 17);
        CHECK(back.channels == channels);
        CHECK(back.data == img.data);
        CHECK(encode_png(img) == encode_png(back));
    }
    CHECK_THROWS_AS(decode_png("not a png at all"), Error);
    std::string truncated = encode_png(random_image(rng, 8, 8, 3));
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS_AS(decode_png(truncated), Error);
}

TEST_CASE("files: atomic write and signature-detected read")
{
    test::TempDir dir("imageio");
    std::mt19937_64 rng(42);
    const Image8 img = random_image(rng, 9, 5, 4);
    write_png(dir / "sub" / "a.png", img);
    CHECK(read_image(dir / "sub" / "a.png").data == img.data);
    write_file_atomic(dir / "b.bin", "hello");
    CHECK(read_file(dir / "b.bin") == "hello");
    write_file_atomic(dir / "b.bin", "again");
    CHECK(read_file(dir / "b.bin") == "again");
    CHECK_THROWS_AS(read_file(dir / "missing"), Error);
    std::ofstream(dir / "junk.png") << "GIF89a....";
    CHECK_THROWS_AS(read_image(dir / "junk.png"), Error);
}

TEST_CASE("layer image: straight alpha, transparent pixels are zeroed")
{
    RenderTarget t(4, 2);
    t.color.col(t.pixel(1, 0)) << 0.5, 0.25, 1.0, 1.0;
    t.color.col(t.pixel(2, 1)) << 0.9, 0.9, 0.9, 0.0; // colour without coverage
    t.depth[t.pixel(1, 0)] = 1.25;
    const Image8 img = layer_to_image(t);
    CHECK(img.channels == 4);
    CHECK(img.at(1, 0, 0) == srgb_encode(0.5));
    CHECK(img.at(1, 0, 3) == 255);
    for (int k = 0; k < 4; ++k)
        CHECK(img.at(2, 1, k) == 0);

    const RenderTarget back = image_to_layer(decode_png(encode_png(img)));
    CHECK(back.alpha(1, 0) == 1.0);
    CHECK(back.color(0, back.pixel(1, 0)) == srgb_decode(srgb_encode(0.5)));
    CHECK(back.alpha(0, 0) == 0.0);
}

TEST_CASE("depth sidecar round trip")
{
    RenderTarget t(5, 3);
    t.color(3, t.pixel(0, 0)) = 1.0;
    t.depth[t.pixel(0, 0)] = 1.5;
    t.color(3, t.pixel(4, 2)) = 1.0;
    t.depth[t.pixel(4, 2)] = 0.75;
    t.depth[t.pixel(2, 1)] = 3.0; // holdout depth without cloth is not persisted
    RenderTarget back(5, 3);
    decode_depth(encode_depth(t), back);
    CHECK(back.depth[back.pixel(0, 0)] == 1.5);
    CHECK(back.depth[back.pixel(4, 2)] == 0.75);
    CHECK(std::isinf(back.depth[back.pixel(2, 1)]));

    RenderTarget wrong(4, 3);
    CHECK_THROWS_AS(decode_depth(encode_depth(t), wrong), Error);
    std::string bad = encode_depth(t);
    bad.resize(bad.size() - 3);
    CHECK_THROWS_AS(decode_depth(bad, back), Error);
}
