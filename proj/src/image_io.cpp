#include <bg2/image_io.hpp>

#include "binary_io.hpp"

#include <jpeglib.h>
#include <png.h>
#include <zlib.h>

#include <array>
#include <atomic>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

namespace bg2 {

std::uint8_t srgb_encode(double linear)
{
    const double c = std::clamp(linear, 0.0, 1.0);
    const double s = c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
    return static_cast<std::uint8_t>(std::lround(s * 255.0));
}

double srgb_decode(std::uint8_t encoded)
{
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double s = i / 255.0;
            t[i] = s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return table[encoded];
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t len)
{
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<const char*>(data), len);
}

void png_noop_flush(png_structp) {}

struct PngReadState {
    const std::string* bytes;
    std::size_t offset;
};

void png_consume(png_structp png, png_bytep data, png_size_t len)
{
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->offset + len > st->bytes->size())
        png_error(png, "truncated PNG");
    std::memcpy(data, st->bytes->data() + st->offset, len);
    st->offset += len;
}

void png_fail(png_structp png, png_const_charp msg)
{
    auto* message = static_cast<std::string*>(png_get_error_ptr(png));
    if (message)
        *message = msg;
    png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

struct JpegError {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
};

void jpeg_fail(j_common_ptr info)
{
    auto* err = reinterpret_cast<JpegError*>(info->err);
    std::longjmp(err->jump, 1);
}

Image8 decode_jpeg(const std::string& bytes)
{
    jpeg_decompress_struct info{};
    JpegError err{};
    info.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_fail;
    Image8 img;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&info);
        throw Error(ErrorCode::FormatError, "corrupt JPEG");
    }
    jpeg_create_decompress(&info);
    jpeg_mem_src(&info, reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&info, TRUE);
    info.out_color_space = JCS_RGB;
    jpeg_start_decompress(&info);
    img.width = static_cast<int>(info.output_width);
    img.height = static_cast<int>(info.output_height);
    img.channels = 3;
    img.data.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    while (info.output_scanline < info.output_height) {
        JSAMPROW row = img.data.data() + static_cast<std::size_t>(info.output_scanline) * img.width * 3;
        jpeg_read_scanlines(&info, &row, 1);
    }
    jpeg_finish_decompress(&info);
    jpeg_destroy_decompress(&info);
    return img;
}

} // namespace

std::string encode_png(const Image8& image)
{
    if (image.channels != 3 && image.channels != 4)
        throw Error(ErrorCode::InvalidArgument, "PNG encoder supports RGB and RGBA");
    std::string out;
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::IoError, "PNG encode failed: " + message);
    }
    png_set_write_fn(png, &out, png_append, png_noop_flush);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 image.channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    for (int y = 0; y < image.height; ++y)
        png_write_row(png, const_cast<png_bytep>(image.data.data() + y * stride));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

Image8 decode_png(const std::string& bytes)
{
    if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
        throw Error(ErrorCode::FormatError, "not a PNG file");
    std::string message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
    png_infop info = png_create_info_struct(png);
    Image8 img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::FormatError, "corrupt PNG: " + message);
    }
    PngReadState state{&bytes, 0};
    png_set_read_fn(png, &state, png_consume);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.channels = png_get_channels(png, info);
    img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y)
        rows[y] = img.data.data() + static_cast<std::size_t>(y) * img.width * img.channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes)
{
    static std::atomic<unsigned> counter{0};
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) +
                     "_" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw Error(ErrorCode::IoError, "write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Image8 read_image(const std::filesystem::path& path)
{
    const std::string bytes = read_file(path);
    if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF && static_cast<unsigned char>(bytes[1]) == 0xD8)
        return decode_jpeg(bytes);
    return decode_png(bytes);
}

void write_png(const std::filesystem::path& path, const Image8& image)
{
    write_file_atomic(path, encode_png(image));
}

Image8 layer_to_image(const RenderTarget& target)
{
    Image8 img;
    img.width = target.width;
    img.height = target.height;
    img.channels = 4;
    img.data.assign(static_cast<std::size_t>(img.width) * img.height * 4, 0);
    for (int y = 0; y < target.height; ++y)
        for (int x = 0; x < target.width; ++x) {
            const auto c = target.color.col(target.pixel(x, y));
            const double a = std::clamp(c[3], 0.0, 1.0);
            if (a <= 0.0)
                continue;
            for (int k = 0; k < 3; ++k)
                img.at(x, y, k) = srgb_encode(c[k]);
            img.at(x, y, 3) = static_cast<std::uint8_t>(std::lround(a * 255.0));
        }
    return img;
}

RenderTarget image_to_layer(const Image8& image)
{
    if (image.channels != 4)
        throw Error(ErrorCode::FormatError, "layer image must be RGBA");
    RenderTarget t(image.width, image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            auto c = t.color.col(t.pixel(x, y));
            for (int k = 0; k < 3; ++k)
                c[k] = srgb_decode(image.at(x, y, k));
            c[3] = image.at(x, y, 3) / 255.0;
        }
    return t;
}

std::string encode_depth(const RenderTarget& target)
{
    std::ostringstream raw(std::ios::binary);
    detail::LeWriter w(raw);
    for (Eigen::Index i = 0; i < target.depth.size(); ++i)
        w.f32(target.color(3, i) > 0.0 ? static_cast<float>(target.depth[i]) : std::numeric_limits<float>::infinity());
    const std::string plain = std::move(raw).str();

    uLongf packedLen = compressBound(static_cast<uLong>(plain.size()));
    std::string packed(packedLen, '\0');
    if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packedLen, reinterpret_cast<const Bytef*>(plain.data()),
                  static_cast<uLong>(plain.size()), 6) != Z_OK)
        throw Error(ErrorCode::IoError, "depth compression failed");
    packed.resize(packedLen);

    std::ostringstream os(std::ios::binary);
    detail::LeWriter h(os);
    h.bytes("BGD1", 4);
    h.u32(static_cast<std::uint32_t>(target.width));
    h.u32(static_cast<std::uint32_t>(target.height));
    h.u32(static_cast<std::uint32_t>(packed.size()));
    h.bytes(packed.data(), packed.size());
    return std::move(os).str();
}

void decode_depth(const std::string& bytes, RenderTarget& target)
{
    std::istringstream is(bytes, std::ios::binary);
    detail::LeReader r(is);
    r.magic("BGD1");
    const auto w = r.u32(), h = r.u32(), len = r.u32();
    if (static_cast<int>(w) != target.width || static_cast<int>(h) != target.height)
        throw Error(ErrorCode::DimensionMismatch, "depth map size differs from layer size");
    if (len > bytes.size())
        throw Error(ErrorCode::FormatError, "depth payload truncated");
    std::string packed(len, '\0');
    r.bytes(packed.data(), len);
    uLongf plainLen = static_cast<uLongf>(w) * h * 4;
    std::string plain(plainLen, '\0');
    if (uncompress(reinterpret_cast<Bytef*>(plain.data()), &plainLen, reinterpret_cast<const Bytef*>(packed.data()), len) != Z_OK ||
        plainLen != static_cast<uLongf>(w) * h * 4)
        throw Error(ErrorCode::FormatError, "corrupt depth payload");
    std::istringstream ps(plain, std::ios::binary);
    detail::LeReader pr(ps);
    for (Eigen::Index i = 0; i < target.depth.size(); ++i)
        target.depth[i] = pr.f32();
}

} // namespace bg2
