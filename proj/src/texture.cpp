#include <bg2/texture.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace bg2 {

namespace {

constexpr std::uint64_t kSecondNoise = 0x9E3779B97F4A7C15ull;

double unit_from_bits(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::int64_t wrap(std::int64_t i, std::int64_t period)
{
    const std::int64_t r = i % period;
    return r < 0 ? r + period : r;
}

double lattice(std::int64_t i, std::int64_t j, std::int64_t period, std::uint64_t seed)
{
    const auto key = static_cast<std::uint64_t>(wrap(i, period) * period + wrap(j, period));
    return 2.0 * unit_from_bits(splitmix64(seed ^ splitmix64(key))) - 1.0;
}

double smoothstep(double t)
{
    return t * t * (3.0 - 2.0 * t);
}

double fract(double x)
{
    return x - std::floor(x);
}

void check_range(const Range& r, const char* field)
{
    if (r.lo > r.hi)
        throw Error(ErrorCode::BadRange, std::string(field) + ": lo > hi");
}

} // namespace

void TextureParams::validate() const
{
    if (!(freq_u > 0.0 && freq_v > 0.0))
        throw Error(ErrorCode::InvalidArgument, "texture frequencies must be positive");
    if (distort_amp < 0.0 || bump_strength < 0.0)
        throw Error(ErrorCode::InvalidArgument, "distortion amplitude and bump strength must be >= 0");
    if (!(checker_cells > 0.0) || !(distort_scale > 0.0))
        throw Error(ErrorCode::InvalidArgument, "checker cells and distortion scale must be positive");
    if ((color_a.array() < 0.0).any() || (color_a.array() > 1.0).any() || (color_b.array() < 0.0).any() ||
        (color_b.array() > 1.0).any())
        throw Error(ErrorCode::InvalidArgument, "texture colours must lie in [0,1]");
}

TextureRanges TextureRanges::fixed(const TextureParams& p)
{
    TextureRanges r;
    r.freq_u = {p.freq_u, p.freq_u};
    r.freq_v = {p.freq_v, p.freq_v};
    r.distort_amp = {p.distort_amp, p.distort_amp};
    r.distort_scale = {p.distort_scale, p.distort_scale};
    r.bump_strength = {p.bump_strength, p.bump_strength};
    r.checker_cells = {p.checker_cells, p.checker_cells};
    r.color_a = {p.color_a, p.color_a};
    r.color_b = {p.color_b, p.color_b};
    return r;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double value_noise(double u, double v, double cells, std::uint64_t seed)
{
    const auto period = std::max<std::int64_t>(1, std::llround(cells));
    const double x = u * static_cast<double>(period);
    const double y = v * static_cast<double>(period);
    const double fx = std::floor(x), fy = std::floor(y);
    const auto i = static_cast<std::int64_t>(fx);
    const auto j = static_cast<std::int64_t>(fy);
    const double tx = smoothstep(x - fx), ty = smoothstep(y - fy);

    const double v00 = lattice(i, j, period, seed);
    const double v10 = lattice(i + 1, j, period, seed);
    const double v01 = lattice(i, j + 1, period, seed);
    const double v11 = lattice(i + 1, j + 1, period, seed);
    const double a = v00 + (v10 - v00) * tx;
    const double b = v01 + (v11 - v01) * tx;
    return a + (b - a) * ty;
}

double height(double u, double v, const TextureParams& p)
{
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    double phaseU = kTwoPi * fract(p.freq_u * u);
    double phaseV = kTwoPi * fract(p.freq_v * v);
    if (p.distort_amp != 0.0) {
        phaseU += p.distort_amp * value_noise(u, v, p.distort_scale, p.seed);
        phaseV += p.distort_amp * value_noise(u, v, p.distort_scale, p.seed ^ kSecondNoise);
    }
    return 0.25 * (1.0 + std::sin(phaseU)) * (1.0 + std::sin(phaseV));
}

Vector3d albedo(double u, double v, const TextureParams& p)
{
    const auto cu = static_cast<std::int64_t>(std::floor(u * p.checker_cells));
    const auto cv = static_cast<std::int64_t>(std::floor(v * p.checker_cells));
    const Vector3d& base = wrap(cu + cv, 2) == 0 ? p.color_a : p.color_b;
    return base * (0.7 + 0.3 * height(u, v, p));
}

Vector3d bump_normal(double u, double v, const Vector3d& normal, const Vector3d& tangent,
                     const Vector3d& bitangent, const TextureParams& p)
{
    if (p.bump_strength == 0.0)
        return normal;
    constexpr double kStep = 1e-3;
    const double dhdu = (height(u + kStep, v, p) - height(u - kStep, v, p)) / (2.0 * kStep);
    const double dhdv = (height(u, v + kStep, p) - height(u, v - kStep, p)) / (2.0 * kStep);
    return (normal - p.bump_strength * (dhdu * tangent + dhdv * bitangent)).normalized();
}

TextureParams sample_params(std::uint64_t seed, const TextureRanges& r)
{
    check_range(r.freq_u, "freqU");
    check_range(r.freq_v, "freqV");
    check_range(r.distort_amp, "distortAmp");
    check_range(r.distort_scale, "distortScale");
    check_range(r.bump_strength, "bumpStrength");
    check_range(r.checker_cells, "checkerCells");
    if ((r.color_a.lo.array() > r.color_a.hi.array()).any())
        throw Error(ErrorCode::BadRange, "colorA: lo > hi");
    if ((r.color_b.lo.array() > r.color_b.hi.array()).any())
        throw Error(ErrorCode::BadRange, "colorB: lo > hi");

    std::mt19937_64 gen(seed);
    auto draw = [&gen](const Range& range) { return range.lo + (range.hi - range.lo) * unit_from_bits(gen()); };

    TextureParams p;
    p.freq_u = draw(r.freq_u);
    p.freq_v = draw(r.freq_v);
    p.distort_amp = draw(r.distort_amp);
    p.distort_scale = draw(r.distort_scale);
    p.bump_strength = draw(r.bump_strength);
    p.checker_cells = draw(r.checker_cells);
    // One draw per colour keeps grey levels grey.
    p.color_a = r.color_a.lo + (r.color_a.hi - r.color_a.lo) * unit_from_bits(gen());
    p.color_b = r.color_b.lo + (r.color_b.hi - r.color_b.lo) * unit_from_bits(gen());
    p.seed = seed;
    return p;
}

namespace {

nlohmann::json vec_json(const Vector3d& v)
{
    return nlohmann::json::array({v.x(), v.y(), v.z()});
}

Vector3d vec_from(const nlohmann::json& j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

nlohmann::json range_json(const Range& r)
{
    return nlohmann::json::array({r.lo, r.hi});
}

Range range_from(const nlohmann::json& j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

} // namespace

void to_json(nlohmann::json& j, const TextureParams& p)
{
    j = nlohmann::json{{"freqU", p.freq_u},
                       {"freqV", p.freq_v},
                       {"distortAmp", p.distort_amp},
                       {"distortScale", p.distort_scale},
                       {"bumpStrength", p.bump_strength},
                       {"checkerCells", p.checker_cells},
                       {"colorA", vec_json(p.color_a)},
                       {"colorB", vec_json(p.color_b)},
                       {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, TextureParams& p)
{
    p = TextureParams{};
    p.freq_u = j.value("freqU", p.freq_u);
    p.freq_v = j.value("freqV", p.freq_v);
    p.distort_amp = j.value("distortAmp", p.distort_amp);
    p.distort_scale = j.value("distortScale", p.distort_scale);
    p.bump_strength = j.value("bumpStrength", p.bump_strength);
    p.checker_cells = j.value("checkerCells", p.checker_cells);
    if (j.contains("colorA"))
        p.color_a = vec_from(j["colorA"]);
    if (j.contains("colorB"))
        p.color_b = vec_from(j["colorB"]);
    p.seed = j.value("seed", p.seed);
    p.validate();
}

void to_json(nlohmann::json& j, const TextureRanges& r)
{
    j = nlohmann::json{{"freqU", range_json(r.freq_u)},
                       {"freqV", range_json(r.freq_v)},
                       {"distortAmp", range_json(r.distort_amp)},
                       {"distortScale", range_json(r.distort_scale)},
                       {"bumpStrength", range_json(r.bump_strength)},
                       {"checkerCells", range_json(r.checker_cells)},
                       {"colorA", {vec_json(r.color_a.lo), vec_json(r.color_a.hi)}},
                       {"colorB", {vec_json(r.color_b.lo), vec_json(r.color_b.hi)}}};
}

void from_json(const nlohmann::json& j, TextureRanges& r)
{
    r = TextureRanges{};
    auto opt = [&j](const char* key, Range& out) {
        if (j.contains(key))
            out = range_from(j[key]);
    };
    opt("freqU", r.freq_u);
    opt("freqV", r.freq_v);
    opt("distortAmp", r.distort_amp);
    opt("distortScale", r.distort_scale);
    opt("bumpStrength", r.bump_strength);
    opt("checkerCells", r.checker_cells);
    if (j.contains("colorA"))
        r.color_a = {vec_from(j["colorA"].at(0)), vec_from(j["colorA"].at(1))};
    if (j.contains("colorB"))
        r.color_b = {vec_from(j["colorB"].at(0)), vec_from(j["colorB"].at(1))};
}

} // namespace bg2
