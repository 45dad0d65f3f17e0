#pragma once

#include <bg2/common.hpp>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace bg2::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "bg2")
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline Vector3d random_vec(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> d(lo, hi);
    return {d(rng), d(rng), d(rng)};
}

inline Matrix3d random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

} // namespace bg2::test
