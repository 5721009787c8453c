#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

namespace supmmd {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::vector<std::string> read_lines(const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

std::string to_lower_ascii(std::string s);
std::vector<std::string> split_ws(const std::string& s);
std::string join(const std::vector<std::string>& parts, const std::string& sep);
std::string trim(const std::string& s);

void warn(const std::string& msg);

// Deterministic work distribution: fn(i) writes only to slot i, so results are
// independent of thread scheduling. jobs<=1 runs inline.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Raw-draw helpers over mt19937; the std distributions are not portable bit-for-bit.
inline std::uint32_t draw_u32(std::mt19937& rng) { return rng(); }

inline int draw_int(std::mt19937& rng, int lo, int hi) {  // inclusive range
    return lo + static_cast<int>(rng() % static_cast<std::uint32_t>(hi - lo + 1));
}

inline bool draw_bernoulli(std::mt19937& rng, double p) {
    // integer threshold compare keeps the decision exact for p in [0,1]
    const auto threshold = static_cast<std::uint64_t>(p * 4294967296.0);
    return static_cast<std::uint64_t>(rng()) < threshold;
}

// Fisher-Yates with raw draws
template <typename T>
void shuffle_det(std::vector<T>& v, std::mt19937& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng() % i;
        std::swap(v[i - 1], v[j]);
    }
}

std::unordered_set<std::string> load_word_set(const std::string& path);

}  // namespace supmmd
