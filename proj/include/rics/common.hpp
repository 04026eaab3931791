#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rics {

using VertexId = std::uint32_t;

// ---- error types -----------------------------------------------------------

struct RicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : RicsError {
    using RicsError::RicsError;
};
struct ValidationError : RicsError {
    using RicsError::RicsError;
};
struct ConnectivityError : RicsError {
    using RicsError::RicsError;
};
struct ParamError : RicsError {
    using RicsError::RicsError;
};
struct QueryError : RicsError {
    using RicsError::RicsError;
};
struct FormatError : RicsError {
    using RicsError::RicsError;
};
struct StaleIndexError : RicsError {
    using RicsError::RicsError;
};

// ---- hashing ----------------------------------------------------------------

// FNV-1a, 64 bit: offset 14695981039346656037, prime 1099511628211.
// Keyword hashing and graph fingerprints must agree across platforms, so the
// constants are fixed here rather than delegated to std::hash.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t x, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (x >> (8 * i)) & 0xff;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---- deterministic rng -------------------------------------------------------

// splitmix64; used instead of std:: distributions so that generated graphs are
// byte-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    std::uint64_t next_index(std::uint64_t n) { return next_u64() % n; }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double next_real(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t state_;
};

// ---- parallelism -------------------------------------------------------------

// Number of worker threads, capped by the RICS_THREADS environment variable.
int worker_threads();

// Runs fn(i) for i in [0, n). Work items must be independent; results must not
// depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rics
