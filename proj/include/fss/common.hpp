#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fss {

inline constexpr const char* kVersion = "0.1.0";

/// Runtime failure anywhere in the pipeline. Messages are prefixed with the
/// stage that raised them ("mesh_io: ...", "sampler: ...") so the CLI can
/// report which step broke.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

// ---------------------------------------------------------------------------
// Deterministic randomness. All entropy flows from caller-supplied seeds;
// sub-streams (per face, per replicate) are derived with splitmix64 so the
// result never depends on execution order.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

/// Uniform double in [0,1) from the top 53 bits; bit-identical on every
/// platform, unlike std::uniform_real_distribution.
inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform index in [0,n). Modulo bias is irrelevant at our scales and the
/// result is reproducible across standard libraries.
inline std::size_t bounded_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

// ---------------------------------------------------------------------------
// Thread cap shared by all parallel loops (CLI --threads / FSS_THREADS).
// ---------------------------------------------------------------------------

namespace detail {
inline std::atomic<int>& thread_cap() {
    static std::atomic<int> cap{0};  // 0 = hardware concurrency
    return cap;
}
}  // namespace detail

inline void set_max_threads(int n) { detail::thread_cap().store(n); }

inline int max_threads() {
    int cap = detail::thread_cap().load();
    if (cap > 0) return cap;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [begin,end). Tasks must write disjoint outputs; the
/// chunking never affects results, only wall time.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, Fn&& fn) {
    const std::int64_t count = end - begin;
    if (count <= 0) return;
    int threads = max_threads();
    if (threads <= 1 || count == 1) {
        for (std::int64_t i = begin; i < end; ++i) fn(i);
        return;
    }
    if (threads > count) threads = static_cast<int>(count);
    std::atomic<std::int64_t> next{begin};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<bool> failed{false};
    std::exception_ptr eptr;
    std::mutex* mtx = nullptr;  // errors are rare; capture the first one only
    static std::mutex err_mutex;
    mtx = &err_mutex;
    auto worker = [&]() {
        for (;;) {
            std::int64_t i = next.fetch_add(1);
            if (i >= end || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(*mtx);
                if (!failed.exchange(true)) eptr = std::current_exception();
                return;
            }
        }
    };
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && eptr) std::rethrow_exception(eptr);
}

}  // namespace fss
