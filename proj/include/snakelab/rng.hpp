#pragma once

// Reproducible per-replica RNG streams. Streams are derived from
// (master seed, replica index) by a splitmix64 counter chain, so replica i's
// draws never depend on thread scheduling or on other replicas.

#include <atomic>
#include <cstdint>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace snakelab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

// engine seed for (master, replica); recorded in run manifests
inline std::uint64_t derived_seed(std::uint64_t master, std::uint64_t replica) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= 0xD1B54A32D192ED03ull * (replica + 1);
    std::uint64_t b = splitmix64(s);
    return a ^ (b * 0x9E3779B97F4A7C15ull) ^ replica;
}

inline Rng seed_stream(std::uint64_t master, std::uint64_t replica) {
    return Rng(derived_seed(master, replica));
}

// Runs fn(replica, rng) for replica = 0..replicas-1 on a bounded worker pool.
// Writers index into preallocated storage by replica, so merge order is fixed.
template <class Fn>
void parallel_replicas(std::size_t replicas, std::uint64_t master, Fn&& fn,
                       unsigned max_threads = 0) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned nthreads = max_threads ? std::min(max_threads, hw) : hw;
    nthreads = std::min<std::size_t>(nthreads, replicas ? replicas : 1);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < replicas; ++i) {
            Rng rng = seed_stream(master, i);
            fn(i, rng);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= replicas) return;
                try {
                    Rng rng = seed_stream(master, i);
                    fn(i, rng);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace snakelab
