#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <sstream>
#include <thread>
#include <vector>
#include <atomic>
#include <mutex>

namespace soergel {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
template <class... Ts>
std::string concat(const Ts&... ts) {
    std::ostringstream os;
    (os << ... << ts);
    return os.str();
}
} // namespace detail

#define SOERGEL_REQUIRE(cond, ...)                                             \
    do {                                                                       \
        if (!(cond))                                                           \
            throw ::soergel::Error(::soergel::detail::concat(__VA_ARGS__));    \
    } while (0)

inline void hash_mix(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

// Runs fn(i) for i in [0, n). jobs <= 1 stays serial; exceptions propagate.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned workers = std::min<std::size_t>(jobs, n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mtx);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace soergel
