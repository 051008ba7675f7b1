#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace subemb::parallel {

namespace detail {
inline std::atomic<unsigned>& thread_override() {
    static std::atomic<unsigned> value{0};
    return value;
}
}  // namespace detail

/// Worker count: explicit override, else SUBEMB_THREADS, else hardware parallelism.
inline unsigned thread_count() {
    if (const unsigned forced = detail::thread_override().load(); forced > 0) {
        return forced;
    }
    if (const char* env = std::getenv("SUBEMB_THREADS"); env != nullptr && *env != '\0') {
        try {
            const long parsed = std::stol(env);
            if (parsed > 0) {
                return static_cast<unsigned>(parsed);
            }
        } catch (const std::exception&) {
            // fall through to hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Pins the worker count for the lifetime of the object (tests, CLI flags).
class ScopedThreadCount {
public:
    explicit ScopedThreadCount(unsigned count) : previous_(detail::thread_override().exchange(count)) {}
    ~ScopedThreadCount() { detail::thread_override().store(previous_); }
    ScopedThreadCount(const ScopedThreadCount&) = delete;
    ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

private:
    unsigned previous_;
};

/// Calls body(i) for every i in [0, count). Results must be written to
/// index-addressed storage; the first exception thrown is rethrown here.
template <typename Body>
void for_each_index(std::size_t count, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed.store(true);
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(run);
        }
        run();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace subemb::parallel
