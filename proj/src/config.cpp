#include "fracwave/config.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fracwave/errors.hpp"

namespace fracwave {
namespace {

std::uint64_t cap_from_environment() {
    const char* env = std::getenv("FS_ENUM_CAP");
    if (env == nullptr || *env == '\0') return kDefaultEnumerationCap;
    try {
        std::size_t pos = 0;
        const auto value = std::stoull(env, &pos);
        if (pos != std::string(env).size() || value == 0) throw InvalidInput("");
        return value;
    } catch (const std::exception&) {
        throw InvalidInput(std::string("FS_ENUM_CAP must be a positive integer, got '") + env + "'");
    }
}

std::atomic<std::uint64_t> g_cap{0};
std::atomic<unsigned> g_threads{0};

}  // namespace

std::uint64_t enumeration_cap() {
    auto cap = g_cap.load();
    if (cap == 0) {
        cap = cap_from_environment();
        g_cap.store(cap);
    }
    return cap;
}

void set_enumeration_cap(std::uint64_t cap) {
    if (cap == 0) throw InvalidInput("enumeration cap must be positive");
    g_cap.store(cap);
}

unsigned thread_count() {
    const unsigned t = g_threads.load();
    if (t != 0) return t;
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(unsigned threads) { g_threads.store(threads); }

void check_enumeration(std::uint64_t count, const char* what) {
    const auto cap = enumeration_cap();
    if (count > cap) {
        throw EnumerationOverflow(std::string("enumeration cap exceeded: ") + what + " needs " +
                                  std::to_string(count) + " items, cap is " + std::to_string(cap) +
                                  " (set FS_ENUM_CAP to raise it)");
    }
}

std::uint64_t saturating_pow(std::uint64_t base, unsigned exponent) {
    std::uint64_t result = 1;
    for (unsigned i = 0; i < exponent; ++i) {
        if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / base) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        result *= base;
    }
    return result;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace fracwave
