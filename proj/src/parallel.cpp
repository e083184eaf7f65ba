#include "kgpe/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace kgpe {

int worker_count()
{
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("KGPE_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1)
                n = std::min(n, cap);
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return n;
}

void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body)
{
    const std::ptrdiff_t count = end - begin;
    if (count <= 0)
        return;
    const auto workers = static_cast<std::ptrdiff_t>(std::min<std::ptrdiff_t>(worker_count(), count));
    if (workers <= 1) {
        for (auto i = begin; i < end; ++i)
            body(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::ptrdiff_t chunk = (count + workers - 1) / workers;
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
        const auto lo = begin + w * chunk;
        const auto hi = std::min(end, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([&body, lo, hi] {
            for (auto i = lo; i < hi; ++i)
                body(i);
        });
    }
}

} // namespace kgpe
