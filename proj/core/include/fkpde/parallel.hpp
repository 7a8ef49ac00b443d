#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace fkpde {

struct ReplicateOutcome {
    double value = 0.0;
    std::uint64_t work = 0;
};

struct ReplicateStats {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
    std::uint64_t work_total = 0;
    std::uint64_t work_max = 0;
    std::uint64_t work_median = 0;
};

// Runs f(0..n-1) across a small thread pool. Replicates are assigned to
// fixed index chunks and reduced in chunk order, so the result is
// bit-identical for any thread count. Each replicate must derive its own
// randomness from its index.
template <typename F>
ReplicateStats run_replicates(std::size_t n, int threads, F&& f) {
    constexpr std::size_t kChunk = 1024;
    ReplicateStats out;
    out.n = n;
    if (n == 0) return out;

    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    struct ChunkAcc {
        double sum = 0.0, sumsq = 0.0;
        std::uint64_t work = 0, work_max = 0;
    };
    std::vector<ChunkAcc> acc(n_chunks);
    std::vector<std::uint64_t> works(n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};

    auto worker = [&]() {
        while (true) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks || failed.load(std::memory_order_relaxed)) return;
            try {
                const std::size_t b = c * kChunk;
                const std::size_t e = std::min(n, b + kChunk);
                ChunkAcc a;
                for (std::size_t i = b; i < e; ++i) {
                    const ReplicateOutcome r = f(i);
                    a.sum += r.value;
                    a.sumsq += r.value * r.value;
                    a.work += r.work;
                    a.work_max = std::max(a.work_max, r.work);
                    works[i] = r.work;
                }
                acc[c] = a;
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };

    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n_chunks)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) std::rethrow_exception(error);

    double sum = 0.0, sumsq = 0.0;
    for (const auto& a : acc) {
        sum += a.sum;
        sumsq += a.sumsq;
        out.work_total += a.work;
        out.work_max = std::max(out.work_max, a.work_max);
    }
    out.mean = sum / static_cast<double>(n);
    if (n > 1) {
        const double var =
            std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1));
        out.sd = std::sqrt(var);
    }
    auto mid = works.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(works.begin(), mid, works.end());
    out.work_median = *mid;
    return out;
}

}  // namespace fkpde
