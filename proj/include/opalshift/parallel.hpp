#ifndef OPALSHIFT_PARALLEL_HPP
#define OPALSHIFT_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

extern "C" void openblas_set_num_threads(int);

namespace opalshift {

// Each worker thread calls single-threaded BLAS; outer parallelism only.
inline void pin_blas_single_threaded() { openblas_set_num_threads(1); }

inline int default_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n) on `workers` threads pulling from a shared
// counter. Callers own output slots indexed by i, so merged results do not
// depend on scheduling. The first exception thrown by any worker is rethrown.
inline void parallel_for_index(std::size_t n, int workers,
                               const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers < 1) workers = 1;
    if (workers == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    pin_blas_single_threaded();
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int nt = static_cast<int>(std::min<std::size_t>(workers, n));
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace opalshift

#endif
