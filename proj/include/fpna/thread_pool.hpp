#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace fpna {

// Fixed-size worker pool. Tasks are plain closures; parallel_for blocks the
// caller until every task index has been processed. Task index assignment is
// dynamic, so results must not depend on which worker runs which index.
class ThreadPool {
public:
    explicit ThreadPool(std::size_t num_threads);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    std::size_t size() const { return workers_.size(); }

    // Runs fn(i) for i in [0, count). fn is invoked concurrently from pool
    // workers (and possibly the calling thread when the pool has one worker).
    void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

    // Number of workers to use by default: FPNA_THREADS env var if set,
    // otherwise hardware_concurrency clamped to [1, 16].
    static std::size_t default_thread_count();

private:
    void worker_loop();

    std::vector<std::thread> workers_;
    std::queue<std::function<void()>> tasks_;
    std::mutex mutex_;
    std::condition_variable cv_;
    bool stop_ = false;
};

}  // namespace fpna
