#include "fpna/thread_pool.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace fpna {

ThreadPool::ThreadPool(std::size_t num_threads) {
    if (num_threads == 0)
        throw std::invalid_argument("ThreadPool: num_threads must be >= 1");
    workers_.reserve(num_threads);
    for (std::size_t i = 0; i < num_threads; ++i)
        workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
}

void ThreadPool::worker_loop() {
    for (;;) {
        std::function<void()> task;
        {
            std::unique_lock lock(mutex_);
            cv_.wait(lock, [this] { return stop_ || !tasks_.empty(); });
            if (stop_ && tasks_.empty()) return;
            task = std::move(tasks_.front());
            tasks_.pop();
        }
        task();
    }
}

void ThreadPool::parallel_for(std::size_t count,
                              const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    if (count == 1 || workers_.size() == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    // One shared index counter; each submitted job drains indices until empty.
    auto next = std::make_shared<std::atomic<std::size_t>>(0);
    auto done = std::make_shared<std::atomic<std::size_t>>(0);
    std::mutex done_mutex;
    std::condition_variable done_cv;

    std::size_t jobs = std::min(count, workers_.size());
    {
        std::lock_guard lock(mutex_);
        for (std::size_t j = 0; j < jobs; ++j) {
            tasks_.push([&, next, done, count] {
                for (;;) {
                    std::size_t i = next->fetch_add(1, std::memory_order_relaxed);
                    if (i >= count) break;
                    fn(i);
                    std::size_t finished = done->fetch_add(1, std::memory_order_acq_rel) + 1;
                    if (finished == count) {
                        std::lock_guard dlock(done_mutex);
                        done_cv.notify_all();
                    }
                }
            });
        }
    }
    cv_.notify_all();

    std::unique_lock lock(done_mutex);
    done_cv.wait(lock, [&] { return done->load(std::memory_order_acquire) == count; });
}

std::size_t ThreadPool::default_thread_count() {
    if (const char* env = std::getenv("FPNA_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 4;
    return std::min<std::size_t>(hw, 16);
}

}  // namespace fpna
