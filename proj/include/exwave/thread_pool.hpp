#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace exwave {

/// Fixed pool of workers for index-parallel loops. Work items write to
/// per-index slots, so results never depend on scheduling; callers reduce in
/// index order.
class ThreadPool {
    struct Job {
        std::atomic<size_t> next{0};
        std::atomic<size_t> done{0};
        size_t count = 0;
        const std::function<void(size_t)>* fn = nullptr;
        std::mutex mutex;
        std::condition_variable cv;
        bool finished = false;
        std::exception_ptr error;
        std::mutex error_mutex;

        // `finished` is only set after every fn(i) has returned, so the
        // caller's fn reference is safe for the whole run; stragglers that
        // wake late only touch the counters, which the shared_ptr keeps
        // alive.
        void run() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    (*fn)(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
                if (done.fetch_add(1) + 1 == count) {
                    std::lock_guard<std::mutex> lock(mutex);
                    finished = true;
                    cv.notify_all();
                }
            }
        }
    };

public:
    explicit ThreadPool(int workers) {
        workers = workers < 1 ? 1 : workers;
        for (int i = 0; i < workers - 1; ++i) {  // the caller is worker #0
            threads_.emplace_back([this] { worker_loop(); });
        }
    }

    ~ThreadPool() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    int worker_count() const { return static_cast<int>(threads_.size()) + 1; }

    /// Run fn(i) for i in [0, count), blocking until all complete.
    /// The first exception thrown by fn propagates to the caller.
    void parallel_for(size_t count, const std::function<void(size_t)>& fn) {
        if (count == 0) return;
        if (threads_.empty() || count == 1) {
            for (size_t i = 0; i < count; ++i) fn(i);
            return;
        }
        auto job = std::make_shared<Job>();
        job->count = count;
        job->fn = &fn;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            job_ = job;
            ++generation_;
        }
        cv_.notify_all();
        job->run();
        {
            std::unique_lock<std::mutex> lock(job->mutex);
            job->cv.wait(lock, [&] { return job->finished; });
        }
        {
            std::lock_guard<std::mutex> lock(mutex_);
            job_.reset();
        }
        if (job->error) std::rethrow_exception(job->error);
    }

private:
    void worker_loop() {
        uint64_t seen = 0;
        for (;;) {
            std::shared_ptr<Job> job;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                cv_.wait(lock, [&] { return stop_ || (job_ && generation_ != seen); });
                if (stop_) return;
                seen = generation_;
                job = job_;
            }
            job->run();
        }
    }

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::shared_ptr<Job> job_;
    uint64_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace exwave
