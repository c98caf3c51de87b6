#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fxl {

// Small persistent worker pool for data-parallel loops. Chunks are claimed
// through an atomic cursor, so results never depend on scheduling as long as
// chunks write disjoint data.
class ThreadPool {
public:
    explicit ThreadPool(unsigned threads) {
        if (threads == 0) threads = 1;
        for (unsigned i = 1; i < threads; ++i)
            workers_.emplace_back([this] { worker_loop(); });
    }

    ~ThreadPool() {
        {
            std::unique_lock lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : workers_) t.join();
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    unsigned size() const { return static_cast<unsigned>(workers_.size()) + 1; }

    // Runs fn(begin, end) over [0, n) split into roughly even chunks. The
    // calling thread participates. Blocks until every chunk has completed.
    void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
        if (n == 0) return;
        if (workers_.empty() || n == 1) {
            fn(0, n);
            return;
        }
        std::size_t parts = std::min<std::size_t>(size() * 4, n);
        std::size_t chunk = (n + parts - 1) / parts;
        {
            std::unique_lock lk(mu_);
            job_ = &fn;
            total_ = n;
            chunk_size_ = chunk;
            next_.store(0, std::memory_order_relaxed);
            remaining_ = static_cast<long>(n);
            ++generation_;
        }
        cv_.notify_all();
        run_chunks(fn, n, chunk);
        std::unique_lock lk(mu_);
        done_cv_.wait(lk, [this] { return remaining_ == 0 && active_ == 0; });
        job_ = nullptr;
    }

    // Process-wide pool; built on first use with the configured thread count.
    static ThreadPool& global() {
        static ThreadPool pool(configured_threads());
        return pool;
    }

    // Takes effect only if called before the first global() use.
    static void set_global_threads(unsigned n) { configured_threads() = n ? n : 1; }

private:
    static unsigned& configured_threads() {
        static unsigned n = std::thread::hardware_concurrency() ? std::thread::hardware_concurrency() : 1;
        return n;
    }

    void run_chunks(const std::function<void(std::size_t, std::size_t)>& fn, std::size_t total,
                    std::size_t chunk) {
        while (true) {
            std::size_t begin = next_.fetch_add(chunk, std::memory_order_relaxed);
            if (begin >= total) break;
            std::size_t end = std::min(begin + chunk, total);
            fn(begin, end);
            std::unique_lock lk(mu_);
            remaining_ -= static_cast<long>(end - begin);
            if (remaining_ == 0) done_cv_.notify_all();
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        while (true) {
            const std::function<void(std::size_t, std::size_t)>* fn;
            std::size_t total, chunk;
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                fn = job_;
                total = total_;
                chunk = chunk_size_;
                ++active_;
            }
            if (fn) run_chunks(*fn, total, chunk);
            std::unique_lock lk(mu_);
            --active_;
            if (remaining_ == 0 && active_ == 0) done_cv_.notify_all();
        }
    }

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
    int active_ = 0;
    long remaining_ = 0;

    const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
    std::size_t total_ = 0;
    std::size_t chunk_size_ = 0;
    std::atomic<std::size_t> next_{0};
};

} // namespace fxl
