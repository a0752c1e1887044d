#pragma once

#include <exception>
#include <mutex>

namespace ncsyz {

// fn(i) for i in [0, count); exceptions from workers are rethrown on the caller
template <class Fn>
void for_each_index(bool parallel, long count, Fn&& fn) {
    if (!parallel) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr err;
    std::mutex m;
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < count; ++i) {
        try {
            fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(m);
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace ncsyz
