#include "nls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace nls::fft {

namespace {

struct PlanEntry {
    fftw_plan plan = nullptr;
    fftw_complex* dummy_in = nullptr;
    fftw_complex* dummy_out = nullptr;

    ~PlanEntry() {
        if (plan) fftw_destroy_plan(plan);
        if (dummy_in) fftw_free(dummy_in);
        if (dummy_out) fftw_free(dummy_out);
    }
};

// The FFTW planner is not thread safe; plan creation is serialized. Executing
// a cached plan through the new-array interface is safe from many threads.
std::mutex g_mutex;
std::map<std::tuple<int, int, bool>, PlanEntry> g_cache;

fftw_plan get_plan(const GridSpec& grid, bool forward) {
    std::lock_guard<std::mutex> lock(g_mutex);
    auto key = std::make_tuple(grid.dim, grid.n, forward);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return it->second.plan;

    PlanEntry& e = g_cache[key];
    std::size_t sz = grid.size();
    e.dummy_in = fftw_alloc_complex(sz);
    e.dummy_out = fftw_alloc_complex(sz);
    int dims[3] = {grid.n, grid.n, grid.n};
    e.plan = fftw_plan_dft(grid.dim, dims, e.dummy_in, e.dummy_out,
                           forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!e.plan) throw structural_error("fft: plan creation failed");
    return e.plan;
}

}  // namespace

void execute(const GridSpec& grid, const cplx* in, cplx* out, bool forward) {
    fftw_plan plan = get_plan(grid, forward);
    // fftw_alloc guarantees 16-byte alignment and our field allocator 32; the
    // new-array execute only needs matching alignment classes.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace nls::fft
