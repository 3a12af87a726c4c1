#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <tuple>

#include "frnse/error.hpp"

namespace frnse::fft {

using cplx = std::complex<double>;

enum class Kind { Forward, Backward, RealToComplex, ComplexToReal };

// Cube transforms of edge n, row-major with the last index fastest.
// FFTW planning is not thread-safe, so plans are created under a lock and
// reused; fftw_execute_dft* on distinct arrays is safe from any thread.
// FFTW_ESTIMATE keeps the chosen plan (and therefore the bits) reproducible.
class PlanCache {
public:
    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

    fftw_plan get(Kind kind, int n)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(static_cast<int>(kind), n);
        if (auto it = plans_.find(key); it != plans_.end())
            return it->second;

        const std::size_t total = std::size_t(n) * n * n;
        const std::size_t half = std::size_t(n) * n * (n / 2 + 1);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = nullptr;
        switch (kind) {
        case Kind::Forward:
        case Kind::Backward: {
            auto* buf = fftw_alloc_complex(total);
            plan = fftw_plan_dft_3d(n, n, n, buf, buf,
                                    kind == Kind::Forward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
            fftw_free(buf);
            break;
        }
        case Kind::RealToComplex: {
            auto* in = fftw_alloc_real(total);
            auto* out = fftw_alloc_complex(half);
            plan = fftw_plan_dft_r2c_3d(n, n, n, in, out, flags);
            fftw_free(in);
            fftw_free(out);
            break;
        }
        case Kind::ComplexToReal: {
            auto* in = fftw_alloc_complex(half);
            auto* out = fftw_alloc_real(total);
            plan = fftw_plan_dft_c2r_3d(n, n, n, in, out, flags);
            fftw_free(in);
            fftw_free(out);
            break;
        }
        }
        if (!plan)
            throw Error("FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache()
    {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

private:
    PlanCache() = default;

    std::mutex mutex_;
    std::map<std::tuple<int, int>, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

/// In-place unnormalized forward transform (exponent sign -1).
inline void forward(std::span<cplx> data, int n)
{
    fftw_execute_dft(PlanCache::instance().get(Kind::Forward, n), as_fftw(data.data()),
                     as_fftw(data.data()));
}

/// In-place unnormalized backward transform (exponent sign +1).
inline void backward(std::span<cplx> data, int n)
{
    fftw_execute_dft(PlanCache::instance().get(Kind::Backward, n), as_fftw(data.data()),
                     as_fftw(data.data()));
}

/// Real-to-half-complex; `out` has n*n*(n/2+1) entries. Input is preserved.
inline void r2c(std::span<const double> in, std::span<cplx> out, int n)
{
    fftw_execute_dft_r2c(PlanCache::instance().get(Kind::RealToComplex, n),
                         const_cast<double*>(in.data()), as_fftw(out.data()));
}

/// Half-complex-to-real; destroys `in`.
inline void c2r(std::span<cplx> in, std::span<double> out, int n)
{
    fftw_execute_dft_c2r(PlanCache::instance().get(Kind::ComplexToReal, n), as_fftw(in.data()),
                         out.data());
}

} // namespace frnse::fft
