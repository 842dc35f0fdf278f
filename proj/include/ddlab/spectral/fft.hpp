#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace ddlab::spectral {

/// Cached FFTW r2c/c2r plans per transform size. Plan creation is serialized
/// (FFTW requirement); execution uses the thread-safe new-array interface, so
/// concurrent simulations may share the cache. FFTW_ESTIMATE keeps planning
/// deterministic and cheap.
class FftPlans {
  public:
    static FftPlans& instance() {
        static FftPlans p;
        return p;
    }

    /// values (size n) -> unnormalized half spectrum (size n/2+1)
    void forward(std::size_t n, const double* in, std::complex<double>* out) {
        const Pair& p = get(n);
        // r2c with PRESERVE_INPUT semantics needs a scratch copy only for c2r;
        // forward r2c does not modify its input for 1d out-of-place plans
        fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }

    /// unnormalized half spectrum -> values; the input buffer is clobbered
    void backward_destructive(std::size_t n, std::complex<double>* in, double* out) {
        const Pair& p = get(n);
        fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(in), out);
    }

  private:
    struct Pair {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };

    FftPlans() = default;
    ~FftPlans() {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.fwd);
            fftw_destroy_plan(p.bwd);
        }
    }
    FftPlans(const FftPlans&) = delete;

    const Pair& get(std::size_t n) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::vector<double> r(n);
        std::vector<std::complex<double>> c(n / 2 + 1);
        Pair p;
        p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), r.data(),
                                     reinterpret_cast<fftw_complex*>(c.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                     reinterpret_cast<fftw_complex*>(c.data()), r.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        return plans_.emplace(n, p).first->second;
    }

    std::mutex mu_;
    std::map<std::size_t, Pair> plans_;
};

}  // namespace ddlab::spectral
