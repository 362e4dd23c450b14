#pragma once

/// @file fft.hpp
/// @brief Minimal RAII wrapper over FFTW complex transforms.

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "beatnls/numeric.hpp"

namespace beatnls {

/// Planner calls are not thread-safe in FFTW; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Unnormalised forward (e^{-ikx}) and backward (e^{+ikx}) transforms of length n.
class FftPlan {
public:
    explicit FftPlan(int n) : n_(n) {
        if (n < 1) throw ValidationError("FFT length must be positive");
        std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!fwd_ || !bwd_) throw ComputationError("FFTW plan creation failed");
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
    }

    [[nodiscard]] int size() const { return n_; }

    void forward(std::vector<std::complex<double>>& x) const { run(fwd_, x); }
    void backward(std::vector<std::complex<double>>& x) const { run(bwd_, x); }

private:
    void run(fftw_plan p, std::vector<std::complex<double>>& x) const {
        if (static_cast<int>(x.size()) != n_) throw ValidationError("FFT buffer has wrong length");
        auto* d = reinterpret_cast<fftw_complex*>(x.data());
        fftw_execute_dft(p, d, d);
    }

    int n_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace beatnls
