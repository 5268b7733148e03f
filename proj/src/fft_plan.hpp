#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>

namespace decoh::quantum::detail {

// Owning handle for an in-place 2D FFTW plan bound to one buffer. FFTW_ESTIMATE keeps the
// chosen algorithm, and therefore the rounding, identical from run to run.
class FftPlan2D {
public:
    FftPlan2D(int ny, int nx, std::complex<double>* data, int sign) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        auto* buf = reinterpret_cast<fftw_complex*>(data);
        plan_ = fftw_plan_dft_2d(ny, nx, buf, buf, sign, FFTW_ESTIMATE);
        if (plan_ == nullptr) throw std::runtime_error("fftw_plan_dft_2d failed");
    }
    ~FftPlan2D() {
        if (plan_ != nullptr) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
    }
    FftPlan2D(const FftPlan2D&) = delete;
    FftPlan2D& operator=(const FftPlan2D&) = delete;

    void execute() const { fftw_execute(plan_); }

private:
    // The FFTW planner is not thread-safe; execution is.
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }
    fftw_plan plan_{nullptr};
};

}  // namespace decoh::quantum::detail
