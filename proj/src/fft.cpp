#include "combrs/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <utility>

namespace combrs::fft {
namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find({n, sign});
        if (it != plans_.end()) return it->second;
        // Planning needs scratch arrays; FFTW_UNALIGNED lets us execute on
        // any caller buffer afterwards.
        auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
        auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        if (plan == nullptr) throw std::runtime_error("fftw: failed to create plan");
        plans_.emplace(std::make_pair(n, sign), plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

CVec run(std::span<const cd> in, int sign) {
    CVec out(in.size());
    if (in.empty()) return out;
    CVec scratch(in.begin(), in.end());
    fftw_plan plan = cache().get(static_cast<int>(in.size()), sign);
    // std::complex<double> is layout-compatible with fftw_complex.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

CVec forward(std::span<const cd> in) { return run(in, FFTW_FORWARD); }
CVec backward(std::span<const cd> in) { return run(in, FFTW_BACKWARD); }

}  // namespace combrs::fft
