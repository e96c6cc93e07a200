#pragma once

#include "combrs/types.hpp"

namespace combrs::fft {

// Unnormalized transforms backed by FFTW. Plans are cached per (size,
// direction) and safe to use from multiple threads.
//   forward:  X[k] = sum_n x[n] e^{-j2pi kn/N}
//   backward: x[n] = sum_k X[k] e^{+j2pi kn/N}
CVec forward(std::span<const cd> in);
CVec backward(std::span<const cd> in);

}  // namespace combrs::fft
