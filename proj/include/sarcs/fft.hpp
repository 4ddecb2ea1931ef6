#ifndef SARCS_FFT_HPP
#define SARCS_FFT_HPP

#include <complex>
#include <cstddef>

#include "sarcs/grid.hpp"

namespace sarcs::fft {

/// In-place 1-D DFT, unscaled (FFTW convention).
void forward(std::complex<double>* data, std::size_t n);

/// In-place 1-D inverse DFT, scaled by 1/n.
void inverse(std::complex<double>* data, std::size_t n);

/// Transform every row (length = cols) of the grid in place.
void forward_rows(GridC& g);
void inverse_rows(GridC& g);

/// Transform every column (length = rows) of the grid in place.
void forward_cols(GridC& g);
void inverse_cols(GridC& g);

}  // namespace sarcs::fft

#endif
