#pragma once

#include "combrs/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace combrs::harness {

struct LabeledMatrix {
    std::vector<double> row_axis;  // tau, seconds
    std::vector<double> col_axis;  // f_d, Hz
    Matrix<double> values;
};

// First cell empty, first row the column axis, first column the row axis,
// 9 significant digits, '\n' line endings.
std::string format_csv(const LabeledMatrix& m);
LabeledMatrix parse_csv(const std::string& text);

// ASCII graymap, 255 levels, dB relative to the maximum clipped to
// [-60, 0]. `power` selects 10 log10 instead of 20 log10.
std::string format_pgm(const Matrix<double>& values, bool power);

std::string format_matrix_json(const LabeledMatrix& m, const std::string& quantity);

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Creates parent directories as needed; throws OutputError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace combrs::harness
