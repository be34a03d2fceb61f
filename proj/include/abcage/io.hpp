#pragma once

#include <iosfwd>
#include <string>

#include "abcage/experiments.hpp"
#include "abcage/tomography.hpp"

namespace abcage {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

void write_csv(std::ostream& out, const ResultTable& table);
void write_csv(const std::string& path, const ResultTable& table);
std::string csv_text(const ResultTable& table);

ResultTable dataset_table(const SidebandDataset& data);
ResultTable fit_table(const PhononFit& fit);

/// Reads a dataset CSV with columns time_ms, bright_probability, shots.
SidebandDataset read_sideband_csv(const std::string& path);

} // namespace abcage
