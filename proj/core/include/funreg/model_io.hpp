#pragma once

#include <filesystem>
#include <iosfwd>

#include "funreg/estimator.hpp"
#include "funreg/simulate.hpp"

namespace funreg {

/*
 * Model file: one JSON document holding the kernel kind, both grids, R and B
 * (row-major), the penalty configuration and convergence metadata. Reals are
 * written in shortest round-trip form, so a reload is bit-exact.
 */
void write_model(std::ostream& os, const FittedModel& model);
FittedModel read_model(std::istream& is);
void save_model(const FittedModel& model, const std::filesystem::path& path);
FittedModel load_model(const std::filesystem::path& path);

/// True model plus the latent basis coefficients of the subjects it generated.
struct OracleRecord
{
    SimulationScenario scenario;
    OracleModel oracle;
    Matrix train_coefficients;
    Matrix test_coefficients;
};

void write_oracle(std::ostream& os, const OracleRecord& record);
OracleRecord read_oracle(std::istream& is);
void save_oracle(const OracleRecord& record, const std::filesystem::path& path);
OracleRecord load_oracle(const std::filesystem::path& path);

} // namespace funreg
