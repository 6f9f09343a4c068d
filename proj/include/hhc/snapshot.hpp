#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "hhc/grid.hpp"

namespace hhc {

// Field snapshot file, one value per line in row-major order:
//   HHC-FIELD v1 <scalar|flux> <alpha|-> <N1> <N2> <l1> <l2>
// Values are written with 17 significant digits so doubles round-trip.
void write_snapshot(std::ostream& os, const ScalarField& f);
void write_snapshot(std::ostream& os, const FluxField& f);
void write_snapshot_file(const std::string& path, const ScalarField& f);
void write_snapshot_file(const std::string& path, const FluxField& f);

using SnapshotField = std::variant<ScalarField, FluxField>;

SnapshotField read_snapshot(std::istream& is);
SnapshotField read_snapshot_file(const std::string& path);

}  // namespace hhc
