#pragma once

#include <filesystem>
#include <string>

#include "nib/matrix.hpp"
#include "nib/network.hpp"

namespace nib {

// Dense CSV grid, row = presynaptic, column = postsynaptic. Values are written
// in shortest round-trip form, so reading back is bit-exact.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

// Writes C to `path` and the plasticity matrix next to it as
// <stem>_plasticity.csv (0 marks a fixed connection). Returns the second path.
std::filesystem::path export_connection_heatmap(const Network& net, const std::filesystem::path& path);

// Versioned text snapshot of a network (roles, positions, C, P, A, topology).
inline constexpr int kSnapshotVersion = 1;
void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace nib
