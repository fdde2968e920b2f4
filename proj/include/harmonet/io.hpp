#pragma once

#include "harmonet/energy.hpp"
#include "harmonet/solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace harmonet {

// Shortest-round-trip decimal formatting so equal doubles serialize equally.
std::string format_double(double v);

// Net table: id, coords..., weight, interior_flag (CSV) plus a JSON sidecar
// {r, seed, space_hash, vertex_count}.
void write_net(const std::filesystem::path& base, const Net& net);

// Unordered edge list with i < j (CSV) plus sidecar {max_degree, edge_count}.
void write_graph(const std::filesystem::path& base, const Graph& g);

// Field table: id, value. `sidecar` is merged into the JSON sidecar.
void write_field(const std::filesystem::path& base, const DiscreteField& u,
                 const std::string& sidecar_json = "{}");

// Coordinate-text export of A, flat text of b, sidecar {c0, interior_count, r}.
void write_form(const std::filesystem::path& base, const QuadraticForm& form);

void write_text(const std::filesystem::path& path, const std::string& content);

// Probe tables: one row per probe, comma-separated coordinates.
std::vector<Point> read_probes(const std::filesystem::path& path, int dim);
void write_probe_values(const std::filesystem::path& path, const std::vector<Point>& probes,
                        const std::vector<double>& values);

}  // namespace harmonet
