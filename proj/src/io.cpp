#include "harmonet/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace harmonet {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open for writing: " + path.string());
  out << content;
}

void write_net(const std::filesystem::path& base, const Net& net) {
  std::ostringstream csv;
  csv << "id";
  const int d = net.vertices.empty() ? 0 : static_cast<int>(net.vertices[0].size());
  for (int a = 0; a < d; ++a) csv << ",x" << a;
  csv << ",weight,interior\n";
  for (int i = 0; i < net.size(); ++i) {
    csv << i;
    for (int a = 0; a < d; ++a) csv << ',' << format_double(net.vertices[i][a]);
    csv << ',' << (net.weights.size() == net.size() ? format_double(net.weights[i]) : "nan");
    csv << ',' << (i < static_cast<int>(net.interior.size()) && net.interior[i] ? 1 : 0);
    csv << '\n';
  }
  write_text(std::filesystem::path(base).concat(".csv"), csv.str());

  nlohmann::ordered_json side;
  side["r"] = net.r;
  side["seed"] = net.seed;
  side["space_hash"] = net.space_hash;
  side["vertex_count"] = net.size();
  write_text(std::filesystem::path(base).concat(".json"), side.dump(2) + "\n");
}

void write_graph(const std::filesystem::path& base, const Graph& g) {
  std::ostringstream csv;
  csv << "i,j\n";
  for (int i = 0; i < g.size(); ++i)
    for (int j : g.adjacency[i])
      if (i < j) csv << i << ',' << j << '\n';
  write_text(std::filesystem::path(base).concat(".csv"), csv.str());

  nlohmann::ordered_json side;
  side["max_degree"] = g.max_degree;
  side["edge_count"] = g.edge_count;
  write_text(std::filesystem::path(base).concat(".json"), side.dump(2) + "\n");
}

void write_field(const std::filesystem::path& base, const DiscreteField& u,
                 const std::string& sidecar_json) {
  std::ostringstream csv;
  csv << "id,value\n";
  for (Eigen::Index i = 0; i < u.values.size(); ++i)
    csv << i << ',' << format_double(u.values[i]) << '\n';
  write_text(std::filesystem::path(base).concat(".csv"), csv.str());
  write_text(std::filesystem::path(base).concat(".json"), sidecar_json + "\n");
}

void write_form(const std::filesystem::path& base, const QuadraticForm& form) {
  std::ostringstream mtx;
  mtx << "%%coordinate symmetric-stored-full\n";
  mtx << form.A.rows() << ' ' << form.A.cols() << ' ' << form.A.nonZeros() << '\n';
  for (int k = 0; k < form.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.A, k); it; ++it)
      mtx << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_double(it.value()) << '\n';
  write_text(std::filesystem::path(base).concat("_A.mtx"), mtx.str());

  std::ostringstream bt;
  for (Eigen::Index i = 0; i < form.b.size(); ++i) bt << format_double(form.b[i]) << '\n';
  write_text(std::filesystem::path(base).concat("_b.txt"), bt.str());

  nlohmann::ordered_json side;
  side["c0"] = form.c0;
  side["interior_count"] = form.unknowns();
  side["r"] = form.r;
  write_text(std::filesystem::path(base).concat(".json"), side.dump(2) + "\n");
}

std::vector<Point> read_probes(const std::filesystem::path& path, int dim) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open probes file: " + path.string());
  std::vector<Point> probes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    // skip a header row of non-numeric labels
    if (lineno == 1 && line.find_first_not_of("0123456789+-.,eE \t\r") != std::string::npos)
      continue;
    std::stringstream ss(line);
    std::string item;
    Point p(dim);
    int a = 0;
    while (std::getline(ss, item, ',')) {
      if (a >= dim) break;
      try {
        p[a++] = std::stod(item);
      } catch (const std::exception&) {
        throw UsageError("probes file line " + std::to_string(lineno) + ": bad number '" + item +
                         "'");
      }
    }
    if (a != dim)
      throw UsageError("probes file line " + std::to_string(lineno) + ": expected " +
                       std::to_string(dim) + " coordinates");
    probes.push_back(std::move(p));
  }
  return probes;
}

void write_probe_values(const std::filesystem::path& path, const std::vector<Point>& probes,
                        const std::vector<double>& values) {
  std::ostringstream csv;
  const int d = probes.empty() ? 0 : static_cast<int>(probes[0].size());
  for (int a = 0; a < d; ++a) csv << 'x' << a << ',';
  csv << "value\n";
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (int a = 0; a < d; ++a) csv << format_double(probes[i][a]) << ',';
    csv << format_double(values[i]) << '\n';
  }
  write_text(path, csv.str());
}

}  // namespace harmonet
