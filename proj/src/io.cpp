#include "nib/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace nib {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return {buf, end};
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("malformed number '" + std::string(s) + "'");
  return v;
}

std::vector<double> split_numbers(const std::string& line, char sep) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(sep, start);
    if (end == std::string::npos) end = line.size();
    std::string_view field(line.data() + start, end - start);
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.remove_suffix(1);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    if (!field.empty()) out.push_back(parse_double(field));
    start = end + 1;
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_rows(std::ostream& out, const Matrix& m, char sep) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out << sep;
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace

void write_matrix_csv(const Matrix& m, const fs::path& path) {
  auto out = open_out(path);
  write_rows(out, m, ',');
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_numbers(line, ','));
  }
  const std::size_t n = rows.size();
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw std::runtime_error("'" + path.string() + "' is not a square matrix");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

fs::path export_connection_heatmap(const Network& net, const fs::path& path) {
  write_matrix_csv(net.connections, path);
  fs::path mask = path;
  mask.replace_filename(path.stem().string() + "_plasticity.csv");
  write_matrix_csv(net.plasticity, mask);
  return mask;
}

void save_network(const Network& net, const fs::path& path) {
  auto out = open_out(path);
  const std::size_t n = net.size();
  out << "nib-network " << kSnapshotVersion << '\n';
  out << "neurons " << n << '\n';
  out << "threshold " << format_double(net.firing_threshold()) << '\n';
  out << "c_max " << format_double(net.c_max()) << '\n';
  out << "noise_rate " << format_double(net.noise_rate()) << '\n';
  out << "input_shape " << net.input_width << ' ' << net.input_height << '\n';
  out << "roles";
  for (auto r : net.roles()) out << ' ' << to_string(r);
  out << "\npositions\n";
  for (const auto& p : net.positions)
    out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
  out << "connections\n";
  write_rows(out, net.connections, ' ');
  out << "plasticity\n";
  write_rows(out, net.plasticity, ' ');
  out << "change\n";
  write_rows(out, net.change, ' ');
  out << "edges\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (net.edges(i, j) ? '1' : '0');
    out << '\n';
  }
  out << "end\n";
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Network load_network(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("'" + path.string() + "': " + what);
  };
  auto expect_key = [&](std::istringstream& ls, const std::string& key) {
    std::string k;
    ls >> k;
    if (k != key) throw fail("expected '" + key + "'");
  };
  auto next_line = [&]() {
    std::string line;
    if (!std::getline(in, line)) throw fail("unexpected end of file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  std::string tag;
  int version = 0;
  {
    std::istringstream ls(next_line());
    ls >> tag >> version;
    if (tag != "nib-network") throw fail("not a network snapshot");
    if (version != kSnapshotVersion) throw fail("unsupported snapshot version " + std::to_string(version));
  }
  std::size_t n = 0;
  std::string field;
  auto scalar = [&](const std::string& key) {
    std::istringstream ls(next_line());
    expect_key(ls, key);
    ls >> field;
    return parse_double(field);
  };
  {
    std::istringstream ls(next_line());
    expect_key(ls, "neurons");
    ls >> n;
    if (n == 0) throw fail("empty network");
  }
  const double threshold = scalar("threshold");
  const double c_max = scalar("c_max");
  const double noise = scalar("noise_rate");
  std::size_t w = 0, h = 0;
  {
    std::istringstream ls(next_line());
    expect_key(ls, "input_shape");
    ls >> w >> h;
  }
  std::vector<NeuronRole> roles;
  {
    std::istringstream ls(next_line());
    expect_key(ls, "roles");
    while (ls >> field) roles.push_back(parse_neuron_role(field));
    if (roles.size() != n) throw fail("role count mismatch");
  }

  Network net(std::move(roles), threshold, c_max, noise, 0);
  net.input_width = w;
  net.input_height = h;

  if (next_line() != "positions") throw fail("expected 'positions'");
  for (std::size_t i = 0; i < n; ++i) {
    auto v = split_numbers(next_line(), ' ');
    if (v.size() != 3) throw fail("bad position row");
    net.positions[i] = {v[0], v[1], v[2]};
  }
  auto read_matrix = [&](const std::string& key, Matrix& m) {
    if (next_line() != key) throw fail("expected '" + key + "'");
    for (std::size_t i = 0; i < n; ++i) {
      auto v = split_numbers(next_line(), ' ');
      if (v.size() != n) throw fail("bad row in " + key);
      std::copy(v.begin(), v.end(), m.row(i).begin());
    }
  };
  read_matrix("connections", net.connections);
  read_matrix("plasticity", net.plasticity);
  read_matrix("change", net.change);
  if (next_line() != "edges") throw fail("expected 'edges'");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string line = next_line();
    if (line.size() != n) throw fail("bad edge row");
    for (std::size_t j = 0; j < n; ++j) net.edges(i, j) = line[j] == '1' ? 1 : 0;
  }
  if (next_line() != "end") throw fail("missing 'end'");
  return net;
}

}  // namespace nib
