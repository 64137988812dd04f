#include "ensflow/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <cctype>
#include <sstream>

namespace ensflow {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

Edge ordered(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

}  // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
           std::vector<BoundaryEdge> boundary_edges)
    : nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)) {
  const int n_nodes = static_cast<int>(nodes_.size());
  if (triangles_.empty()) throw MeshError("mesh has no triangles");

  std::vector<char> referenced(nodes_.size(), 0);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= n_nodes)
        throw MeshError("triangle " + std::to_string(t) + " references node " +
                        std::to_string(v) + " out of range");
      referenced[v] = 1;
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
    const double area = signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
    if (area == 0.0 || !std::isfinite(area))
      throw MeshError("triangle " + std::to_string(t) + " has zero area");
    if (area < 0.0) std::swap(tri[1], tri[2]);
  }
  for (int v = 0; v < n_nodes; ++v)
    if (!referenced[v]) throw MeshError("node " + std::to_string(v) + " is not used by any triangle");

  // Edge enumeration: collect (edge, triangle, local edge) and sort.
  struct Incidence {
    Edge edge;
    int triangle;
    int local;
  };
  std::vector<Incidence> incidences;
  incidences.reserve(3 * triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k)
      incidences.push_back({ordered(tri[k], tri[(k + 1) % 3]), static_cast<int>(t), k});
  }
  std::sort(incidences.begin(), incidences.end(), [](const Incidence& a, const Incidence& b) {
    return a.edge != b.edge ? a.edge < b.edge : a.triangle < b.triangle;
  });

  triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
  std::vector<int> edge_multiplicity;
  for (std::size_t i = 0; i < incidences.size();) {
    std::size_t j = i;
    while (j < incidences.size() && incidences[j].edge == incidences[i].edge) ++j;
    const int e = static_cast<int>(edges_.size());
    edges_.push_back(incidences[i].edge);
    edge_multiplicity.push_back(static_cast<int>(j - i));
    if (j - i > 2)
      throw MeshError("edge (" + std::to_string(incidences[i].edge[0]) + "," +
                      std::to_string(incidences[i].edge[1]) + ") is shared by more than two triangles");
    for (std::size_t k = i; k < j; ++k) triangle_edges_[incidences[k].triangle][incidences[k].local] = e;
    i = j;
  }

  edge_tags_.assign(edges_.size(), 0);
  for (const auto& be : boundary_edges_) {
    const Edge key = ordered(be.nodes[0], be.nodes[1]);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key)
      throw MeshError("boundary edge (" + std::to_string(key[0]) + "," + std::to_string(key[1]) +
                      ") is not an edge of any triangle");
    const auto e = static_cast<std::size_t>(it - edges_.begin());
    if (edge_multiplicity[e] != 1)
      throw MeshError("boundary edge (" + std::to_string(key[0]) + "," + std::to_string(key[1]) +
                      ") is shared by two triangles");
    if (be.tag <= 0) throw MeshError("boundary tags must be positive");
    if (edge_tags_[e] != 0)
      throw MeshError("boundary edge (" + std::to_string(key[0]) + "," + std::to_string(key[1]) +
                      ") listed twice");
    edge_tags_[e] = be.tag;
  }
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edge_multiplicity[e] == 1 && edge_tags_[e] == 0)
      throw MeshError("edge (" + std::to_string(edges_[e][0]) + "," + std::to_string(edges_[e][1]) +
                      ") lies on the boundary but carries no boundary tag");

  for (const auto& tri : triangles_)
    for (int k = 0; k < 3; ++k)
      h_max_ = std::max(h_max_, distance(nodes_[tri[k]], nodes_[tri[(k + 1) % 3]]));
}

double Mesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles_.at(t);
  return signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
}

double Mesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) sum += triangle_area(t);
  return sum;
}

long Mesh::euler_characteristic() const {
  return static_cast<long>(nodes_.size()) - static_cast<long>(edges_.size()) +
         static_cast<long>(triangles_.size());
}

Mesh build_unit_square_mesh(int m) {
  if (m < 1) throw MeshError("unit square mesh needs m >= 1");
  const int stride = m + 1;
  std::vector<Point> nodes;
  nodes.reserve(static_cast<std::size_t>(stride) * stride);
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i)
      nodes.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m});

  auto id = [stride](int i, int j) { return j * stride + i; };
  std::vector<Triangle> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      triangles.push_back({a, b, c});
      triangles.push_back({a, c, d});
    }
  }

  std::vector<BoundaryEdge> boundary;
  boundary.reserve(4 * static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    boundary.push_back({{id(i, 0), id(i + 1, 0)}, kOuterBoundary});
    boundary.push_back({{id(m, i), id(m, i + 1)}, kOuterBoundary});
    boundary.push_back({{id(i + 1, m), id(i, m)}, kOuterBoundary});
    boundary.push_back({{id(0, i + 1), id(0, i)}, kOuterBoundary});
  }
  return Mesh(std::move(nodes), std::move(triangles), std::move(boundary));
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next non-empty, non-comment line split into tokens; false at end of input.
  bool next(std::vector<std::string_view>& tokens) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_;
      tokens.clear();
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
      }
      if (tokens.empty() || tokens.front().front() == '#') continue;
      return true;
    }
    return false;
  }

  int line() const { return line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

template <typename T>
T parse_number(std::string_view token, int line) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw MeshError("cannot parse '" + std::string(token) + "' as a number", line);
  return value;
}

std::size_t parse_header(LineReader& reader, std::vector<std::string_view>& tokens,
                         std::string_view keyword) {
  if (!reader.next(tokens))
    throw MeshError("unexpected end of file, expected '" + std::string(keyword) + "'", reader.line() + 1);
  if (tokens.size() != 2 || tokens[0] != keyword)
    throw MeshError("expected '" + std::string(keyword) + " <count>'", reader.line());
  const long count = parse_number<long>(tokens[1], reader.line());
  if (count < 0) throw MeshError("negative count", reader.line());
  return static_cast<std::size_t>(count);
}

void expect_row(LineReader& reader, std::vector<std::string_view>& tokens, std::size_t width,
                std::string_view what) {
  if (!reader.next(tokens))
    throw MeshError("unexpected end of file while reading " + std::string(what), reader.line() + 1);
  if (tokens.size() != width)
    throw MeshError("expected " + std::to_string(width) + " values for " + std::string(what) +
                        ", found " + std::to_string(tokens.size()),
                    reader.line());
}

}  // namespace

Mesh load_mesh(std::string_view text) {
  LineReader reader(text);
  std::vector<std::string_view> tokens;

  const std::size_t n_nodes = parse_header(reader, tokens, "nodes");
  std::vector<Point> nodes(n_nodes);
  for (auto& p : nodes) {
    expect_row(reader, tokens, 2, "a node");
    p = {parse_number<double>(tokens[0], reader.line()), parse_number<double>(tokens[1], reader.line())};
  }

  const std::size_t n_tri = parse_header(reader, tokens, "triangles");
  std::vector<Triangle> triangles(n_tri);
  for (auto& tri : triangles) {
    expect_row(reader, tokens, 3, "a triangle");
    for (int k = 0; k < 3; ++k) {
      tri[k] = parse_number<int>(tokens[k], reader.line());
      if (tri[k] < 0 || static_cast<std::size_t>(tri[k]) >= n_nodes)
        throw MeshError("node index " + std::to_string(tri[k]) + " out of range", reader.line());
    }
  }

  const std::size_t n_bnd = parse_header(reader, tokens, "boundary_edges");
  std::vector<BoundaryEdge> boundary(n_bnd);
  for (auto& be : boundary) {
    expect_row(reader, tokens, 3, "a boundary edge");
    be.nodes = {parse_number<int>(tokens[0], reader.line()), parse_number<int>(tokens[1], reader.line())};
    be.tag = parse_number<int>(tokens[2], reader.line());
    for (int v : be.nodes)
      if (v < 0 || static_cast<std::size_t>(v) >= n_nodes)
        throw MeshError("node index " + std::to_string(v) + " out of range", reader.line());
  }

  if (reader.next(tokens)) throw MeshError("trailing content after boundary edges", reader.line());
  return Mesh(std::move(nodes), std::move(triangles), std::move(boundary));
}

Mesh read_mesh_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_mesh(buffer.str());
}

namespace {

void append_double(std::string& out, double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

}  // namespace

std::string serialize(const Mesh& mesh) {
  std::string out;
  out += "nodes " + std::to_string(mesh.num_nodes()) + "\n";
  for (const auto& p : mesh.nodes()) {
    append_double(out, p.x);
    out += ' ';
    append_double(out, p.y);
    out += '\n';
  }
  out += "triangles " + std::to_string(mesh.num_triangles()) + "\n";
  for (const auto& t : mesh.triangles())
    out += std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
  out += "boundary_edges " + std::to_string(mesh.boundary_edges().size()) + "\n";
  for (const auto& be : mesh.boundary_edges())
    out += std::to_string(be.nodes[0]) + ' ' + std::to_string(be.nodes[1]) + ' ' +
           std::to_string(be.tag) + '\n';
  return out;
}

}  // namespace ensflow
