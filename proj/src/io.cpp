#include "fdgcl/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fdgcl/errors.hpp"

namespace fdgcl::io {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("file not found: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

[[noreturn]] void format_error(const std::filesystem::path& path, std::size_t line,
                               const std::string& what) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << what;
  throw FormatError(os.str());
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    if (s.front() == '+') s.remove_prefix(1);
  }
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

EdgeList read_edge_list(const std::filesystem::path& path) {
  auto in = open_input(path);
  EdgeList out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      // Optional node-count hint written by write_edge_list: "# nodes N".
      Index n = 0;
      if (body.starts_with("# nodes ") && parse_number(body.substr(8), n)) out.declared_nodes = n;
      continue;
    }
    const auto tab = body.find('\t');
    if (tab == std::string_view::npos) format_error(path, lineno, "expected `u<TAB>v`");
    Index u = 0;
    Index v = 0;
    if (!parse_number(body.substr(0, tab), u) || !parse_number(body.substr(tab + 1), v)) {
      format_error(path, lineno, "node ids must be integers");
    }
    if (u < 0 || v < 0) format_error(path, lineno, "node ids must be non-negative");
    out.edges.emplace_back(u, v);
    out.max_id = std::max({out.max_id, u, v});
  }
  return out;
}

namespace {

// A first line whose fields are all non-numeric names the columns.
bool is_header(std::string_view body) {
  std::size_t start = 0;
  while (true) {
    const auto comma = body.find(',', start);
    const auto field =
        body.substr(start, comma == std::string_view::npos ? body.size() - start : comma - start);
    double v = 0.0;
    if (parse_number(field, v)) return false;
    if (comma == std::string_view::npos) return true;
    start = comma + 1;
  }
}

}  // namespace

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (rows == 0 && cols < 0 && is_header(body)) continue;
    Index count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const auto field = body.substr(start, comma == std::string_view::npos ? body.size() - start
                                                                             : comma - start);
      double v = 0.0;
      if (!parse_number(field, v)) {
        format_error(path, lineno, "cannot parse `" + std::string(field) + "` as a real");
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cols < 0) {
      cols = count;
    } else if (count != cols) {
      std::ostringstream os;
      os << "expected " << cols << " columns, found " << count;
      format_error(path, lineno, os.str());
    }
    ++rows;
  }
  if (cols < 0) cols = 0;
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return m;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    int v = 0;
    if (!parse_number(body, v) || v < 0) {
      format_error(path, lineno, "label must be a non-negative integer");
    }
    labels.push_back(v);
  }
  return labels;
}

Split read_split(const std::filesystem::path& path) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  Split split;
  auto read_part = [&](const char* key, std::vector<Index>& dst) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_array()) {
      throw FormatError(path.string() + ": missing array `" + key + "`");
    }
    for (const auto& e : j[key]) {
      if (!e.is_number_integer()) {
        throw FormatError(path.string() + ": non-integer entry in `" + key + "`");
      }
      dst.push_back(e.get<Index>());
    }
  };
  read_part("train", split.train);
  read_part("val", split.val);
  read_part("test", split.test);
  return split;
}

Dataset load_dataset(const std::filesystem::path& graph_path,
                     const std::filesystem::path& features_path,
                     const std::filesystem::path& labels_path,
                     const std::filesystem::path& split_path, const GraphOptions& options) {
  Dataset ds;
  ds.features = read_matrix_csv(features_path);
  const auto edges = read_edge_list(graph_path);
  ds.graph = build_graph(edges.edges, ds.features.rows(), options);
  ds.labels = read_labels(labels_path);
  ds.split = read_split(split_path);
  ds.validate();
  return ds;
}

Graph load_graph(const std::filesystem::path& graph_path, const GraphOptions& options) {
  const auto edges = read_edge_list(graph_path);
  return build_graph(edges.edges, std::max(edges.max_id + 1, edges.declared_nodes), options);
}

void write_edge_list(const std::filesystem::path& path, const Graph& graph) {
  auto out = open_output(path);
  out << "# nodes " << graph.num_nodes() << '\n';
  for (const auto& [u, v] : graph.edges()) out << u << '\t' << v << '\n';
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  auto out = open_output(path);
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
  }
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  auto out = open_output(path);
  for (int y : labels) out << y << '\n';
}

void write_split(const std::filesystem::path& path, const Split& split) {
  nlohmann::json j;
  j["train"] = split.train;
  j["val"] = split.val;
  j["test"] = split.test;
  auto out = open_output(path);
  out << j.dump() << '\n';
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    auto out = open_output(tmp);
    out << content;
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fdgcl::io
