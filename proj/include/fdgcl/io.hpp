#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fdgcl/graph.hpp"

namespace fdgcl::io {

struct EdgeList {
  std::vector<Edge> edges;
  Index max_id = -1;  // -1 when the file has no edges
  Index declared_nodes = 0;
};

/// `u<TAB>v` per line, 0-indexed; blank and `#` lines skipped.
EdgeList read_edge_list(const std::filesystem::path& path);
/// CSV of reals; every row must have the same width. An all-text first line
/// is skipped as a header.
Matrix read_matrix_csv(const std::filesystem::path& path);
std::vector<int> read_labels(const std::filesystem::path& path);
/// JSON object with integer arrays `train`, `val`, `test`.
Split read_split(const std::filesystem::path& path);

/// Loads and validates the four dataset files. The node count is the
/// feature row count; edges referring to other ids raise FormatError.
Dataset load_dataset(const std::filesystem::path& graph_path,
                     const std::filesystem::path& features_path,
                     const std::filesystem::path& labels_path,
                     const std::filesystem::path& split_path,
                     const GraphOptions& options = {});

/// Graph-only loader: node count is one past the largest id, or the
/// `# nodes N` header when that is larger.
Graph load_graph(const std::filesystem::path& graph_path, const GraphOptions& options = {});

void write_edge_list(const std::filesystem::path& path, const Graph& graph);
/// Writes reals with 17 significant digits. A non-empty header is emitted as
/// the first line.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header = {});
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);
void write_split(const std::filesystem::path& path, const Split& split);

/// Writes `content` to a temporary sibling then renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace fdgcl::io
