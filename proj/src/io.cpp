#include "mm/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace mm {

namespace {

std::vector<double> parse_numeric_row(const std::string& line, bool* ok) {
  std::vector<double> row;
  std::string cell;
  std::stringstream ss(line);
  *ok = true;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(cell, &pos);
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) { *ok = false; return {}; }
      row.push_back(v);
    } catch (const std::exception&) {
      *ok = false;
      return {};
    }
  }
  return row;
}

std::ifstream open_or_throw(const std::string& path,
                            std::ios_base::openmode mode = std::ios_base::in) {
  std::ifstream f(path, mode);
  if (!f) throw std::invalid_argument("cannot open file: " + path);
  return f;
}

// next token in a PGM header, skipping whitespace and # comments
std::string pgm_token(std::istream& is) {
  std::string tok;
  int c;
  while ((c = is.get()) != EOF) {
    if (c == '#') {
      while ((c = is.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw std::invalid_argument("truncated PGM header");
  return tok;
}

MatrixXd read_pgm_matrix(const std::string& path) {
  auto f = open_or_throw(path, std::ios_base::in | std::ios_base::binary);
  if (pgm_token(f) != "P5")
    throw std::invalid_argument(path + ": not a binary (P5) PGM");
  const int width = std::stoi(pgm_token(f));
  const int height = std::stoi(pgm_token(f));
  const int maxval = std::stoi(pgm_token(f));
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
    throw std::invalid_argument(path + ": unsupported PGM geometry or maxval");
  std::vector<unsigned char> buf(static_cast<std::size_t>(width) * height);
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(f.gcount()) != buf.size())
    throw std::invalid_argument(path + ": truncated PGM payload");
  MatrixXd values(height, width);
  for (int i = 0; i < height; ++i)
    for (int j = 0; j < width; ++j)
      values(i, j) = buf[static_cast<std::size_t>(i) * width + j];
  return values;
}

}  // namespace

MatrixXd read_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    bool ok = false;
    auto row = parse_numeric_row(line, &ok);
    if (!ok) {
      if (first) { first = false; continue; }  // header line
      throw std::invalid_argument("non-numeric CSV cell: " + line);
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("ragged CSV row: " + line);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("empty CSV");
  MatrixXd out(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) out(i, j) = rows[i][j];
  return out;
}

MatrixXd read_matrix_csv_file(const std::string& path) {
  auto f = open_or_throw(path);
  return read_matrix_csv(f);
}

LabeledDataset read_labeled_csv_file(const std::string& path, bool standardize) {
  MatrixXd raw = read_matrix_csv_file(path);
  if (raw.cols() < 2)
    throw std::invalid_argument(path + ": need at least one feature column plus a label");
  LabeledDataset data;
  data.features = raw.leftCols(raw.cols() - 1);
  data.labels.resize(raw.rows());
  for (int i = 0; i < raw.rows(); ++i) {
    const double lab = raw(i, raw.cols() - 1);
    if (lab != std::floor(lab))
      throw std::invalid_argument(path + ": non-integer label");
    data.labels[i] = static_cast<int>(lab);
  }
  if (standardize) {
    for (int j = 0; j < data.features.cols(); ++j) {
      auto col = data.features.col(j);
      const double mean = col.mean();
      col.array() -= mean;
      const double sd = std::sqrt(col.squaredNorm() / std::max<int>(1, col.size() - 1));
      if (sd > 0.0) col /= sd;
    }
  }
  return data;
}

Graph read_edge_list_file(const std::string& path, int node_count) {
  auto f = open_or_throw(path);
  std::vector<std::pair<int, int>> edges;
  int max_node = -1;
  std::string line;
  while (std::getline(f, line)) {
    std::stringstream ss(line);
    int a, b;
    if (!(ss >> a)) continue;  // blank line
    if (!(ss >> b)) throw std::invalid_argument(path + ": malformed edge line: " + line);
    std::string trailing;
    if (ss >> trailing) throw std::invalid_argument(path + ": malformed edge line: " + line);
    edges.emplace_back(a, b);
    max_node = std::max({max_node, a, b});
  }
  if (node_count < 0) node_count = max_node + 1;
  return Graph::from_edges(node_count, std::move(edges));
}

void write_propensity_csv(std::ostream& os, const Graph& graph,
                          const VectorXd& p) {
  if (p.size() != graph.node_count)
    throw std::invalid_argument("write_propensity_csv: dimension mismatch");
  os << "node,degree,p_hat\n";
  char buf[64];
  for (int i = 0; i < graph.node_count; ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g", p[i]);
    os << i << ',' << graph.degrees[i] << ',' << buf << '\n';
  }
}

ImageGrid read_pgm(const std::string& path) {
  ImageGrid img{read_pgm_matrix(path)};
  img.validate();
  return img;
}

void write_pgm(const std::string& path, const ImageGrid& image) {
  image.validate();
  std::ofstream f(path, std::ios_base::out | std::ios_base::binary);
  if (!f) throw std::invalid_argument("cannot open file for writing: " + path);
  f << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<unsigned char> buf(static_cast<std::size_t>(image.width()) *
                                 image.height());
  for (int i = 0; i < image.height(); ++i)
    for (int j = 0; j < image.width(); ++j) {
      double v = std::floor(image.values(i, j) + 0.5);  // round half-up
      v = std::min(255.0, std::max(0.0, v));
      buf[static_cast<std::size_t>(i) * image.width() + j] =
          static_cast<unsigned char>(v);
    }
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!f) throw std::runtime_error("failed writing " + path);
}

PixelMask read_mask_pgm(const std::string& path) {
  const MatrixXd values = read_pgm_matrix(path);
  PixelMask mask;
  mask.accept = values.array() != 0.0;
  return mask;
}

}  // namespace mm
