#pragma once

#include "mm/discriminant.hpp"
#include "mm/imaging.hpp"
#include "mm/random_graph.hpp"

#include <iosfwd>
#include <string>

namespace mm {

// Numeric CSV, one observation per row; a non-numeric first line is treated
// as a header and skipped.
MatrixXd read_matrix_csv(std::istream& is);
MatrixXd read_matrix_csv_file(const std::string& path);

// Last column = integer label, the rest numeric features. standardize
// z-scores each feature column (constant columns are left centered).
LabeledDataset read_labeled_csv_file(const std::string& path, bool standardize);

// One "i j" pair per line, 0-based, whitespace separated; node_count -1
// means infer as max index + 1.
Graph read_edge_list_file(const std::string& path, int node_count = -1);

void write_propensity_csv(std::ostream& os, const Graph& graph,
                          const VectorXd& p);

// Binary PGM, P5, maxval 255. Writing clamps to [0,255] and rounds half-up;
// an image read and written unmodified round-trips bit-exactly.
ImageGrid read_pgm(const std::string& path);
void write_pgm(const std::string& path, const ImageGrid& image);

// 0 = excluded, anything else = accepted.
PixelMask read_mask_pgm(const std::string& path);

}  // namespace mm
