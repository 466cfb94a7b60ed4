#pragma once

// Feed-forward network representation, exact forward evaluation, and
// plain-text weight-file ingestion.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyreach {

enum class Activation { relu, sigmoid, tanh, linear };

const char* activation_name(Activation a);
double activation_apply(Activation a, double y);

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
  const double* row(std::size_t r) const { return a.data() + r * cols; }
};

struct Layer {
  Matrix W;
  std::vector<double> b;
  Activation act = Activation::linear;
};

struct Network {
  std::size_t input_dim = 0;
  std::vector<Layer> layers;

  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().W.rows; }
  std::size_t max_width() const;
  void validate() const;  // throws on dimension-chain or finiteness violations
};

std::vector<double> nn_eval(const Network& net, std::span<const double> x);

struct NetworkParseError : std::runtime_error {
  int line;
  NetworkParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Weight file: one token per line, '#' starts a comment.
//   input_dim, output_dim, H, H hidden widths, H+1 activation names
//   (the final activation may be omitted; it then defaults to linear),
//   then layer by layer, neuron by neuron: incoming weights, then the bias.
Network parse_network(std::string_view text);
std::string serialize_network(const Network& net);

Network load_network_file(const std::string& path);

}  // namespace polyreach
