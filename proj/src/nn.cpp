#include "polyreach/nn.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "polyreach/kernels.hpp"

namespace polyreach {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "?";
}

double activation_apply(Activation a, double y) {
  switch (a) {
    case Activation::relu: return y > 0.0 ? y : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-y));
    case Activation::tanh: return std::tanh(y);
    case Activation::linear: return y;
  }
  return y;
}

std::size_t Network::max_width() const {
  std::size_t w = input_dim;
  for (const auto& l : layers) w = std::max(w, l.W.rows);
  return w;
}

void Network::validate() const {
  if (layers.empty()) throw std::invalid_argument("Network: needs at least one layer");
  std::size_t prev = input_dim;
  for (std::size_t s = 0; s < layers.size(); ++s) {
    const Layer& l = layers[s];
    if (l.W.cols != prev)
      throw std::invalid_argument("Network: layer " + std::to_string(s + 1) +
                                  " expects width " + std::to_string(l.W.cols) +
                                  ", previous layer has " + std::to_string(prev));
    if (l.b.size() != l.W.rows)
      throw std::invalid_argument("Network: layer " + std::to_string(s + 1) + " bias length mismatch");
    for (double v : l.W.a)
      if (!std::isfinite(v)) throw std::invalid_argument("Network: non-finite weight");
    for (double v : l.b)
      if (!std::isfinite(v)) throw std::invalid_argument("Network: non-finite bias");
    prev = l.W.rows;
  }
}

std::vector<double> nn_eval(const Network& net, std::span<const double> x) {
  if (x.size() != net.input_dim) throw std::invalid_argument("nn_eval: dimension mismatch");
  std::vector<double> out(net.output_dim());
  kernels::batch_forward(net, x.data(), 1, out.data(), kernels::Backend::scalar);
  for (double v : out)
    if (!std::isfinite(v)) throw std::runtime_error("nn_eval: non-finite output");
  return out;
}

namespace {

struct Tokenizer {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;        // current scan position
  int token_line = 1;  // line of the most recently returned token

  std::optional<std::string_view> next() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (c == '\n') {
        ++line;
        ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '#')
          ++pos;
        token_line = line;
        return text.substr(start, pos - start);
      }
    }
    token_line = line;
    return std::nullopt;
  }
};

bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view tok, long& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::optional<Activation> activation_from_name(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  if (s == "linear") return Activation::linear;
  return std::nullopt;
}

}  // namespace

Network parse_network(std::string_view text) {
  Tokenizer tk{text};

  auto need = [&](const char* what) -> std::string_view {
    auto t = tk.next();
    if (!t) throw NetworkParseError(tk.token_line, std::string("unexpected end of file, expected ") + what);
    return *t;
  };
  auto need_count = [&](const char* what) -> long {
    auto t = need(what);
    long v = 0;
    if (!parse_int(t, v) || v < 1)
      throw NetworkParseError(tk.token_line,
                              std::string("malformed ") + what + ": '" + std::string(t) + "'");
    return v;
  };

  long input_dim = need_count("input_dim");
  long output_dim = need_count("output_dim");

  auto htok = need("hidden layer count");
  long hidden = 0;
  if (!parse_int(htok, hidden) || hidden < 0)
    throw NetworkParseError(tk.token_line,
                            "malformed hidden layer count: '" + std::string(htok) + "'");

  std::vector<long> widths;
  for (long i = 0; i < hidden; ++i) widths.push_back(need_count("hidden width"));
  widths.push_back(output_dim);

  // H+1 activation names; a numeric token in the last slot means the file
  // omitted the output activation, which defaults to linear.
  std::vector<Activation> acts;
  std::optional<std::string_view> pushed_back;
  for (long i = 0; i < hidden + 1; ++i) {
    auto t = need("activation name");
    auto a = activation_from_name(t);
    if (!a) {
      double dummy;
      if (i == hidden && parse_double(t, dummy)) {
        acts.push_back(Activation::linear);
        pushed_back = t;
        break;
      }
      throw NetworkParseError(tk.token_line, "unknown activation name: '" + std::string(t) + "'");
    }
    acts.push_back(*a);
  }

  Network net;
  net.input_dim = static_cast<std::size_t>(input_dim);

  std::size_t expected = 0, got = 0;
  {
    long prev = input_dim;
    for (std::size_t s = 0; s < widths.size(); ++s) {
      expected += static_cast<std::size_t>(widths[s]) * static_cast<std::size_t>(prev + 1);
      prev = widths[s];
    }
  }

  auto next_param = [&](double& v) -> bool {
    if (pushed_back) {
      std::string_view t = *pushed_back;
      pushed_back.reset();
      if (!parse_double(t, v)) throw NetworkParseError(tk.token_line, "malformed number: '" + std::string(t) + "'");
      ++got;
      return true;
    }
    auto t = tk.next();
    if (!t) return false;
    if (!parse_double(*t, v))
      throw NetworkParseError(tk.token_line, "malformed number: '" + std::string(*t) + "'");
    ++got;
    return true;
  };

  long prev = input_dim;
  for (std::size_t s = 0; s < widths.size(); ++s) {
    Layer layer;
    layer.act = acts[s];
    layer.W = Matrix(static_cast<std::size_t>(widths[s]), static_cast<std::size_t>(prev));
    layer.b.resize(static_cast<std::size_t>(widths[s]));
    for (std::size_t i = 0; i < layer.W.rows; ++i) {
      for (std::size_t j = 0; j < layer.W.cols; ++j) {
        double v;
        if (!next_param(v))
          throw NetworkParseError(tk.token_line, "expected " + std::to_string(expected) +
                                               " parameters, found " + std::to_string(got));
        layer.W(i, j) = v;
      }
      double v;
      if (!next_param(v))
        throw NetworkParseError(tk.token_line, "expected " + std::to_string(expected) +
                                             " parameters, found " + std::to_string(got));
      layer.b[i] = v;
    }
    net.layers.push_back(std::move(layer));
    prev = widths[s];
  }

  if (tk.next())
    throw NetworkParseError(tk.token_line, "expected " + std::to_string(expected) +
                                               " parameters, found more");

  net.validate();
  return net;
}

std::string serialize_network(const Network& net) {
  std::ostringstream os;
  os.precision(17);
  os << net.input_dim << "\n" << net.output_dim() << "\n" << net.layers.size() - 1 << "\n";
  for (std::size_t s = 0; s + 1 < net.layers.size(); ++s) os << net.layers[s].W.rows << "\n";
  for (const auto& l : net.layers) os << activation_name(l.act) << "\n";
  for (const auto& l : net.layers)
    for (std::size_t i = 0; i < l.W.rows; ++i) {
      for (std::size_t j = 0; j < l.W.cols; ++j) os << l.W(i, j) << "\n";
      os << l.b[i] << "\n";
    }
  return os.str();
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

}  // namespace polyreach
