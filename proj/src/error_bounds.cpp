#include "polyreach/error_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "polyreach/lipschitz.hpp"

namespace polyreach {

double t_error(double L, const DegreeVector& d, const Box& x) {
  if (L < 0.0) throw std::invalid_argument("t_error: negative Lipschitz constant");
  if (d.size() != x.size()) throw std::invalid_argument("t_error: dimension mismatch");
  double inv = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) inv += 1.0 / d[j];
  return 0.5 * L * std::sqrt(inv) * x.max_width();
}

std::vector<int> adaptive_partition(const Box& x, double L, double delta_bar) {
  if (delta_bar <= 0.0) throw std::invalid_argument("adaptive_partition: delta_bar must be > 0");
  if (L < 0.0) throw std::invalid_argument("adaptive_partition: negative Lipschitz constant");
  const double root_m = std::sqrt(static_cast<double>(x.size()));
  std::vector<int> p(x.size(), 1);
  for (std::size_t j = 0; j < x.size(); ++j) {
    double pj = std::ceil(L * x[j].width() * root_m / delta_bar);
    if (pj > 1.0) {
      if (pj > 1e9) throw std::runtime_error("adaptive_partition: partition too fine");
      p[j] = static_cast<int>(pj);
    }
  }
  return p;
}

double sampling_precision(const Box& x, double L, const std::vector<int>& p) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double t = x[j].width() / p[j];
    s += t * t;
  }
  return L * std::sqrt(s);
}

namespace {

struct CenterSweep {
  double max_dev = 0.0;
  double max_gap = 0.0;  // power basis vs de Casteljau
};

// Deviation sweep over cell centers [begin, end) in lexicographic order.
CenterSweep sweep_range(const VectorFn& f, std::size_t output_index, const MultiPoly& poly,
                        const BernsteinTensor* tensor, const Box& x, const std::vector<int>& p,
                        std::size_t begin, std::size_t end) {
  const std::size_t m = x.size();
  CenterSweep r;
  constexpr std::size_t kChunk = 4096;
  std::vector<double> pts(m * kChunk), unit(m * kChunk);
  std::vector<double> fout(f.out_dim * kChunk);
  std::vector<double> pt(m), ptu(m);

  std::vector<int> idx(m, 0);
  {
    std::size_t rem = begin;
    for (std::size_t j = m; j-- > 0;) {
      idx[j] = static_cast<int>(rem % static_cast<std::size_t>(p[j]));
      rem /= static_cast<std::size_t>(p[j]);
    }
  }

  std::size_t done = begin;
  while (done < end) {
    const std::size_t n = std::min(kChunk, end - done);
    for (std::size_t g = 0; g < n; ++g) {
      for (std::size_t j = 0; j < m; ++j) {
        double w = x[j].width();
        double cj = x[j].lo + (2.0 * idx[j] + 1.0) / (2.0 * p[j]) * w;
        double uj = p[j] == 1 ? 0.5 : (2.0 * idx[j] + 1.0) / (2.0 * p[j]);
        pts[j * n + g] = cj;
        unit[j * n + g] = uj;
      }
      for (std::size_t j = m; j-- > 0;) {
        if (++idx[j] < p[j]) break;
        idx[j] = 0;
      }
    }
    f.eval(pts.data(), n, fout.data());
    for (std::size_t g = 0; g < n; ++g) {
      for (std::size_t j = 0; j < m; ++j) {
        pt[j] = pts[j * n + g];
        ptu[j] = unit[j * n + g];
      }
      double fv = fout[output_index * n + g];
      double pb = poly_eval(poly, pt);
      double pv = pb;
      if (tensor != nullptr) {
        pv = de_casteljau(*tensor, ptu);
        r.max_gap = std::max(r.max_gap, std::fabs(pb - pv));
      }
      double dev = std::fabs(pv - fv);
      if (!std::isfinite(dev)) throw std::runtime_error("s_error: non-finite deviation at a center");
      r.max_dev = std::max(r.max_dev, dev);
    }
    done += n;
  }
  return r;
}

}  // namespace

SErrorResult s_error(const VectorFn& f, std::size_t output_index, const MultiPoly& poly,
                     const BernsteinTensor* tensor, const Box& x, double L, double delta_bar) {
  SErrorResult res;
  res.p = adaptive_partition(x, L, delta_bar);
  res.delta_p = sampling_precision(x, L, res.p);

  std::size_t total = 1;
  for (int pj : res.p) total *= static_cast<std::size_t>(pj);
  res.samples = total;

  // Center evaluations are independent; chunk across threads and reduce by
  // max. Reduction order never changes the result.
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t nthreads = std::max(1u, hw);
  nthreads = std::min<std::size_t>(nthreads, (total + 16383) / 16384);
  nthreads = std::max<std::size_t>(nthreads, 1);

  CenterSweep agg;
  if (nthreads <= 1) {
    agg = sweep_range(f, output_index, poly, tensor, x, res.p, 0, total);
  } else {
    std::vector<CenterSweep> parts(nthreads);
    std::vector<std::thread> workers;
    std::size_t per = (total + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
      std::size_t b = t * per, e = std::min(total, b + per);
      if (b >= e) break;
      workers.emplace_back([&, t, b, e] {
        parts[t] = sweep_range(f, output_index, poly, tensor, x, res.p, b, e);
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& part : parts) {
      agg.max_dev = std::max(agg.max_dev, part.max_dev);
      agg.max_gap = std::max(agg.max_gap, part.max_gap);
    }
  }

  res.eps_s = res.delta_p + agg.max_dev;
  res.conv_slack = agg.max_gap;
  return res;
}

ErrorReport certify_fn(const VectorFn& f, const ControllerApprox& approx, double L,
                       double delta_bar) {
  ErrorReport rep;
  rep.L = L;
  for (std::size_t o = 0; o < approx.outputs.size(); ++o) {
    const auto& out = approx.outputs[o];
    double et = t_error(L, approx.degree, approx.domain);
    SErrorResult se =
        s_error(f, o, out.poly, &out.tensor, approx.domain, L, delta_bar);
    rep.eps_t.push_back(et);
    rep.eps_s.push_back(se.eps_s);
    rep.conv_slack.push_back(se.conv_slack);
    rep.eps_used.push_back(std::min(et, se.eps_s) + se.conv_slack);
    rep.p = se.p;
    rep.delta_p = se.delta_p;
    rep.samples += se.samples;
  }
  return rep;
}

ErrorReport certify(const Network& net, const ControllerApprox& approx, double delta_bar) {
  if (net.input_dim != approx.domain.size()) throw std::invalid_argument("certify: dimension mismatch");
  double L = network_lipschitz(net, approx.domain);
  return certify_fn(vector_fn(net), approx, L, delta_bar);
}

}  // namespace polyreach
