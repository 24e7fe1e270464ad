#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>
#include <thread>

#include "feyn/errors.hpp"
#include "feyn/quadrature.hpp"

namespace feyn {

double VectorResult::error_norm() const {
  double s = 0;
  for (double e : error) s += e * e;
  return std::sqrt(s);
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) body(i);
    });
  for (auto& th : pool) th.join();
}

namespace {

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct Region {
  std::vector<double> center, half;
  std::vector<double> value, error;
  double error_norm = 0;
  int split_axis = 0;
};

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

class Rule {
 public:
  Rule(int dim, int ncomp, const VectorIntegrand& f) : dim_(dim), ncomp_(ncomp), f_(f) {
    if (dim_ >= 2) {
      const double n = dim_;
      w7_ = {(12824 - 9120 * n + 400 * n * n) / 19683, 980.0 / 6561, (1820 - 400 * n) / 19683, 200.0 / 19683,
             6859.0 / 19683 / std::pow(2.0, n)};
      w5_ = {(729 - 950 * n + 50 * n * n) / 729, 245.0 / 486, (265 - 100 * n) / 1458, 25.0 / 729};
    }
  }

  long points() const {
    if (dim_ == 1) return 15;
    return 1 + 4L * dim_ + 2L * dim_ * (dim_ - 1) + (1L << dim_);
  }

  void apply(Region& r) const {
    if (dim_ == 1)
      gk15(r);
    else
      genz_malik(r);
    r.error_norm = norm(r.error);
  }

 private:
  void eval(const std::vector<double>& x, std::vector<double>& out) const { f_(x.data(), out.data()); }

  void gk15(Region& r) const {
    std::vector<double> x(1), fc(ncomp_), f1(ncomp_), f2(ncomp_);
    std::vector<double> kron(ncomp_, 0.0), gauss(ncomp_, 0.0);
    const double c = r.center[0], h = r.half[0];
    x[0] = c;
    eval(x, fc);
    for (int k = 0; k < ncomp_; ++k) {
      kron[k] = fc[k] * kWgk[7];
      gauss[k] = fc[k] * kWg[3];
    }
    for (int j = 0; j < 7; ++j) {
      x[0] = c - h * kXgk[j];
      eval(x, f1);
      x[0] = c + h * kXgk[j];
      eval(x, f2);
      for (int k = 0; k < ncomp_; ++k) {
        kron[k] += kWgk[j] * (f1[k] + f2[k]);
        if (j % 2 == 1) gauss[k] += kWg[j / 2] * (f1[k] + f2[k]);
      }
    }
    r.value.assign(ncomp_, 0.0);
    r.error.assign(ncomp_, 0.0);
    for (int k = 0; k < ncomp_; ++k) {
      r.value[k] = kron[k] * h;
      r.error[k] = std::abs((kron[k] - gauss[k]) * h);
    }
    r.split_axis = 0;
  }

  void genz_malik(Region& r) const {
    static const double l2 = std::sqrt(9.0 / 70), l3 = std::sqrt(9.0 / 10), l4 = std::sqrt(9.0 / 10),
                        l5 = std::sqrt(9.0 / 19);
    const int n = dim_;
    std::vector<double> x = r.center, fc(ncomp_), fa(ncomp_), fb(ncomp_);
    std::vector<double> s1(ncomp_, 0), s2(ncomp_, 0), s3(ncomp_, 0), s4(ncomp_, 0), s5(ncomp_, 0);
    eval(x, fc);
    double best = -1;
    int axis = 0;
    std::vector<double> d2(ncomp_), d3(ncomp_);
    for (int i = 0; i < n; ++i) {
      x[i] = r.center[i] - l2 * r.half[i];
      eval(x, fa);
      x[i] = r.center[i] + l2 * r.half[i];
      eval(x, fb);
      for (int k = 0; k < ncomp_; ++k) {
        s2[k] += fa[k] + fb[k];
        d2[k] = fa[k] + fb[k];
      }
      x[i] = r.center[i] - l3 * r.half[i];
      eval(x, fa);
      x[i] = r.center[i] + l3 * r.half[i];
      eval(x, fb);
      for (int k = 0; k < ncomp_; ++k) {
        s3[k] += fa[k] + fb[k];
        d3[k] = fa[k] + fb[k];
      }
      x[i] = r.center[i];
      double diff = 0;
      const double ratio = (l2 * l2) / (l3 * l3);
      for (int k = 0; k < ncomp_; ++k) {
        double v = d2[k] - 2 * fc[k] - ratio * (d3[k] - 2 * fc[k]);
        diff += v * v;
      }
      // near ties go to the widest axis so flat integrands still subdivide evenly
      diff = std::sqrt(diff);
      bool better = diff > best * (1 + 1e-9);
      bool tie = !better && diff >= best * (1 - 1e-9) && r.half[i] > r.half[axis];
      if (better || tie) {
        best = std::max(best, diff);
        axis = i;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int si = -1; si <= 1; si += 2)
          for (int sj = -1; sj <= 1; sj += 2) {
            x[i] = r.center[i] + si * l4 * r.half[i];
            x[j] = r.center[j] + sj * l4 * r.half[j];
            eval(x, fa);
            for (int k = 0; k < ncomp_; ++k) s4[k] += fa[k];
            x[i] = r.center[i];
            x[j] = r.center[j];
          }
    for (long mask = 0; mask < (1L << n); ++mask) {
      for (int i = 0; i < n; ++i) x[i] = r.center[i] + (((mask >> i) & 1) ? l5 : -l5) * r.half[i];
      eval(x, fa);
      for (int k = 0; k < ncomp_; ++k) s5[k] += fa[k];
    }
    double vol = 1;
    for (int i = 0; i < n; ++i) vol *= 2 * r.half[i];
    r.value.assign(ncomp_, 0.0);
    r.error.assign(ncomp_, 0.0);
    for (int k = 0; k < ncomp_; ++k) {
      double v7 = w7_[0] * fc[k] + w7_[1] * s2[k] + w7_[2] * s3[k] + w7_[3] * s4[k] + w7_[4] * s5[k];
      double v5 = w5_[0] * fc[k] + w5_[1] * s2[k] + w5_[2] * s3[k] + w5_[3] * s4[k];
      r.value[k] = vol * v7;
      r.error[k] = std::abs(vol * (v7 - v5));
    }
    r.split_axis = axis;
  }

  int dim_, ncomp_;
  const VectorIntegrand& f_;
  std::vector<double> w7_, w5_;
};

struct ByError {
  const std::vector<Region>* regions;
  bool operator()(int a, int b) const {
    const auto& ra = (*regions)[a];
    const auto& rb = (*regions)[b];
    if (ra.error_norm != rb.error_norm) return ra.error_norm < rb.error_norm;
    return a > b;
  }
};

}  // namespace

VectorResult integrate_box(int dim, int ncomp, const VectorIntegrand& f, const std::vector<double>& lo,
                           const std::vector<double>& hi, const QuadConfig& cfg) {
  if (dim < 1 || static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
    throw Error(ErrorKind::InvalidArgument, "integrate_box: bad dimensions");
  Rule rule(dim, ncomp, f);
  std::vector<Region> regions;
  regions.reserve(1024);
  Region root;
  for (int i = 0; i < dim; ++i) {
    root.center.push_back(0.5 * (lo[i] + hi[i]));
    root.half.push_back(0.5 * (hi[i] - lo[i]));
  }
  rule.apply(root);
  regions.push_back(root);
  long evals = rule.points();

  std::vector<char> active(1, 1);
  std::priority_queue<int, std::vector<int>, ByError> heap(ByError{&regions});
  heap.push(0);

  auto totals = [&](std::vector<double>& val, std::vector<double>& err) {
    val.assign(ncomp, 0.0);
    err.assign(ncomp, 0.0);
    for (size_t r = 0; r < regions.size(); ++r)
      if (active[r])
        for (int k = 0; k < ncomp; ++k) {
          val[k] += regions[r].value[k];
          err[k] += regions[r].error[k];
        }
  };

  std::vector<double> value, error;
  totals(value, error);
  const int batch = 8;
  int iteration = 0;
  while (true) {
    double tol = std::max(cfg.atol, cfg.rtol * norm(value));
    if (!std::isfinite(norm(value)) || !std::isfinite(norm(error)))
      throw Error(ErrorKind::NonConvergence, "integrand produced a non-finite value");
    if (norm(error) <= tol) break;
    int take = std::min<int>(batch, static_cast<int>(heap.size()));
    if (evals + 2L * take * rule.points() > cfg.max_evals) {
      throw Error(ErrorKind::NonConvergence, "cubature budget of " + std::to_string(cfg.max_evals) +
                                                 " evaluations exhausted; error " + std::to_string(norm(error)) +
                                                 " > tolerance " + std::to_string(tol));
    }
    std::vector<int> parents;
    for (int i = 0; i < take; ++i) {
      parents.push_back(heap.top());
      heap.pop();
    }
    std::vector<Region> children(2 * take);
    for (int i = 0; i < take; ++i) {
      const Region& p = regions[parents[i]];
      for (int side = 0; side < 2; ++side) {
        Region c;
        c.center = p.center;
        c.half = p.half;
        c.half[p.split_axis] *= 0.5;
        c.center[p.split_axis] += (side ? 1 : -1) * c.half[p.split_axis];
        children[2 * i + side] = std::move(c);
      }
    }
    parallel_for(static_cast<int>(children.size()), cfg.threads, [&](int i) { rule.apply(children[i]); });
    evals += static_cast<long>(children.size()) * rule.points();
    for (int p : parents) {
      active[p] = 0;
      for (int k = 0; k < ncomp; ++k) {
        value[k] -= regions[p].value[k];
        error[k] -= regions[p].error[k];
      }
    }
    for (auto& c : children) {
      for (int k = 0; k < ncomp; ++k) {
        value[k] += c.value[k];
        error[k] += c.error[k];
      }
      regions.push_back(std::move(c));
      active.push_back(1);
      heap.push(static_cast<int>(regions.size()) - 1);
    }
    if (++iteration % 64 == 0) totals(value, error);
  }
  totals(value, error);
  return VectorResult{value, error, evals};
}

IntegralResult integrate_box_complex(int dim, const std::function<std::complex<double>(const double*)>& f,
                                     const std::vector<double>& lo, const std::vector<double>& hi,
                                     const QuadConfig& cfg) {
  VectorIntegrand g = [&](const double* x, double* out) {
    auto v = f(x);
    out[0] = v.real();
    out[1] = v.imag();
  };
  auto r = integrate_box(dim, 2, g, lo, hi, cfg);
  return IntegralResult{{r.value[0], r.value[1]}, r.error_norm(), r.evaluations};
}

}  // namespace feyn
