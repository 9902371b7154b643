#include "etherstar/symbols.hpp"

#include <cmath>

namespace etherstar {

namespace {

Complex ipow(double x, int k) { return std::pow(x, k); }

}  // namespace

PolySymbol PolySymbol::constant(int vars, Complex c) {
  PolySymbol p(vars);
  p.add(MultiIndex(vars, 0), c);
  return p;
}

PolySymbol PolySymbol::variable(int vars, int index, Complex c) {
  MultiIndex mi(vars, 0);
  mi.at(index) = 1;
  PolySymbol p(vars);
  p.add(mi, c);
  return p;
}

PolySymbol PolySymbol::monomial(const MultiIndex& mi, Complex c) {
  PolySymbol p(static_cast<int>(mi.size()));
  p.add(mi, c);
  return p;
}

void PolySymbol::add(const MultiIndex& mi, Complex c) {
  if (static_cast<int>(mi.size()) != vars_) throw DomainError("PolySymbol: multi-index arity mismatch");
  for (int e : mi)
    if (e < 0) throw DomainError("PolySymbol: negative exponent");
  auto [it, inserted] = terms_.emplace(mi, c);
  if (!inserted) it->second += c;
  if (it->second == Complex(0.0)) terms_.erase(it);
}

int PolySymbol::degree() const {
  int d = 0;
  for (const auto& [mi, c] : terms_) {
    int s = 0;
    for (int e : mi) s += e;
    d = std::max(d, s);
  }
  return d;
}

Complex PolySymbol::eval(const Vec& x) const {
  Complex r = 0.0;
  for (const auto& [mi, c] : terms_) {
    Complex t = c;
    for (int v = 0; v < vars_; ++v)
      if (mi[v]) t *= ipow(x(v), mi[v]);
    r += t;
  }
  return r;
}

PolySymbol PolySymbol::derivative(int var) const {
  PolySymbol d(vars_);
  for (const auto& [mi, c] : terms_) {
    if (mi[var] == 0) continue;
    MultiIndex m = mi;
    m[var] -= 1;
    d.add(m, c * static_cast<double>(mi[var]));
  }
  return d;
}

CVec PolySymbol::gradient(const Vec& x) const {
  CVec g(vars_);
  for (int v = 0; v < vars_; ++v) g(v) = derivative(v).eval(x);
  return g;
}

CMat PolySymbol::hessian(const Vec& x) const {
  CMat h(vars_, vars_);
  for (int a = 0; a < vars_; ++a) {
    const PolySymbol da = derivative(a);
    for (int b = a; b < vars_; ++b) {
      h(a, b) = da.derivative(b).eval(x);
      h(b, a) = h(a, b);
    }
  }
  return h;
}

PolySymbol PolySymbol::conj() const {
  PolySymbol r(vars_);
  for (const auto& [mi, c] : terms_) r.add(mi, std::conj(c));
  return r;
}

PolySymbol PolySymbol::operator+(const PolySymbol& o) const {
  PolySymbol r = *this;
  for (const auto& [mi, c] : o.terms_) r.add(mi, c);
  return r;
}

PolySymbol PolySymbol::operator-(const PolySymbol& o) const { return *this + o * Complex(-1.0); }

PolySymbol PolySymbol::operator*(Complex s) const {
  PolySymbol r(vars_);
  for (const auto& [mi, c] : terms_) r.add(mi, c * s);
  return r;
}

PolySymbol PolySymbol::operator*(const PolySymbol& o) const {
  if (o.vars_ != vars_) throw DomainError("PolySymbol: arity mismatch");
  PolySymbol r(vars_);
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) {
      MultiIndex m(vars_);
      for (int v = 0; v < vars_; ++v) m[v] = ma[v] + mb[v];
      r.add(m, ca * cb);
    }
  return r;
}

PolySymbol PolySymbol::pruned(double tol) const {
  PolySymbol r(vars_);
  for (const auto& [mi, c] : terms_)
    if (std::abs(c) > tol) r.add(mi, c);
  return r;
}

double PolySymbol::max_coeff_diff(const PolySymbol& o) const {
  double worst = 0.0;
  const PolySymbol d = *this - o;
  for (const auto& [mi, c] : d.terms_) worst = std::max(worst, std::abs(c));
  return worst;
}

nlohmann::json PolySymbol::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [mi, c] : terms_)
    terms.push_back({{"mi", mi}, {"re", c.real()}, {"im", c.imag()}});
  return {{"terms", terms}};
}

PolySymbol PolySymbol::from_json(const nlohmann::json& j, int expected_vars) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
    throw DomainError("PolySymbol JSON: expected {\"terms\": [...]}");
  int vars = -1;
  PolySymbol p;
  try {
    for (const auto& t : j["terms"]) {
      if (!t.is_object() || !t.contains("mi")) throw DomainError("PolySymbol JSON: term without \"mi\"");
      const auto mi = t["mi"].get<MultiIndex>();
      if (vars < 0) {
        vars = static_cast<int>(mi.size());
        if (expected_vars > 0 && vars != expected_vars)
          throw DomainError("PolySymbol JSON: expected " + std::to_string(expected_vars) + " variables");
        if (expected_vars <= 0 && (vars == 0 || vars % 2))
          throw DomainError("PolySymbol JSON: multi-index length must be 2n");
        p = PolySymbol(vars);
      }
      p.add(mi, Complex(t.value("re", 0.0), t.value("im", 0.0)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("PolySymbol JSON: ") + e.what());
  }
  if (vars < 0) throw DomainError("PolySymbol JSON: no terms");
  return p;
}

// ---- FieldSymbol ---------------------------------------------------------

double GaussianEnvelope::operator()(const Vec& x) const {
  return std::exp(-(x - center).squaredNorm() / (2.0 * sigma * sigma));
}

FieldSymbol FieldSymbol::constant(Complex c, int ambient_dim) {
  FieldSymbol f;
  f.value = [c](const Vec&) { return c; };
  f.gradient = [ambient_dim](const Vec&) { return CVec::Zero(ambient_dim).eval(); };
  f.hessian = [ambient_dim](const Vec&) { return CMat::Zero(ambient_dim, ambient_dim).eval(); };
  return f;
}

FieldSymbol FieldSymbol::from_poly(const PolySymbol& p) {
  FieldSymbol f;
  f.value = [p](const Vec& x) { return p.eval(x); };
  f.gradient = [p](const Vec& x) { return p.gradient(x); };
  f.hessian = [p](const Vec& x) { return p.hessian(x); };
  return f;
}

FieldSymbol FieldSymbol::gaussian(const Vec& center, double sigma, Complex amplitude) {
  return poly_gaussian(PolySymbol::constant(static_cast<int>(center.size()), amplitude), center, sigma);
}

FieldSymbol FieldSymbol::poly_gaussian(const PolySymbol& p, const Vec& center, double sigma) {
  const GaussianEnvelope env{center, sigma};
  const double s2 = sigma * sigma;
  FieldSymbol f;
  f.envelope = env;
  f.value = [p, env](const Vec& x) { return p.eval(x) * env(x); };
  f.gradient = [p, env, s2](const Vec& x) {
    const Vec d = (x - env.center) / s2;
    return ((p.gradient(x) - p.eval(x) * d.cast<Complex>()) * env(x)).eval();
  };
  f.hessian = [p, env, s2](const Vec& x) {
    const Vec d = (x - env.center) / s2;
    const CVec dc = d.cast<Complex>();
    const CVec g = p.gradient(x);
    const int n = static_cast<int>(x.size());
    CMat h = p.hessian(x) - g * dc.transpose() - dc * g.transpose() +
             p.eval(x) * (dc * dc.transpose() - CMat::Identity(n, n) / s2);
    return (h * env(x)).eval();
  };
  return f;
}

FieldSymbol FieldSymbol::from_function(std::function<Complex(const Vec&)> fn) {
  FieldSymbol f;
  f.value = std::move(fn);
  return f;
}

FieldSymbol FieldSymbol::conj() const {
  FieldSymbol f;
  f.envelope = envelope;
  auto v = value;
  f.value = [v](const Vec& x) { return std::conj(v(x)); };
  if (gradient) {
    auto g = gradient;
    f.gradient = [g](const Vec& x) { return g(x).conjugate().eval(); };
  }
  if (hessian) {
    auto h = hessian;
    f.hessian = [h](const Vec& x) { return h(x).conjugate().eval(); };
  }
  return f;
}

}  // namespace etherstar
