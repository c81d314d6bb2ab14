#include "blstmseg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blstmseg {

namespace {

void require_same_length(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(op) + ": length mismatch " + shape_string(a) + " vs " + shape_string(b));
  }
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void Vector::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init)
    : rows_(init.size()), cols_(init.size() == 0 ? 0 : init.begin()->size()) {
  values_.reserve(rows_ * cols_);
  for (const auto& r : init) {
    if (r.size() != cols_) throw ShapeError("Matrix: ragged initializer");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

std::string shape_string(const Matrix& m) {
  std::ostringstream os;
  os << "[" << m.rows() << "x" << m.cols() << "]";
  return os.str();
}

std::string shape_string(const Vector& v) {
  std::ostringstream os;
  os << "[" << v.size() << "]";
  return os.str();
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t state = seed;
  for (auto& s : s_) s = splitmix64(state);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) {
    throw ShapeError("matvec: matrix " + shape_string(m) + " cannot multiply vector " + shape_string(v));
  }
  Vector out(m.rows());
  accumulate_matvec(out, m, v.span());
  return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
  if (m.rows() != v.size()) {
    throw ShapeError("matvec_transposed: matrix " + shape_string(m) + " cannot multiply vector " +
                     shape_string(v));
  }
  Vector out(m.cols());
  accumulate_matvec_transposed(out, m, v.span());
  return out;
}

double sigmoid(double x) {
  // Split by sign so exp never overflows.
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector sigmoid(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid(v[i]);
  return out;
}

Vector tanh(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
  require_same_length(a, b, "hadamard");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Vector add(const Vector& a, const Vector& b) {
  require_same_length(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector softmax(const Vector& v) {
  if (v.empty()) throw ShapeError("softmax: empty vector");
  const double mx = *std::max_element(v.begin(), v.end());
  Vector out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (auto& x : out) x /= sum;
  return out;
}

Vector concat(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  std::copy(a.begin(), a.end(), out.begin());
  std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::size_t argmax(const Vector& v) {
  if (v.empty()) throw ShapeError("argmax: empty vector");
  // First maximal index wins ties.
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

Matrix init_uniform(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("init_uniform: dimensions must be positive, got " + std::to_string(rows) +
                                "x" + std::to_string(cols));
  }
  if (!(scale > 0)) throw std::invalid_argument("init_uniform: scale must be positive");
  Matrix m(rows, cols);
  fill_uniform(rng, m.span(), scale);
  return m;
}

void fill_uniform(Rng& rng, std::span<double> out, double scale) {
  for (auto& x : out) x = scale * (2.0 * rng.uniform() - 1.0);
}

void accumulate_matvec(Vector& out, const Matrix& m, std::span<const double> v) {
  if (m.cols() != v.size() || m.rows() != out.size()) {
    throw ShapeError("accumulate_matvec: matrix " + shape_string(m) + " with vector [" +
                     std::to_string(v.size()) + "] into " + shape_string(out));
  }
  const std::size_t cols = m.cols();
  const double* a = m.data();
  const double* x = v.data();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = a + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    out[r] += s;
  }
}

void accumulate_matvec_transposed(Vector& out, const Matrix& m, std::span<const double> v) {
  if (m.rows() != v.size() || m.cols() != out.size()) {
    throw ShapeError("accumulate_matvec_transposed: matrix " + shape_string(m) + " with vector [" +
                     std::to_string(v.size()) + "] into " + shape_string(out));
  }
  const std::size_t cols = m.cols();
  double* y = out.data();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double s = v[r];
    if (s == 0.0) continue;
    const double* row = m.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += s * row[c];
  }
}

void accumulate_outer(Matrix& m, std::span<const double> a, std::span<const double> b) {
  if (m.rows() != a.size() || m.cols() != b.size()) {
    throw ShapeError("accumulate_outer: " + shape_string(m) + " vs outer [" + std::to_string(a.size()) + "x" +
                     std::to_string(b.size()) + "]");
  }
  const std::size_t cols = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double s = a[r];
    if (s == 0.0) continue;
    double* row = m.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += s * b[c];
  }
}

void axpy(std::span<double> y, double alpha, std::span<const double> x) {
  if (y.size() != x.size()) throw ShapeError("axpy: length mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace blstmseg
