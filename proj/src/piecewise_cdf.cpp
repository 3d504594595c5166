#include <algorithm>

#include "fabius/oracle.hpp"

namespace fabius {

ExactRational evaluate(const Polynomial& p, const ExactRational& t) {
  ExactRational acc;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    acc *= t;
    acc += *it;
  }
  return acc;
}

Polynomial taylor_shift(const Polynomial& p, const ExactRational& shift) {
  Polynomial out = p;
  if (shift.is_zero()) return out;
  // Repeated synthetic division by (t - shift).
  const std::size_t n = out.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = n - 1; j > i; --j) out[j - 1] += shift * out[j];
  }
  return out;
}

namespace {

Polynomial integrate(const Polynomial& p) {
  Polynomial out;
  out.reserve(p.size() + 1);
  out.emplace_back(0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    out.push_back(p[k] / ExactRational(static_cast<long>(k) + 1));
  }
  return out;
}

void add_scaled(Polynomial& into, const Polynomial& p,
                const ExactRational& factor) {
  if (into.size() < p.size()) into.resize(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) into[k] += factor * p[k];
}

void trim(Polynomial& p) {
  while (p.size() > 1 && p.back().is_zero()) p.pop_back();
}

// Antiderivative G(y) = integral of F from the left end to y.
class Antiderivative {
 public:
  explicit Antiderivative(const PiecewisePolynomialCDF& f)
      : breaks_(f.breakpoints()) {
    ExactRational running;
    for (std::size_t i = 0; i < f.pieces().size(); ++i) {
      Polynomial q = integrate(f.pieces()[i]);
      q[0] = running;
      running = evaluate(q, breaks_[i + 1] - breaks_[i]);
      integrals_.push_back(std::move(q));
    }
    total_ = running;
  }

  /// G(c + t) as a polynomial in t, valid while c + t stays inside the same
  /// piece as `probe`.
  Polynomial expand_at(const ExactRational& c, const ExactRational& probe) const {
    if (probe <= breaks_.front()) return Polynomial{ExactRational(0)};
    if (probe >= breaks_.back()) {
      // F = 1 beyond the right end.
      return Polynomial{total_ + (c - breaks_.back()), ExactRational(1)};
    }
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), probe);
    const auto i = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return taylor_shift(integrals_[i], c - breaks_[i]);
  }

 private:
  const std::vector<ExactRational>& breaks_;
  std::vector<Polynomial> integrals_;
  ExactRational total_;
};

}  // namespace

PiecewisePolynomialCDF PiecewisePolynomialCDF::uniform(
    const ExactRational& width) {
  if (width.sign() <= 0) throw DomainError("uniform width must be positive");
  PiecewisePolynomialCDF out;
  out.breakpoints_ = {ExactRational(0), width};
  out.pieces_ = {Polynomial{ExactRational(0), width.reciprocal()}};
  out.level_ = 1;
  return out;
}

PiecewisePolynomialCDF PiecewisePolynomialCDF::convolve_uniform(
    const ExactRational& width) const {
  if (width.sign() <= 0) throw DomainError("uniform width must be positive");
  const Antiderivative g(*this);

  std::vector<ExactRational> merged;
  merged.reserve(2 * breakpoints_.size());
  std::vector<ExactRational> shifted;
  shifted.reserve(breakpoints_.size());
  for (const auto& b : breakpoints_) shifted.push_back(b + width);
  std::merge(breakpoints_.begin(), breakpoints_.end(), shifted.begin(),
             shifted.end(), std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  const ExactRational inv_width = width.reciprocal();
  PiecewisePolynomialCDF out;
  out.level_ = level_ + 1;
  out.breakpoints_ = merged;
  out.pieces_.reserve(merged.size() - 1);
  for (std::size_t j = 0; j + 1 < merged.size(); ++j) {
    const ExactRational& c = merged[j];
    const ExactRational mid = (c + merged[j + 1]) / ExactRational(2);
    Polynomial piece = g.expand_at(c, mid);
    add_scaled(piece, g.expand_at(c - width, mid - width), ExactRational(-1));
    for (auto& coeff : piece) coeff *= inv_width;
    trim(piece);
    out.pieces_.push_back(std::move(piece));
  }
  return out;
}

ExactRational PiecewisePolynomialCDF::operator()(const ExactRational& x) const {
  if (x <= breakpoints_.front()) return ExactRational(0);
  if (x >= breakpoints_.back()) return ExactRational(1);
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return fabius::evaluate(pieces_[i], x - breakpoints_[i]);
}

PiecewisePolynomialCDF PiecewisePolynomialCDF::normalized() const {
  PiecewisePolynomialCDF out;
  out.level_ = level_;
  if (pieces_.empty()) return *this;
  out.breakpoints_.push_back(breakpoints_.front());
  Polynomial current = pieces_.front();
  ExactRational current_left = breakpoints_.front();
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    Polynomial continued =
        taylor_shift(current, breakpoints_[i] - current_left);
    trim(continued);
    Polynomial next = pieces_[i];
    trim(next);
    if (continued == next) continue;
    out.breakpoints_.push_back(breakpoints_[i]);
    out.pieces_.push_back(std::move(current));
    current = std::move(next);
    current_left = breakpoints_[i];
  }
  trim(current);
  out.pieces_.push_back(std::move(current));
  out.breakpoints_.push_back(breakpoints_.back());
  for (auto& p : out.pieces_) trim(p);
  return out;
}

bool PiecewisePolynomialCDF::is_continuous() const {
  if (pieces_.empty()) return false;
  if (!fabius::evaluate(pieces_.front(), ExactRational(0)).is_zero()) {
    return false;
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const ExactRational right =
        fabius::evaluate(pieces_[i], breakpoints_[i + 1] - breakpoints_[i]);
    const ExactRational expected =
        i + 1 < pieces_.size() ? fabius::evaluate(pieces_[i + 1], ExactRational(0))
                               : ExactRational(1);
    if (right != expected) return false;
  }
  return true;
}

std::size_t PiecewisePolynomialCDF::max_degree() const {
  std::size_t degree = 0;
  for (const auto& p : pieces_) {
    if (!p.empty()) degree = std::max(degree, p.size() - 1);
  }
  return degree;
}

PiecewisePolynomialCDF truncated_cdf(int N) {
  if (N < 1 || N > kMaxOracleLevel) {
    throw DomainError("truncated_cdf: N = " + std::to_string(N) +
                      " outside [1, " + std::to_string(kMaxOracleLevel) + "]");
  }
  PiecewisePolynomialCDF cdf = PiecewisePolynomialCDF::uniform(ExactRational(1, 2));
  for (int n = 2; n <= N; ++n) {
    cdf = cdf.convolve_uniform(ExactRational::pow2(-n));
  }
  return cdf;
}

}  // namespace fabius
