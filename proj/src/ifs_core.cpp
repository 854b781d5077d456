#include "ifsg/ifs_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ifsg/errors.hpp"

namespace ifsg {

double normalize_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t <= -std::numbers::pi) t += two_pi;
  if (t > std::numbers::pi) t -= two_pi;
  return t;
}

Similarity::Similarity(double ratio, double rotation, bool reflect, Point translation)
    : ratio_(ratio), angle_(rotation), reflect_(reflect), t_(translation),
      a_(std::polar(ratio, rotation)) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw DomainError("similarity ratio must be positive");
}

double Similarity::rotation() const { return normalize_angle(angle_); }

Similarity operator*(const Similarity& f, const Similarity& g) {
  Similarity h;
  h.ratio_ = f.ratio_ * g.ratio_;
  h.angle_ = f.angle_ + (f.reflect_ ? -g.angle_ : g.angle_);
  h.reflect_ = f.reflect_ != g.reflect_;
  h.a_ = f.a_ * (f.reflect_ ? std::conj(g.a_) : g.a_);
  h.t_ = f(g.t_);
  return h;
}

Similarity Similarity::inverse() const {
  // z = a w' + t with w' = w or conj(w); solve for w.
  Similarity inv;
  inv.ratio_ = 1.0 / ratio_;
  inv.reflect_ = reflect_;
  if (!reflect_) {
    inv.angle_ = -angle_;
    inv.a_ = 1.0 / a_;
    inv.t_ = -t_ / a_;
  } else {
    inv.angle_ = angle_;
    inv.a_ = 1.0 / std::conj(a_);
    inv.t_ = -std::conj(t_) / std::conj(a_);
  }
  return inv;
}

Point fixed_point(const Similarity& s) {
  if (!s.is_contracting()) throw DomainError("fixed point requested for a non-contracting map");
  const Point a = s.linear();
  const Point t = s.translation();
  if (!s.reflect()) return t / (1.0 - a);
  // x = p x + q y + tx,  y = q x - p y + ty
  const double p = a.real(), q = a.imag();
  const double m11 = 1.0 - p, m12 = -q, m21 = -q, m22 = 1.0 + p;
  const double det = m11 * m22 - m12 * m21;  // 1 - r^2 > 0
  const double x = (t.real() * m22 - m12 * t.imag()) / det;
  const double y = (m11 * t.imag() - m21 * t.real()) / det;
  return {x, y};
}

// ---------------------------------------------------------------------------

Multiindex Multiindex::parse(std::string_view text) {
  std::vector<std::uint8_t> letters;
  auto push = [&](long v) {
    if (v < 1 || v > 255) throw ValidationError("multiindex letter out of range: " + std::string(text));
    letters.push_back(static_cast<std::uint8_t>(v - 1));
  };
  if (text.find('.') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('.', start);
      if (end == std::string_view::npos) end = text.size();
      auto tok = text.substr(start, end - start);
      if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw ValidationError("malformed multiindex: " + std::string(text));
      push(std::stol(std::string(tok)));
      start = end + 1;
    }
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw ValidationError("malformed multiindex: " + std::string(text));
      push(c - '0');
    }
  }
  return Multiindex(std::move(letters));
}

Multiindex Multiindex::repeat(const Multiindex& w, std::size_t times) {
  std::vector<std::uint8_t> out;
  out.reserve(w.size() * times);
  for (std::size_t k = 0; k < times; ++k) out.insert(out.end(), w.letters_.begin(), w.letters_.end());
  return Multiindex(std::move(out));
}

Multiindex Multiindex::child(std::uint8_t letter) const {
  Multiindex c = *this;
  c.letters_.push_back(letter);
  return c;
}

Multiindex Multiindex::prefix(std::size_t n) const {
  n = std::min(n, letters_.size());
  return Multiindex({letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(n)});
}

Multiindex Multiindex::suffix_from(std::size_t n) const {
  n = std::min(n, letters_.size());
  return Multiindex({letters_.begin() + static_cast<std::ptrdiff_t>(n), letters_.end()});
}

Multiindex operator+(const Multiindex& a, const Multiindex& b) {
  Multiindex c = a;
  c.letters_.insert(c.letters_.end(), b.letters_.begin(), b.letters_.end());
  return c;
}

std::string Multiindex::str() const {
  const bool wide = std::any_of(letters_.begin(), letters_.end(), [](auto l) { return l >= 9; });
  std::string s;
  for (std::size_t k = 0; k < letters_.size(); ++k) {
    if (wide && k > 0) s += '.';
    s += std::to_string(letters_[k] + 1);
  }
  return s;
}

std::size_t common_prefix_length(const Multiindex& u, const Multiindex& v) {
  std::size_t n = std::min(u.size(), v.size());
  std::size_t k = 0;
  while (k < n && u[k] == v[k]) ++k;
  return k;
}

WordRelation word_relation(const Multiindex& u, const Multiindex& v) {
  const std::size_t k = common_prefix_length(u, v);
  if (k == u.size() && k == v.size()) return WordRelation::Equal;
  if (k == u.size()) return WordRelation::Prefix;
  if (k == v.size()) return WordRelation::Extension;
  return WordRelation::Incomparable;
}

const char* to_string(WordRelation r) {
  switch (r) {
    case WordRelation::Prefix: return "prefix";
    case WordRelation::Extension: return "extension";
    case WordRelation::Incomparable: return "incomparable";
    case WordRelation::Equal: return "equal";
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

Multiindex primitive_root(const Multiindex& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t k = d; k < n && ok; ++k) ok = w[k] == w[k - d];
    if (ok) return w.prefix(d);
  }
  return w;
}

}  // namespace

Address::Address(Multiindex preperiod, Multiindex period)
    : pre_(std::move(preperiod)), period_(primitive_root(period)) {
  if (period_.empty()) throw ValidationError("address period must be nonempty");
  // Absorb trailing preperiod letters into a rotated period.
  while (!pre_.empty() && pre_.back() == period_.back()) {
    std::vector<std::uint8_t> rotated;
    rotated.reserve(period_.size());
    rotated.push_back(period_.back());
    for (std::size_t k = 0; k + 1 < period_.size(); ++k) rotated.push_back(period_[k]);
    period_ = Multiindex(std::move(rotated));
    pre_.pop_back();
  }
}

Address Address::parse(std::string_view text) {
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
      close + 1 != text.size())
    throw ValidationError("malformed address (expected e.g. 1(2)): " + std::string(text));
  return Address(Multiindex::parse(text.substr(0, open)),
                 Multiindex::parse(text.substr(open + 1, close - open - 1)));
}

std::uint8_t Address::letter(std::size_t k) const {
  if (k < pre_.size()) return pre_[k];
  return period_[(k - pre_.size()) % period_.size()];
}

std::string Address::str() const { return pre_.str() + "(" + period_.str() + ")"; }

// ---------------------------------------------------------------------------

SimSystem::SimSystem(std::vector<Similarity> maps) : maps_(std::move(maps)) {
  if (maps_.size() < 2) throw ValidationError("a system needs at least two maps");
  if (maps_.size() > 255) throw ValidationError("at most 255 maps are supported");
  r_min_ = r_max_ = maps_.front().ratio();
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const double r = maps_[i].ratio();
    if (!(r > 0.0 && r < 1.0))
      throw ValidationError("map " + std::to_string(i + 1) + ": ratio must be in (0,1)");
    r_min_ = std::min(r_min_, r);
    r_max_ = std::max(r_max_, r);
  }
}

void SimSystem::check(const Multiindex& w) const {
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] >= maps_.size())
      throw IndexError("letter " + std::to_string(w[k] + 1) + " out of range 1.." +
                       std::to_string(maps_.size()));
}

Similarity compose(const SimSystem& system, const Multiindex& word) {
  system.check(word);
  Similarity s;
  for (std::size_t k = 0; k < word.size(); ++k) s = s * system[word[k]];
  return s;
}

Point eval_address(const SimSystem& system, const Address& a) {
  const Point z = fixed_point(compose(system, a.period()));
  return compose(system, a.preperiod())(z);
}

}  // namespace ifsg
